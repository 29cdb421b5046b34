/**
 * Structured errors — every failure crossing the service boundary (or caught
 * by local validation) surfaces as a QaqClientError with a stable code,
 * never as a bare throw from deep inside a transport stack.
 */

export type ErrorCode =
  | "dimension"
  | "domain"
  | "degenerate_data"
  | "model_incompatible"
  | "input"
  | "validation"
  | "transport"
  | "error";

export class QaqClientError extends Error {
  readonly code: ErrorCode;
  /** Request field the error refers to, when the service names one. */
  readonly field?: string;
  /** HTTP status, when the error came back from the service. */
  readonly status?: number;

  constructor(code: ErrorCode, message: string, field?: string, status?: number) {
    super(message);
    this.name = "QaqClientError";
    this.code = code;
    this.field = field;
    this.status = status;
  }
}

interface ErrorBody {
  error?: { code?: string; message?: string; field?: string };
}

const KNOWN_CODES: ReadonlySet<string> = new Set([
  "dimension",
  "domain",
  "degenerate_data",
  "model_incompatible",
  "input",
  "validation",
  "error",
]);

/** Build a QaqClientError from a non-2xx service response body. */
export function errorFromResponse(status: number, body: unknown): QaqClientError {
  const parsed = (body ?? {}) as ErrorBody;
  const code = parsed.error?.code;
  return new QaqClientError(
    code !== undefined && KNOWN_CODES.has(code) ? (code as ErrorCode) : "error",
    parsed.error?.message ?? `service returned HTTP ${status}`,
    parsed.error?.field,
    status,
  );
}
