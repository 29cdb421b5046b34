/**
 * HTTP client for the qaq scoring service.
 *
 * One client instance may be shared freely: every call is stateless apart
 * from model handles, which the service keeps immutable after load, so
 * concurrent scoring against a loaded model is safe.
 */

import { bufferPayload, ImageBuffer } from "./buffers";
import { errorFromResponse, QaqClientError } from "./errors";

export interface SsimParams {
  c1?: number;
  c2?: number;
}

export interface FeatureConfig {
  patchSize?: number;
  sharpnessFraction?: number;
  scales?: 1 | 2;
}

export interface ModelHandle {
  readonly modelId: string;
  readonly featureDim: number;
  readonly meta: Record<string, unknown>;
}

interface ValueResponse {
  value: number;
}

function ssimParamsPayload(params?: SsimParams): object | undefined {
  if (params === undefined) return undefined;
  const out: Record<string, number> = {};
  if (params.c1 !== undefined) out.c1 = params.c1;
  if (params.c2 !== undefined) out.c2 = params.c2;
  return out;
}

function featureConfigPayload(config?: FeatureConfig): object | undefined {
  if (config === undefined) return undefined;
  const out: Record<string, number> = {};
  if (config.patchSize !== undefined) out.patch_size = config.patchSize;
  if (config.sharpnessFraction !== undefined) out.sharpness_fraction = config.sharpnessFraction;
  if (config.scales !== undefined) out.scales = config.scales;
  return out;
}

export class QaqClient {
  private readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  /** Image-level SSIM of two equally sized buffers. */
  async ssimIndex(reference: ImageBuffer, test: ImageBuffer, params?: SsimParams): Promise<number> {
    const body: Record<string, unknown> = {
      reference: bufferPayload(reference, "reference"),
      test: bufferPayload(test, "test"),
    };
    const p = ssimParamsPayload(params);
    if (p !== undefined) body.params = p;
    return (await this.post<ValueResponse>("/v1/ssim-index", body)).value;
  }

  /** Quality-aware distance (pixel mean of sqrt(2 - L - CS)). */
  async dqDistance(reference: ImageBuffer, test: ImageBuffer, params?: SsimParams): Promise<number> {
    const body: Record<string, unknown> = {
      reference: bufferPayload(reference, "reference"),
      test: bufferPayload(test, "test"),
    };
    const p = ssimParamsPayload(params);
    if (p !== undefined) body.params = p;
    return (await this.post<ValueResponse>("/v1/dq-distance", body)).value;
  }

  /** Per-pair coupled penalty (|dX - dY| / dq(x, y) - 1)^2. */
  async ssimGpPenalty(
    dX: number,
    dY: number,
    x: ImageBuffer,
    y: ImageBuffer,
    options?: { params?: SsimParams; floor?: number },
  ): Promise<number> {
    const body: Record<string, unknown> = {
      d_x: dX,
      d_y: dY,
      x: bufferPayload(x, "x"),
      y: bufferPayload(y, "y"),
    };
    const p = ssimParamsPayload(options?.params);
    if (p !== undefined) body.params = p;
    if (options?.floor !== undefined) body.floor = options.floor;
    return (await this.post<ValueResponse>("/v1/ssim-gp", body)).value;
  }

  /** Patch-averaged naturalness feature vector (length 18 * scales). */
  async extractFeatures(image: ImageBuffer, config?: FeatureConfig): Promise<Float64Array> {
    const body: Record<string, unknown> = { image: bufferPayload(image, "image") };
    const c = featureConfigPayload(config);
    if (c !== undefined) body.config = c;
    const res = await this.post<{ features: number[] }>("/v1/extract-features", body);
    return Float64Array.from(res.features);
  }

  /** Load a model file on the service host; the handle stays valid for the
   * service's lifetime. */
  async loadModel(path: string): Promise<ModelHandle> {
    const res = await this.post<{ model_id: string; feature_dim: number; meta: Record<string, unknown> }>(
      "/v1/models",
      { path },
    );
    return { modelId: res.model_id, featureDim: res.feature_dim, meta: res.meta };
  }

  /** Distance between two loaded models. */
  async niqeDistance(a: ModelHandle | string, b: ModelHandle | string): Promise<number> {
    const body = {
      model_a: typeof a === "string" ? a : a.modelId,
      model_b: typeof b === "string" ? b : b.modelId,
    };
    return (await this.post<ValueResponse>("/v1/niqe-distance", body)).value;
  }

  /** Naturalness penalty of a gradient field against a pristine model. */
  async niqeGpPenalty(grad: ImageBuffer, model: ModelHandle | string): Promise<number> {
    const body = {
      grad: bufferPayload(grad, "grad"),
      model_id: typeof model === "string" ? model : model.modelId,
    };
    return (await this.post<ValueResponse>("/v1/niqe-gp", body)).value;
  }

  /** Service liveness probe. */
  async health(): Promise<{ status: string; version: string }> {
    const res = await fetch(`${this.baseUrl}/health`);
    if (!res.ok) {
      throw errorFromResponse(res.status, await res.json().catch(() => undefined));
    }
    return (await res.json()) as { status: string; version: string };
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let res: Response;
    try {
      res = await fetch(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (cause) {
      throw new QaqClientError(
        "transport",
        `cannot reach qaq service at ${this.baseUrl}: ${String(cause)}`,
      );
    }
    const payload = await res.json().catch(() => undefined);
    if (!res.ok) {
      throw errorFromResponse(res.status, payload);
    }
    return payload as T;
  }
}
