/**
 * Image buffers: contiguous row-major float64 data with explicit
 * (height, width) shape.  The caller owns the memory — nothing here ever
 * writes into a caller's Float64Array; encoding reads through a zero-copy
 * byte view.
 */

import { QaqClientError } from "./errors";

export interface ImageBuffer {
  readonly height: number;
  readonly width: number;
  /** Row-major, length = height * width. */
  readonly data: Float64Array;
}

export function imageBuffer(data: Float64Array, height: number, width: number): ImageBuffer {
  return { height, width, data };
}

/** Shape and finiteness checks, reported with the offending field's name. */
export function validateBuffer(buf: ImageBuffer, field: string): void {
  if (!Number.isInteger(buf.height) || buf.height < 1) {
    throw new QaqClientError("dimension", `${field}.height must be a positive integer`, field);
  }
  if (!Number.isInteger(buf.width) || buf.width < 1) {
    throw new QaqClientError("dimension", `${field}.width must be a positive integer`, field);
  }
  if (buf.data.length !== buf.height * buf.width) {
    throw new QaqClientError(
      "dimension",
      `${field}: buffer holds ${buf.data.length} values, expected ${buf.height}x${buf.width}=${buf.height * buf.width}`,
      field,
    );
  }
  for (let i = 0; i < buf.data.length; i++) {
    if (!Number.isFinite(buf.data[i])) {
      throw new QaqClientError(
        "domain",
        `${field}: buffer contains a non-finite value at index ${i}`,
        field,
      );
    }
  }
}

/** Little-endian float64 bytes of the buffer, base64-encoded (no copy-out). */
export function encodeBuffer(buf: ImageBuffer): string {
  const bytes = Buffer.from(buf.data.buffer, buf.data.byteOffset, buf.data.byteLength);
  return bytes.toString("base64");
}

/** Wire form of one buffer argument. */
export function bufferPayload(buf: ImageBuffer, field: string): object {
  validateBuffer(buf, field);
  return { height: buf.height, width: buf.width, data_b64: encodeBuffer(buf) };
}
