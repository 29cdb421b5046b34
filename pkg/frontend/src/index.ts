export { QaqClient } from "./client";
export type { SsimParams, FeatureConfig, ModelHandle } from "./client";
export { imageBuffer, validateBuffer, encodeBuffer } from "./buffers";
export type { ImageBuffer } from "./buffers";
export { QaqClientError } from "./errors";
export type { ErrorCode } from "./errors";
