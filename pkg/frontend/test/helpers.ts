/** Shared machinery for tests: service lifecycle, CLI runner, fixtures. */

import { ChildProcess, spawn, spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import * as net from "node:net";
import { tmpdir } from "node:os";
import * as path from "node:path";

export const PYTHON = process.env.QAQ_PYTHON ?? "python3";

export function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        srv.close();
        reject(new Error("could not allocate a port"));
        return;
      }
      const port = address.port;
      srv.close(() => resolve(port));
    });
    srv.on("error", reject);
  });
}

export interface ServiceHandle {
  baseUrl: string;
  stop: () => void;
}

/** Start the scoring service and wait until /health answers. */
export async function startService(): Promise<ServiceHandle> {
  const port = await freePort();
  const proc: ChildProcess = spawn(
    PYTHON,
    ["-m", "uvicorn", "qaq.service:app", "--host", "127.0.0.1", "--port", String(port), "--log-level", "warning"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (proc.exitCode !== null) {
      throw new Error(`service exited early (code ${proc.exitCode}): ${stderr}`);
    }
    try {
      const res = await fetch(`${baseUrl}/health`);
      if (res.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill("SIGKILL");
      throw new Error(`service did not come up within 30s: ${stderr}`);
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  return { baseUrl, stop: () => proc.kill("SIGTERM") };
}

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

export function runCli(...args: string[]): CliResult {
  const res = spawnSync(PYTHON, ["-m", "qaq", ...args], { encoding: "utf-8" });
  return { status: res.status ?? -1, stdout: res.stdout, stderr: res.stderr };
}

export function tempDir(prefix: string): string {
  return mkdtempSync(path.join(tmpdir(), prefix));
}

/** Write integer-valued grayscale data as a binary PGM file. */
export function writePgm(filePath: string, pixels: Uint8Array, height: number, width: number): void {
  const header = Buffer.from(`P5\n${width} ${height}\n255\n`, "ascii");
  writeFileSync(filePath, Buffer.concat([header, Buffer.from(pixels)]));
}

/** Deterministic PRNG (mulberry32) so fixtures are reproducible. */
export function makeRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randomBytes(rng: () => number, count: number): Uint8Array {
  const out = new Uint8Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = Math.floor(rng() * 256);
  }
  return out;
}

/** FNV-1a over the buffer's raw bytes; used to prove no mutation. */
export function checksum(data: Float64Array): number {
  const bytes = new Uint8Array(data.buffer, data.byteOffset, data.byteLength);
  let hash = 0x811c9dc5;
  for (let i = 0; i < bytes.length; i++) {
    hash ^= bytes[i];
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash;
}

/** Parse the `score-ssim` output block into labeled numbers. */
export function parseScoreSsim(stdout: string): Record<string, number> {
  const out: Record<string, number> = {};
  for (const line of stdout.trim().split("\n")) {
    const [label, value] = line.split(" ");
    out[label] = Number(value);
  }
  return out;
}
