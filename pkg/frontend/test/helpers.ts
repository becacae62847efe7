import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { mulberry32 } from "../src/rng.js";

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), `${prefix}-`));
}

/** Sum of sines plus a little noise; deterministic for a given seed. */
export function makeTone(
  freqsHz: number[],
  durS: number,
  sampleRate = 16000,
  seed = 1,
  noise = 0.01,
): Float32Array {
  const rand = mulberry32(seed);
  const n = Math.round(durS * sampleRate);
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    let v = 0;
    for (const f of freqsHz) {
      v += Math.sin((2 * Math.PI * f * i) / sampleRate);
    }
    out[i] = (0.7 * v) / Math.max(1, freqsHz.length) + noise * (rand() * 2 - 1);
  }
  return out;
}

/** Back-to-back tonal regimes, one per entry, each `durS` long. */
export function makeRegimes(
  regimes: number[][],
  durS: number,
  sampleRate = 16000,
  seed = 1,
): Float32Array {
  const parts = regimes.map((freqs, i) => makeTone(freqs, durS, sampleRate, seed + i));
  const out = new Float32Array(parts.reduce((a, p) => a + p.length, 0));
  let off = 0;
  for (const p of parts) {
    out.set(p, off);
    off += p.length;
  }
  return out;
}
