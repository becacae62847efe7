/**
 * Real-audio benchmark construction: splice windows cut from labeled source
 * recordings into one continuous waveform, recording where the joins landed
 * as reference segments. Tokenizing the spliced file with those references
 * attached yields a ground-truth manifest for the core evaluator.
 */

import { mulberry32 } from "./rng.js";
import { type Segment } from "./interchange.js";

export interface LabeledAudio {
  label: string;
  samples: Float32Array;
}

export interface ConcatOptions {
  nSegments: number;
  segMinS: number;
  segMaxS: number;
  sampleRate: number;
  seed: number;
}

export interface SplicedAudio {
  samples: Float32Array;
  segments: Segment[]; // adjacent same-label runs already merged
}

export function spliceSegments(sources: LabeledAudio[], opts: ConcatOptions): SplicedAudio {
  if (sources.length < 2) {
    throw new Error(`need at least 2 labeled sources to splice, got ${sources.length}`);
  }
  if (opts.nSegments < 1) {
    throw new Error("nSegments must be >= 1");
  }
  if (!(0 < opts.segMinS && opts.segMinS <= opts.segMaxS)) {
    throw new Error(`invalid segment length range [${opts.segMinS}, ${opts.segMaxS}]`);
  }
  const minLen = Math.ceil(opts.segMinS * opts.sampleRate);
  for (const src of sources) {
    if (src.samples.length < minLen) {
      throw new Error(
        `source "${src.label}" is shorter (${src.samples.length} samples) than one ` +
          `minimum-length segment (${minLen})`,
      );
    }
  }

  const rand = mulberry32(opts.seed);
  const pieces: { label: string; samples: Float32Array }[] = [];
  let prev = -1;
  for (let i = 0; i < opts.nSegments; i++) {
    // Draw a source different from the previous one so every join is a
    // genuine label change.
    let srcIdx = Math.floor(rand() * sources.length);
    if (sources.length > 1 && srcIdx === prev) {
      srcIdx = (srcIdx + 1 + Math.floor(rand() * (sources.length - 1))) % sources.length;
    }
    prev = srcIdx;
    const src = sources[srcIdx]!;
    const lenS = opts.segMinS + rand() * (opts.segMaxS - opts.segMinS);
    const len = Math.min(Math.max(minLen, Math.round(lenS * opts.sampleRate)), src.samples.length);
    const start = Math.floor(rand() * (src.samples.length - len + 1));
    pieces.push({ label: src.label, samples: src.samples.subarray(start, start + len) });
  }

  const total = pieces.reduce((acc, p) => acc + p.samples.length, 0);
  const samples = new Float32Array(total);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const p of pieces) {
    samples.set(p.samples, cursor);
    const startS = cursor / opts.sampleRate;
    cursor += p.samples.length;
    const endS = cursor / opts.sampleRate;
    const last = segments[segments.length - 1];
    if (last && last.label === p.label) {
      last.end_s = endS;
    } else {
      segments.push({ start_s: startS, end_s: endS, label: p.label });
    }
  }
  return { samples, segments };
}
