/**
 * Minimal RIFF/WAVE reader and writer for 16-bit PCM.
 *
 * The unit pipeline operates at 16 kHz mono. Anything else is coerced on
 * read by the callers: multichannel input is downmixed, off-rate input is
 * resampled, both with a logged warning. Unsupported encodings are errors.
 */

import { readFileSync, writeFileSync } from "node:fs";

export const TARGET_SAMPLE_RATE = 16000;

export interface WavData {
  sampleRate: number;
  samples: Float32Array; // mono, in [-1, 1]
}

export function readWav(path: string): WavData {
  const buf = readFileSync(path);
  if (buf.length < 44) {
    throw new Error(`${path}: too short to be a WAV file (${buf.length} bytes)`);
  }
  if (buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }

  let fmt: { channels: number; sampleRate: number; bitsPerSample: number } | null = null;
  let data: Buffer | null = null;

  // Walk the chunk list; chunks are word-aligned.
  let off = 12;
  while (off + 8 <= buf.length) {
    const id = buf.toString("ascii", off, off + 4);
    const size = buf.readUInt32LE(off + 4);
    const body = buf.subarray(off + 8, Math.min(off + 8 + size, buf.length));
    if (id === "fmt ") {
      const audioFormat = body.readUInt16LE(0);
      if (audioFormat !== 1) {
        throw new Error(`${path}: unsupported WAV encoding ${audioFormat} (want PCM)`);
      }
      fmt = {
        channels: body.readUInt16LE(2),
        sampleRate: body.readUInt32LE(4),
        bitsPerSample: body.readUInt16LE(14),
      };
    } else if (id === "data") {
      data = body;
    }
    off += 8 + size + (size % 2);
  }

  if (fmt === null || data === null) {
    throw new Error(`${path}: missing fmt or data chunk`);
  }
  if (fmt.bitsPerSample !== 16) {
    throw new Error(`${path}: unsupported bit depth ${fmt.bitsPerSample} (want 16)`);
  }
  if (fmt.channels < 1) {
    throw new Error(`${path}: invalid channel count ${fmt.channels}`);
  }

  const frames = Math.floor(data.length / (2 * fmt.channels));
  if (frames === 0) {
    throw new Error(`${path}: empty audio`);
  }
  const samples = new Float32Array(frames);
  for (let i = 0; i < frames; i++) {
    let acc = 0;
    for (let c = 0; c < fmt.channels; c++) {
      acc += data.readInt16LE(2 * (i * fmt.channels + c));
    }
    samples[i] = acc / fmt.channels / 32768;
  }
  if (fmt.channels > 1) {
    console.warn(`${path}: downmixed ${fmt.channels} channels to mono`);
  }
  return { sampleRate: fmt.sampleRate, samples };
}

export function writeWav(path: string, samples: Float32Array, sampleRate: number): void {
  if (samples.length === 0) {
    throw new Error("refusing to write an empty WAV file");
  }
  const dataSize = samples.length * 2;
  const buf = Buffer.alloc(44 + dataSize);
  buf.write("RIFF", 0, "ascii");
  buf.writeUInt32LE(36 + dataSize, 4);
  buf.write("WAVE", 8, "ascii");
  buf.write("fmt ", 12, "ascii");
  buf.writeUInt32LE(16, 16); // fmt chunk size
  buf.writeUInt16LE(1, 20); // PCM
  buf.writeUInt16LE(1, 22); // mono
  buf.writeUInt32LE(sampleRate, 24);
  buf.writeUInt32LE(sampleRate * 2, 28); // byte rate
  buf.writeUInt16LE(2, 32); // block align
  buf.writeUInt16LE(16, 34); // bits per sample
  buf.write("data", 36, "ascii");
  buf.writeUInt32LE(dataSize, 40);
  for (let i = 0; i < samples.length; i++) {
    // Same 1/32768 scale as the reader, so a round trip quantizes once.
    const q = Math.round(samples[i]! * 32768);
    buf.writeInt16LE(Math.max(-32768, Math.min(32767, q)), 44 + 2 * i);
  }
  writeFileSync(path, buf);
}

/** Linear-interpolation resampler; endpoints map to endpoints. */
export function resampleLinear(samples: Float32Array, from: number, to: number): Float32Array {
  if (from === to) return samples;
  const n = Math.max(1, Math.round((samples.length * to) / from));
  const out = new Float32Array(n);
  const scale = (samples.length - 1) / Math.max(1, n - 1);
  for (let i = 0; i < n; i++) {
    const x = i * scale;
    const lo = Math.floor(x);
    const hi = Math.min(lo + 1, samples.length - 1);
    const frac = x - lo;
    out[i] = samples[lo]! * (1 - frac) + samples[hi]! * frac;
  }
  return out;
}

/** Read a WAV and coerce it to 16 kHz mono, warning when coercion happens. */
export function readWavAt16k(path: string): Float32Array {
  const { sampleRate, samples } = readWav(path);
  if (sampleRate === TARGET_SAMPLE_RATE) return samples;
  console.warn(`${path}: resampling ${sampleRate} Hz to ${TARGET_SAMPLE_RATE} Hz`);
  return resampleLinear(samples, sampleRate, TARGET_SAMPLE_RATE);
}
