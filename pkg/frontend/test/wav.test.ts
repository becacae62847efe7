import { describe, expect, it, vi } from "vitest";
import { join } from "node:path";
import { writeFileSync } from "node:fs";

import { readWav, readWavAt16k, resampleLinear, writeWav } from "../src/wav.js";
import { makeTone, tempDir } from "./helpers.js";

function wavHeader(dataSize: number, sampleRate: number, channels: number, bits: number): Buffer {
  const buf = Buffer.alloc(44 + dataSize);
  buf.write("RIFF", 0, "ascii");
  buf.writeUInt32LE(36 + dataSize, 4);
  buf.write("WAVE", 8, "ascii");
  buf.write("fmt ", 12, "ascii");
  buf.writeUInt32LE(16, 16);
  buf.writeUInt16LE(1, 20);
  buf.writeUInt16LE(channels, 22);
  buf.writeUInt32LE(sampleRate, 24);
  buf.writeUInt32LE((sampleRate * channels * bits) / 8, 28);
  buf.writeUInt16LE((channels * bits) / 8, 32);
  buf.writeUInt16LE(bits, 34);
  buf.write("data", 36, "ascii");
  buf.writeUInt32LE(dataSize, 40);
  return buf;
}

describe("wav round trip", () => {
  it("preserves samples within 16-bit quantization error", () => {
    const dir = tempDir("wav");
    const path = join(dir, "tone.wav");
    const original = makeTone([440], 0.25);
    writeWav(path, original, 16000);
    const { sampleRate, samples } = readWav(path);
    expect(sampleRate).toBe(16000);
    expect(samples.length).toBe(original.length);
    for (let i = 0; i < samples.length; i += 97) {
      expect(Math.abs(samples[i]! - original[i]!)).toBeLessThan(1 / 32767);
    }
  });

  it("rejects empty audio on write and on read", () => {
    const dir = tempDir("wav");
    expect(() => writeWav(join(dir, "x.wav"), new Float32Array(0), 16000)).toThrow(/empty/);
    const path = join(dir, "empty.wav");
    writeFileSync(path, wavHeader(0, 16000, 1, 16));
    expect(() => readWav(path)).toThrow(/empty audio/);
  });

  it("rejects non-WAV and non-PCM input", () => {
    const dir = tempDir("wav");
    const junk = join(dir, "junk.wav");
    writeFileSync(junk, Buffer.from("definitely not a riff file, not even close to one".padEnd(64, ".")));
    expect(() => readWav(junk)).toThrow(/not a RIFF/);
    const tiny = join(dir, "tiny.wav");
    writeFileSync(tiny, Buffer.from("RIFF"));
    expect(() => readWav(tiny)).toThrow(/too short/);

    const floatWav = join(dir, "float.wav");
    const buf = wavHeader(8, 16000, 1, 32);
    buf.writeUInt16LE(3, 20); // IEEE float encoding
    writeFileSync(floatWav, buf);
    expect(() => readWav(floatWav)).toThrow(/unsupported WAV encoding/);
  });

  it("downmixes stereo with a warning", () => {
    const dir = tempDir("wav");
    const path = join(dir, "stereo.wav");
    const n = 800;
    const buf = wavHeader(n * 4, 16000, 2, 16);
    for (let i = 0; i < n; i++) {
      buf.writeInt16LE(1000, 44 + 4 * i); // left
      buf.writeInt16LE(3000, 44 + 4 * i + 2); // right
    }
    writeFileSync(path, buf);
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const { samples } = readWav(path);
    expect(warn).toHaveBeenCalledWith(expect.stringContaining("downmixed"));
    warn.mockRestore();
    expect(samples.length).toBe(n);
    expect(samples[0]).toBeCloseTo(2000 / 32768, 6);
  });
});

describe("resampling", () => {
  it("scales length by the rate ratio and keeps endpoints", () => {
    const input = Float32Array.from({ length: 100 }, (_, i) => i / 99);
    const out = resampleLinear(input, 8000, 16000);
    expect(out.length).toBe(200);
    expect(out[0]).toBeCloseTo(0, 6);
    expect(out[out.length - 1]).toBeCloseTo(1, 6);
    // Linear input stays linear under linear interpolation.
    expect(out[100]).toBeCloseTo(100 / 199, 6);
    for (let i = 1; i < out.length; i++) {
      expect(out[i]!).toBeGreaterThanOrEqual(out[i - 1]!);
    }
  });

  it("readWavAt16k resamples off-rate files with a warning", () => {
    const dir = tempDir("wav");
    const path = join(dir, "8k.wav");
    writeWav(path, makeTone([200], 0.5, 8000), 8000);
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const samples = readWavAt16k(path);
    expect(warn).toHaveBeenCalledWith(expect.stringContaining("resampling"));
    warn.mockRestore();
    expect(samples.length).toBe(16000 / 2);
  });

  it("is the identity at matching rates", () => {
    const input = makeTone([100], 0.1);
    expect(resampleLinear(input, 16000, 16000)).toBe(input);
  });
});
