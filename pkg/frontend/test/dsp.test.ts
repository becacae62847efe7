import { describe, expect, it } from "vitest";

import { DEFAULT_FEATURES, frameRateHz, logMelFrames, melFilterbank } from "../src/dsp.js";
import { makeTone } from "./helpers.js";

describe("frame geometry", () => {
  it("yields 50 frames per second at the default config", () => {
    expect(frameRateHz(DEFAULT_FEATURES)).toBe(50);
    const frames = logMelFrames(makeTone([440], 5.0));
    expect(frames.length).toBe(250);
    expect(frames[0]!.length).toBe(DEFAULT_FEATURES.nMels);
  });

  it("floors at one frame for very short input", () => {
    const frames = logMelFrames(makeTone([440], 0.01)); // 160 samples < one hop
    expect(frames.length).toBe(1);
  });

  it("rejects empty audio", () => {
    expect(() => logMelFrames(new Float32Array(0))).toThrow(/empty/);
  });
});

describe("mel filterbank", () => {
  it("covers interior bins and stays nonnegative", () => {
    const bank = melFilterbank(DEFAULT_FEATURES);
    expect(bank.length).toBe(DEFAULT_FEATURES.nMels);
    const nBins = DEFAULT_FEATURES.fftSize / 2 + 1;
    const coverage = new Float64Array(nBins);
    for (const row of bank) {
      expect(row.length).toBe(nBins);
      for (let k = 0; k < nBins; k++) {
        expect(row[k]!).toBeGreaterThanOrEqual(0);
        coverage[k]! += row[k]!;
      }
    }
    // Triangles tile the passband: every bin between the first and last
    // filter peak gets some weight.
    const active: number[] = [];
    for (let k = 0; k < nBins; k++) if (coverage[k]! > 0) active.push(k);
    for (let k = active[0]!; k <= active[active.length - 1]!; k++) {
      expect(coverage[k]!).toBeGreaterThan(0);
    }
  });
});

describe("spectral selectivity", () => {
  function meanFeature(freq: number): number[] {
    const frames = logMelFrames(makeTone([freq], 0.5, 16000, 3, 0));
    const acc = new Array<number>(DEFAULT_FEATURES.nMels).fill(0);
    for (const f of frames) {
      for (let d = 0; d < acc.length; d++) acc[d]! += f[d]!;
    }
    return acc.map((v) => v / frames.length);
  }

  it("puts the energy peak in a higher band for a higher tone", () => {
    const low = meanFeature(200);
    const high = meanFeature(4000);
    const argmax = (v: number[]) => v.indexOf(Math.max(...v));
    expect(argmax(high)).toBeGreaterThan(argmax(low));
  });

  it("is deterministic for identical input", () => {
    const a = logMelFrames(makeTone([440, 880], 0.3));
    const b = logMelFrames(makeTone([440, 880], 0.3));
    expect(a).toEqual(b);
  });
});
