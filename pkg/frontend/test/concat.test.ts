import { describe, expect, it } from "vitest";

import { spliceSegments, type LabeledAudio } from "../src/concat.js";
import { makeTone } from "./helpers.js";

const SR = 16000;

function sources(): LabeledAudio[] {
  return [
    { label: "low", samples: makeTone([220], 10, SR, 1) },
    { label: "high", samples: makeTone([3000], 10, SR, 2) },
  ];
}

const OPTS = { nSegments: 6, segMinS: 1.0, segMaxS: 2.0, sampleRate: SR, seed: 0 };

describe("spliceSegments", () => {
  it("tiles the output exactly with labeled segments", () => {
    const { samples, segments } = spliceSegments(sources(), OPTS);
    expect(segments[0]!.start_s).toBe(0);
    expect(segments[segments.length - 1]!.end_s).toBeCloseTo(samples.length / SR, 9);
    for (let i = 1; i < segments.length; i++) {
      expect(segments[i]!.start_s).toBeCloseTo(segments[i - 1]!.end_s, 9);
    }
  });

  it("never emits two adjacent segments with the same label", () => {
    const { segments } = spliceSegments(sources(), { ...OPTS, nSegments: 12, seed: 3 });
    for (let i = 1; i < segments.length; i++) {
      expect(segments[i]!.label).not.toBe(segments[i - 1]!.label);
    }
  });

  it("keeps segment durations inside the requested range", () => {
    const { segments } = spliceSegments(sources(), { ...OPTS, seed: 5 });
    for (const s of segments) {
      const dur = s.end_s - s.start_s;
      // Merged same-label runs can exceed segMaxS; single draws cannot
      // undershoot segMinS (up to one sample of rounding).
      expect(dur).toBeGreaterThanOrEqual(OPTS.segMinS - 1 / SR);
    }
  });

  it("is deterministic for a fixed seed", () => {
    const a = spliceSegments(sources(), OPTS);
    const b = spliceSegments(sources(), OPTS);
    expect(a.segments).toEqual(b.segments);
    expect(a.samples).toEqual(b.samples);
    const c = spliceSegments(sources(), { ...OPTS, seed: 9 });
    expect(c.segments).not.toEqual(a.segments);
  });

  it("rejects fewer than two sources and bad length ranges", () => {
    expect(() => spliceSegments([sources()[0]!], OPTS)).toThrow(/at least 2/);
    expect(() => spliceSegments(sources(), { ...OPTS, segMinS: 3, segMaxS: 2 })).toThrow(
      /invalid segment length range/,
    );
  });

  it("rejects a source shorter than one minimum-length segment", () => {
    const short: LabeledAudio[] = [
      { label: "a", samples: makeTone([220], 0.2, SR) },
      { label: "b", samples: makeTone([440], 10, SR) },
    ];
    expect(() => spliceSegments(short, OPTS)).toThrow(/shorter/);
  });
});
