/**
 * K-means unit discovery over frame features, plus the centroids file that
 * freezes a trained quantizer (centroids and the exact feature config they
 * were trained under) for later tokenization runs.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { z } from "zod";
import { DEFAULT_FEATURES, type FeatureConfig } from "./dsp.js";
import { stableStringify } from "./interchange.js";
import { mulberry32 } from "./rng.js";

export interface Quantizer {
  features: FeatureConfig;
  centroids: number[][]; // k rows of dim values
}

function sqDist(a: readonly number[], b: readonly number[]): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) {
    const d = a[i]! - b[i]!;
    acc += d * d;
  }
  return acc;
}

function nearest(point: readonly number[], centroids: readonly number[][]): number {
  let best = 0;
  let bestDist = Infinity;
  for (let c = 0; c < centroids.length; c++) {
    const d = sqDist(point, centroids[c]!);
    if (d < bestDist) {
      bestDist = d;
      best = c;
    }
  }
  return best; // ties resolve to the lowest index
}

/** K-means++ seeding followed by Lloyd iterations until assignments settle. */
export function trainKmeans(
  points: number[][],
  k: number,
  seed = 0,
  maxIters = 100,
): number[][] {
  if (k < 1) throw new Error(`k must be >= 1, got ${k}`);
  if (points.length < k) {
    throw new Error(`cannot fit ${k} clusters to ${points.length} points`);
  }
  const dim = points[0]!.length;
  const rand = mulberry32(seed);

  // k-means++: first centroid uniform, then proportional to squared distance.
  const centroids: number[][] = [points[Math.floor(rand() * points.length)]!.slice()];
  const d2 = points.map((p) => sqDist(p, centroids[0]!));
  while (centroids.length < k) {
    let total = 0;
    for (const d of d2) total += d;
    let pick = points.length - 1;
    if (total > 0) {
      let r = rand() * total;
      for (let i = 0; i < points.length; i++) {
        r -= d2[i]!;
        if (r <= 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = Math.floor(rand() * points.length);
    }
    const c = points[pick]!.slice();
    centroids.push(c);
    for (let i = 0; i < points.length; i++) {
      d2[i] = Math.min(d2[i]!, sqDist(points[i]!, c));
    }
  }

  const assign = new Array<number>(points.length).fill(-1);
  for (let iter = 0; iter < maxIters; iter++) {
    let changed = false;
    for (let i = 0; i < points.length; i++) {
      const a = nearest(points[i]!, centroids);
      if (a !== assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    const sums = centroids.map(() => new Float64Array(dim));
    const counts = new Array<number>(k).fill(0);
    for (let i = 0; i < points.length; i++) {
      const a = assign[i]!;
      counts[a]!++;
      const s = sums[a]!;
      const p = points[i]!;
      for (let d = 0; d < dim; d++) s[d]! += p[d]!;
    }
    for (let c = 0; c < k; c++) {
      if (counts[c] === 0) {
        // Re-seed an empty cluster at the point farthest from its centroid.
        let far = 0;
        let farDist = -1;
        for (let i = 0; i < points.length; i++) {
          const d = sqDist(points[i]!, centroids[assign[i]!]!);
          if (d > farDist) {
            farDist = d;
            far = i;
          }
        }
        centroids[c] = points[far]!.slice();
      } else {
        const s = sums[c]!;
        centroids[c] = Array.from(s, (v) => v / counts[c]!);
      }
    }
  }
  return centroids;
}

export function quantize(points: readonly number[][], centroids: readonly number[][]): number[] {
  return points.map((p) => nearest(p, centroids));
}

// --- centroids file ---------------------------------------------------------

const featureConfigSchema = z.object({
  sampleRate: z.number().positive(),
  frameLen: z.number().int().positive(),
  hop: z.number().int().positive(),
  fftSize: z.number().int().positive(),
  nMels: z.number().int().positive(),
  fminHz: z.number().nonnegative(),
  fmaxHz: z.number().positive(),
});

export const quantizerFileSchema = z
  .object({
    k: z.number().int().min(1),
    dim: z.number().int().min(1),
    features: featureConfigSchema,
    centroids: z.array(z.array(z.number().finite())),
  })
  .refine((doc) => doc.centroids.length === doc.k, { message: "centroid count must equal k" })
  .refine((doc) => doc.centroids.every((row) => row.length === doc.dim), {
    message: "centroid rows must all have the declared dim",
  });

export function saveQuantizer(q: Quantizer, path: string): void {
  const doc = {
    k: q.centroids.length,
    dim: q.features.nMels,
    features: q.features,
    centroids: q.centroids,
  };
  writeFileSync(path, stableStringify(doc) + "\n");
}

export function loadQuantizer(path: string): Quantizer {
  const parsed = quantizerFileSchema.safeParse(JSON.parse(readFileSync(path, "utf8")));
  if (!parsed.success) {
    throw new Error(`${path}: invalid quantizer file: ${parsed.error.issues[0]?.message}`);
  }
  const doc = parsed.data;
  if (doc.dim !== doc.features.nMels) {
    throw new Error(`${path}: dim ${doc.dim} does not match feature nMels ${doc.features.nMels}`);
  }
  return { features: doc.features, centroids: doc.centroids };
}

export { DEFAULT_FEATURES };
