/**
 * Interchange file formats shared with the core segmentation toolkit.
 *
 * Everything crossing the process boundary is line-delimited JSON with
 * sorted keys: dataset manifests (token streams plus optional reference
 * segments), external span scores, and per-sentence embeddings. The zod
 * schemas mirror the validation the core applies on load, so files can be
 * checked on this side before a core run ever sees them.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { z } from "zod";

/** JSON.stringify with object keys sorted at every level. */
export function stableStringify(value: unknown): string {
  const sorted = (v: unknown): unknown => {
    if (Array.isArray(v)) return v.map(sorted);
    if (v !== null && typeof v === "object") {
      const out: Record<string, unknown> = {};
      for (const key of Object.keys(v as Record<string, unknown>).sort()) {
        out[key] = sorted((v as Record<string, unknown>)[key]);
      }
      return out;
    }
    return v;
  };
  return JSON.stringify(sorted(value));
}

export const segmentSchema = z.object({
  start_s: z.number().nonnegative(),
  end_s: z.number().positive(),
  label: z.string(),
});

export const manifestLineSchema = z
  .object({
    utterance_id: z.string().min(1),
    frame_rate_hz: z.number().positive(),
    vocab_size: z.number().int().min(1),
    tokens: z.array(z.number().int().nonnegative()).min(1),
    generator: z.string().optional(),
    seed: z.number().int().optional(),
    segments: z.array(segmentSchema).optional(),
  })
  .refine((doc) => doc.tokens.every((t) => t < doc.vocab_size), {
    message: "token outside [0, vocab_size)",
  });

export const externalScoresLineSchema = z
  .object({
    utterance_id: z.string().min(1),
    frame_rate_hz: z.number().positive(),
    sentence_len_s: z.number().positive(),
    m: z.number().int().min(1),
    logp_single: z.array(z.number().finite().nonpositive()),
    logp_pair: z.array(z.number().finite().nonpositive()),
    log_base: z.literal("e"),
    eos_included: z.boolean(),
  })
  .refine((doc) => doc.logp_single.length === doc.m, {
    message: "logp_single must hold m values",
  })
  .refine((doc) => doc.logp_pair.length === doc.m - 1, {
    message: "logp_pair must hold m-1 values",
  });

export const embeddingsLineSchema = z
  .object({
    utterance_id: z.string().min(1),
    sentence_len_s: z.number().positive(),
    m: z.number().int().min(1),
    dim: z.number().int().min(1),
    vectors: z.array(z.array(z.number().finite())),
  })
  .refine((doc) => doc.vectors.length === doc.m, { message: "expected m vectors" })
  .refine((doc) => doc.vectors.every((row) => row.length === doc.dim), {
    message: "vector rows must all have the declared dim",
  });

export type ManifestLine = z.infer<typeof manifestLineSchema>;
export type ExternalScoresLine = z.infer<typeof externalScoresLineSchema>;
export type EmbeddingsLine = z.infer<typeof embeddingsLineSchema>;
export type Segment = z.infer<typeof segmentSchema>;

export function readJsonl(path: string): unknown[] {
  const out: unknown[] = [];
  const text = readFileSync(path, "utf8");
  let lineNo = 0;
  for (const line of text.split("\n")) {
    lineNo++;
    const trimmed = line.trim();
    if (!trimmed) continue;
    try {
      out.push(JSON.parse(trimmed));
    } catch (e) {
      throw new Error(`${path}:${lineNo}: not valid JSON: ${(e as Error).message}`);
    }
  }
  return out;
}

export function writeJsonl(path: string, docs: readonly unknown[]): void {
  writeFileSync(path, docs.map((d) => stableStringify(d) + "\n").join(""));
}

/**
 * Reconcile reference segments with the duration the token grid can
 * express. Tokenization drops any sub-hop tail, so annotations made in raw
 * audio time can overhang by a fraction of a frame; the core evaluator
 * requires reference and hypothesis durations to match exactly.
 */
export function fitSegmentsToDuration(segments: readonly Segment[], durationS: number): Segment[] {
  const kept = segments.filter((s) => s.start_s < durationS).map((s) => ({ ...s }));
  if (kept.length === 0) {
    throw new Error(`no reference segment starts inside the ${durationS} s token stream`);
  }
  for (const s of kept) {
    if (s.end_s > durationS) s.end_s = durationS;
  }
  kept[kept.length - 1]!.end_s = durationS;
  return kept;
}

export function readManifest(path: string): ManifestLine[] {
  return readJsonl(path).map((doc, i) => {
    const parsed = manifestLineSchema.safeParse(doc);
    if (!parsed.success) {
      throw new Error(`${path}: record ${i + 1}: ${parsed.error.issues[0]?.message}`);
    }
    return parsed.data;
  });
}
