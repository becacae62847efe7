/**
 * Reader and scorer for the core toolkit's n-gram model files.
 *
 * Only inference lives here; training belongs to the core (`train-lm`).
 * The math matches the core exactly: add-alpha smoothed conditionals over
 * BOS-padded contexts, natural log, no end-of-sequence term. Agreement is
 * what the round-trip cross-check certifies, so keep any change here in
 * lockstep with the core scorer.
 */

import { readFileSync } from "node:fs";
import { z } from "zod";

export const BOS = -1;

const modelFileSchema = z.object({
  order: z.number().int().min(1),
  vocab_size: z.number().int().min(1),
  smoothing_alpha: z.number().positive(),
  contexts: z.record(
    z.string(),
    z.object({
      total: z.number().int().nonnegative(),
      next: z.record(z.string(), z.number().int().nonnegative()),
    }),
  ),
});

export interface NgramModel {
  order: number;
  vocabSize: number;
  alpha: number;
  contextTotals: Map<string, number>;
  continuations: Map<string, Map<number, number>>;
}

export function loadModel(path: string): NgramModel {
  const parsed = modelFileSchema.safeParse(JSON.parse(readFileSync(path, "utf8")));
  if (!parsed.success) {
    throw new Error(`${path}: invalid model file: ${parsed.error.issues[0]?.message}`);
  }
  const doc = parsed.data;
  const model: NgramModel = {
    order: doc.order,
    vocabSize: doc.vocab_size,
    alpha: doc.smoothing_alpha,
    contextTotals: new Map(),
    continuations: new Map(),
  };
  for (const [key, entry] of Object.entries(doc.contexts)) {
    model.contextTotals.set(key, entry.total);
    const next = new Map<number, number>();
    for (const [tok, count] of Object.entries(entry.next)) {
      next.set(Number(tok), count);
    }
    model.continuations.set(key, next);
  }
  return model;
}

function prob(model: NgramModel, ctxKey: string, token: number): number {
  const cCtx = model.contextTotals.get(ctxKey) ?? 0;
  const cNext = model.continuations.get(ctxKey)?.get(token) ?? 0;
  return (cNext + model.alpha) / (cCtx + model.alpha * model.vocabSize);
}

/** Natural-log probability of a token sequence scored from BOS. */
export function logProb(model: NgramModel, tokens: readonly number[]): number {
  if (tokens.length === 0) {
    throw new Error("cannot score an empty token sequence");
  }
  const ctx: number[] = new Array(model.order - 1).fill(BOS);
  let total = 0;
  for (const tok of tokens) {
    if (!Number.isInteger(tok) || tok < 0 || tok >= model.vocabSize) {
      throw new Error(`token ${tok} outside [0, ${model.vocabSize})`);
    }
    total += Math.log(prob(model, ctx.join(","), tok));
    if (model.order > 1) {
      ctx.shift();
      ctx.push(tok);
    }
  }
  return total;
}
