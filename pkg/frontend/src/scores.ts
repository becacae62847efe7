/**
 * Span log-probabilities for each acoustic-sentence and each adjacent pair,
 * in the external-scores interchange format the core consumes.
 *
 * Every span is scored standalone from sequence start. No end-of-sequence
 * term is added, and the header says so (eos_included: false). Spans longer
 * than the scoring model's window are an error, never a silent truncation.
 */

import { type ManifestLine, type ExternalScoresLine } from "./interchange.js";
import { loadModel, logProb, type NgramModel } from "./ngram.js";
import { chunkBounds } from "./sentencer.js";

export interface ScoreOptions {
  sentenceLenS: number;
  // Longest token span the scorer may see; 0 means unlimited. Pair spans
  // hit this first since they are roughly twice a single chunk.
  maxSpanTokens?: number;
}

export function scoreSpans(
  utt: ManifestLine,
  model: NgramModel,
  opts: ScoreOptions,
): ExternalScoresLine {
  const maxSpan = opts.maxSpanTokens ?? 0;
  const bounds = chunkBounds(utt.tokens.length, opts.sentenceLenS, utt.frame_rate_hz);
  const m = bounds.length;

  const spanOrThrow = (start: number, end: number, what: string): number[] => {
    if (maxSpan > 0 && end - start > maxSpan) {
      throw new Error(
        `${utt.utterance_id}: ${what} spans ${end - start} tokens, ` +
          `over the ${maxSpan}-token model window`,
      );
    }
    return utt.tokens.slice(start, end);
  };

  const logpSingle: number[] = [];
  for (let i = 0; i < m; i++) {
    const b = bounds[i]!;
    logpSingle.push(logProb(model, spanOrThrow(b.start, b.end, `chunk ${i}`)));
  }
  const logpPair: number[] = [];
  for (let i = 0; i < m - 1; i++) {
    logpPair.push(
      logProb(model, spanOrThrow(bounds[i]!.start, bounds[i + 1]!.end, `pair ${i}`)),
    );
  }
  return {
    utterance_id: utt.utterance_id,
    frame_rate_hz: utt.frame_rate_hz,
    sentence_len_s: opts.sentenceLenS,
    m,
    logp_single: logpSingle,
    logp_pair: logpPair,
    log_base: "e",
    eos_included: false,
  };
}

/** PMI per adjacency: log P(pair) - log P(left) - log P(right). */
export function pmiFromScores(rec: ExternalScoresLine): number[] {
  const out: number[] = [];
  for (let i = 0; i < rec.m - 1; i++) {
    out.push(rec.logp_pair[i]! - rec.logp_single[i]! - rec.logp_single[i + 1]!);
  }
  return out;
}

export { loadModel };
