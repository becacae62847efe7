/**
 * Per-sentence embeddings: frame features mean-pooled within each
 * fixed-duration chunk, in the embeddings interchange format. One vector
 * per chunk makes the cosine baseline plug-compatible with every span
 * selector downstream.
 */

import { logMelFrames, type FeatureConfig, DEFAULT_FEATURES, frameRateHz } from "./dsp.js";
import { type EmbeddingsLine } from "./interchange.js";
import { chunkBounds } from "./sentencer.js";

export function embedSentences(
  utteranceId: string,
  samples: Float32Array,
  sentenceLenS: number,
  cfg: FeatureConfig = DEFAULT_FEATURES,
): EmbeddingsLine {
  const frames = logMelFrames(samples, cfg);
  const bounds = chunkBounds(frames.length, sentenceLenS, frameRateHz(cfg));
  const vectors: number[][] = [];
  for (const b of bounds) {
    const acc = new Array<number>(cfg.nMels).fill(0);
    for (let t = b.start; t < b.end; t++) {
      const f = frames[t]!;
      for (let d = 0; d < cfg.nMels; d++) acc[d]! += f[d]!;
    }
    vectors.push(acc.map((v) => v / (b.end - b.start)));
  }
  return {
    utterance_id: utteranceId,
    sentence_len_s: sentenceLenS,
    m: vectors.length,
    dim: cfg.nMels,
    vectors,
  };
}
