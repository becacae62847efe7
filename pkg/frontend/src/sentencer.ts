/**
 * Fixed-duration chunking, kept rule-for-rule identical to the core
 * segmenter so span scores computed here line up with the chunks the core
 * derives from the same manifest.
 */

export interface ChunkBounds {
  start: number; // token index, inclusive
  end: number; // token index, exclusive
}

/** Tokens per full-length chunk; rounds half up (0.25 s at 50 Hz -> 13). */
export function tokensPerSentence(sentenceLenS: number, frameRateHz: number): number {
  if (sentenceLenS <= 0) {
    throw new Error("sentence_len_s must be positive");
  }
  const n = Math.floor(sentenceLenS * frameRateHz + 0.5);
  if (n < 1) {
    throw new Error(
      `sentence_len_s=${sentenceLenS} is shorter than one frame at ${frameRateHz} Hz`,
    );
  }
  return n;
}

/** Tile n tokens into ceil(n / per) chunks; the last keeps the remainder. */
export function chunkBounds(nTokens: number, sentenceLenS: number, frameRateHz: number): ChunkBounds[] {
  if (nTokens === 0) {
    throw new Error("empty utterance");
  }
  const per = tokensPerSentence(sentenceLenS, frameRateHz);
  const out: ChunkBounds[] = [];
  for (let a = 0; a < nTokens; a += per) {
    out.push({ start: a, end: Math.min(a + per, nTokens) });
  }
  return out;
}
