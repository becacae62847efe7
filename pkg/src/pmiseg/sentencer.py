"""Fixed-duration chunking of discrete token streams.

Token streams carry no punctuation, so the notion of a "sentence" is imposed
mechanically: the stream is cut into consecutive chunks of equal duration, and
the trailing remainder (if any) is kept as a final shorter chunk. Downstream
scoring and selection operate on these chunks.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TokenSequence:
    """A discrete-unit utterance at a fixed frame rate."""

    utterance_id: str
    tokens: tuple[int, ...]  # unit IDs, one per frame
    frame_rate_hz: float  # frames (tokens) per second
    vocab_size: int  # unit IDs live in [0, vocab_size)

    def __post_init__(self):
        if self.frame_rate_hz <= 0:
            raise ValueError(f"{self.utterance_id}: frame_rate_hz must be positive")
        if self.vocab_size <= 0:
            raise ValueError(f"{self.utterance_id}: vocab_size must be positive")
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for t in self.tokens:
            if not (0 <= t < self.vocab_size):
                raise ValueError(
                    f"{self.utterance_id}: token {t} outside [0, {self.vocab_size})"
                )

    @property
    def duration_s(self) -> float:
        return len(self.tokens) / self.frame_rate_hz


@dataclass(frozen=True)
class AcousticSentence:
    """One fixed-duration chunk of a parent TokenSequence.

    Spans the half-open token range [start, end); start_s/end_s are the
    corresponding times so that end_s - start_s == (end - start) / frame_rate.
    """

    parent_id: str
    start: int  # first token index, inclusive
    end: int  # last token index, exclusive
    start_s: float
    end_s: float
    tokens: tuple[int, ...] = field(repr=False)  # the token slice itself

    def __len__(self) -> int:
        return self.end - self.start


def tokens_per_sentence(sentence_len_s: float, frame_rate_hz: float) -> int:
    """Number of tokens in one full-length chunk.

    Rounds sentence_len_s * frame_rate_hz to the nearest integer, halves up
    (e.g. 0.25 s at 50 Hz -> 13 tokens).
    """
    if sentence_len_s <= 0:
        raise ValueError("sentence_len_s must be positive")
    n = int(sentence_len_s * frame_rate_hz + 0.5)
    if n < 1:
        raise ValueError(
            f"sentence_len_s={sentence_len_s} is shorter than one frame "
            f"at {frame_rate_hz} Hz"
        )
    return n


def chunk_fixed(seq: TokenSequence, sentence_len_s: float = 0.5) -> list[AcousticSentence]:
    """Cut a token sequence into fixed-duration chunks.

    Args:
        seq: the utterance to chunk.
        sentence_len_s: target chunk duration in seconds.

    Returns:
        Consecutive, non-overlapping chunks tiling the sequence exactly. All
        chunks hold tokens_per_sentence tokens except possibly the last, which
        keeps the remainder. With n tokens and p tokens per chunk there are
        ceil(n / p) chunks.

    Raises:
        ValueError: on an empty utterance or a chunk size below one frame.
    """
    n = len(seq.tokens)
    if n == 0:
        raise ValueError(f"{seq.utterance_id}: empty utterance")
    per = tokens_per_sentence(sentence_len_s, seq.frame_rate_hz)
    out = []
    for a in range(0, n, per):
        b = min(a + per, n)
        out.append(
            AcousticSentence(
                parent_id=seq.utterance_id,
                start=a,
                end=b,
                start_s=a / seq.frame_rate_hz,
                end_s=b / seq.frame_rate_hz,
                tokens=seq.tokens[a:b],
            )
        )
    return out
