"""Per-utterance orchestration: chunk, score, select.

The CLI stays thin; everything testable lives here. Batch runs tolerate
per-utterance failures (logged, skipped) and only report overall failure when
nothing succeeded.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .lm import ExternalScores, NgramModel
from .scorer import BoundaryScores, SentenceEmbeddings, cosine_scores, pmi_scores
from .selector import (
    Segmentation,
    SelectorConfig,
    adaptive_k,
    equal_length_segments,
    indices_to_segmentation,
    select_constant,
    select_threshold,
)
from .sentencer import TokenSequence, chunk_fixed

log = logging.getLogger("pmiseg")

SCORER_KINDS = ("pmi", "cosine")


@dataclass
class RunConfig:
    """A validated segment-run configuration.

    Scored selectors (constant/adaptive/threshold) need a score source
    matching the scorer kind: pmi takes a trained model or external span
    scores (exactly one), cosine takes sentence embeddings. Equal-length
    selectors need no scorer at all.
    """

    selector: SelectorConfig
    sentence_len_s: float = 0.5
    scorer: str = "pmi"
    model: NgramModel | None = None
    external_scores: ExternalScores | None = None
    embeddings: SentenceEmbeddings | None = None
    seed: int | None = None  # echoed into outputs; segmentation itself is deterministic
    jobs: int = 1

    def __post_init__(self):
        if self.scorer not in SCORER_KINDS:
            raise ValueError(f"unknown scorer {self.scorer!r}")
        if self.sentence_len_s <= 0:
            raise ValueError("sentence_len_s must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.selector.kind.startswith("equal_length"):
            return
        if self.scorer == "pmi":
            have = (self.model is not None) + (self.external_scores is not None)
            if have != 1:
                raise ValueError(
                    "pmi scorer requires exactly one of model / external scores"
                )
        else:
            if self.embeddings is None:
                raise ValueError("cosine scorer requires sentence embeddings")


def segment_utterance(
    seq: TokenSequence, cfg: RunConfig
) -> tuple[Segmentation, BoundaryScores | None]:
    """Run chunk -> score -> select for one utterance.

    Scored k-style selection clamps k to the chunk count (with a warning)
    so batch runs survive short files; selector primitives themselves stay
    strict.
    """
    sentences = chunk_fixed(seq, cfg.sentence_len_s)
    m = len(sentences)
    sel = cfg.selector

    if sel.kind == "equal_length_constant":
        return equal_length_segments(seq.duration_s, sel.k, seq.utterance_id), None
    if sel.kind == "equal_length_adaptive":
        k = adaptive_k(m, sel.v)
        return equal_length_segments(seq.duration_s, k, seq.utterance_id), None

    if cfg.scorer == "pmi":
        provider = cfg.model if cfg.model is not None else cfg.external_scores
        scores = pmi_scores(provider, sentences)
    else:
        if seq.utterance_id not in cfg.embeddings:
            raise ValueError(f"embeddings do not cover utterance {seq.utterance_id}")
        record = cfg.embeddings[seq.utterance_id]
        if len(record.vectors) != m:
            raise ValueError(
                f"{seq.utterance_id}: embeddings describe {len(record.vectors)} "
                f"chunks, sentencer produced {m}"
            )
        scores = cosine_scores(record)

    if sel.kind == "constant":
        k = sel.k
        if k > m:
            log.warning("%s: k=%d exceeds %d chunks, clamping", seq.utterance_id, k, m)
            k = m
        indices = select_constant(list(scores.scores), k)
    elif sel.kind == "adaptive":
        k = adaptive_k(m, sel.v)
        indices = select_constant(list(scores.scores), k)
    else:  # threshold
        indices = select_threshold(list(scores.scores), sel.t)

    return indices_to_segmentation(indices, sentences), scores


def _worker(args: tuple[TokenSequence, RunConfig]):
    seq, cfg = args
    try:
        seg, scores = segment_utterance(seq, cfg)
        return seq.utterance_id, seg, scores, None
    except Exception as e:  # per-utterance isolation for batch runs
        return seq.utterance_id, None, None, f"{type(e).__name__}: {e}"


@dataclass
class BatchResult:
    segmentations: list[Segmentation] = field(default_factory=list)
    scores: list[BoundaryScores] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)  # (utt, error)

    @property
    def all_failed(self) -> bool:
        return not self.segmentations and bool(self.failures)


def segment_batch(seqs: list[TokenSequence], cfg: RunConfig) -> BatchResult:
    """Segment every utterance, preserving input order in the outputs."""
    result = BatchResult()
    tasks = [(seq, cfg) for seq in seqs]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_worker, tasks, chunksize=8))
    else:
        rows = [_worker(t) for t in tasks]
    for utt, seg, scores, err in rows:
        if err is not None:
            log.error("%s: %s", utt, err)
            result.failures.append((utt, err))
            continue
        result.segmentations.append(seg)
        if scores is not None:
            result.scores.append(scores)
    return result
