"""Adjacency scores between consecutive chunks.

Uniform contract for every scorer in this module: scores[i] relates chunk i
to chunk i+1, and a LOWER score means a STRONGER boundary hypothesis between
them. Span selectors rely on that ordering and nothing else.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .lm import ExternalScores, NgramModel, SchemaError, log_prob
from .sentencer import AcousticSentence


@dataclass(frozen=True)
class BoundaryScores:
    utterance_id: str
    scores: tuple[float, ...]  # len m-1; scores[i] is between chunks i and i+1
    scorer_kind: str  # "pmi" or "cosine"


def span_log_probs(
    model: NgramModel, sentences: list[AcousticSentence]
) -> tuple[list[float], list[float]]:
    """Standalone log-probs of each chunk and of each adjacent concatenation.

    Every span is scored from the BOS context, exactly like the external
    scores interchange file represents them.
    """
    singles = [log_prob(model, s.tokens) for s in sentences]
    pairs = [
        log_prob(model, sentences[i].tokens + sentences[i + 1].tokens)
        for i in range(len(sentences) - 1)
    ]
    return singles, pairs


def pmi_scores(
    provider: NgramModel | ExternalScores, sentences: list[AcousticSentence]
) -> BoundaryScores:
    """Pointwise mutual information between adjacent chunks.

    score[i] = log P(y_i + y_{i+1}) - log P(y_i) - log P(y_{i+1})

    Args:
        provider: either a trained model (spans scored here) or externally
            computed span log-probs covering this utterance.
        sentences: the utterance's chunks, in order.

    Returns:
        m-1 scores for m chunks (empty for a single-chunk utterance).

    Raises:
        ValueError: if an external provider lacks this utterance or disagrees
            on the chunk count.
    """
    if not sentences:
        raise ValueError("no sentences to score")
    utt = sentences[0].parent_id
    if isinstance(provider, ExternalScores):
        if utt not in provider:
            raise ValueError(f"external scores do not cover utterance {utt}")
        rec = provider[utt]
        if rec.m != len(sentences):
            raise ValueError(
                f"{utt}: external scores describe {rec.m} chunks, "
                f"sentencer produced {len(sentences)}"
            )
        singles, pairs = list(rec.logp_single), list(rec.logp_pair)
    else:
        singles, pairs = span_log_probs(provider, sentences)
    scores = tuple(
        pairs[i] - singles[i] - singles[i + 1] for i in range(len(sentences) - 1)
    )
    return BoundaryScores(utterance_id=utt, scores=scores, scorer_kind="pmi")


# --- embedding-based scoring --------------------------------------------------

@dataclass(frozen=True)
class EmbeddingRecord:
    utterance_id: str
    sentence_len_s: float
    dim: int
    vectors: tuple[tuple[float, ...], ...]  # m rows of dim values


@dataclass
class SentenceEmbeddings:
    """Mean-pooled chunk vectors for a set of utterances (interchange file)."""

    records: dict[str, EmbeddingRecord] = field(default_factory=dict)

    def __contains__(self, utterance_id: str) -> bool:
        return utterance_id in self.records

    def __getitem__(self, utterance_id: str) -> EmbeddingRecord:
        return self.records[utterance_id]


def load_sentence_embeddings(path: str) -> SentenceEmbeddings:
    emb = SentenceEmbeddings()
    with open(path) as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"{path}:{line_no}: not valid JSON: {e}") from e
            try:
                utt = rec["utterance_id"]
                m, dim = int(rec["m"]), int(rec["dim"])
                vectors = rec["vectors"]
            except KeyError as e:
                raise SchemaError(f"{path}:{line_no}: missing field {e}") from e
            if not isinstance(vectors, list) or len(vectors) != m:
                raise SchemaError(f"{utt}: expected {m} vectors")
            rows = []
            for row in vectors:
                if len(row) != dim:
                    raise SchemaError(f"{utt}: vector of dim {len(row)}, declared {dim}")
                row = tuple(float(v) for v in row)
                if not all(math.isfinite(v) for v in row):
                    raise SchemaError(f"{utt}: non-finite embedding value")
                rows.append(row)
            if utt in emb.records:
                raise SchemaError(f"{path}:{line_no}: duplicate utterance_id {utt}")
            emb.records[utt] = EmbeddingRecord(
                utterance_id=utt,
                sentence_len_s=float(rec["sentence_len_s"]),
                dim=dim,
                vectors=tuple(rows),
            )
    return emb


def save_sentence_embeddings(emb: SentenceEmbeddings, path: str) -> None:
    with open(path, "w") as f:
        for utt in sorted(emb.records):
            r = emb.records[utt]
            doc = {
                "utterance_id": r.utterance_id,
                "sentence_len_s": r.sentence_len_s,
                "m": len(r.vectors),
                "dim": r.dim,
                "vectors": [list(v) for v in r.vectors],
            }
            f.write(json.dumps(doc, sort_keys=True) + "\n")


def cosine_scores(record: EmbeddingRecord) -> BoundaryScores:
    """Cosine similarity between adjacent chunk vectors.

    Lower similarity = stronger boundary, so the selector contract holds
    without sign flipping.

    Raises:
        ValueError: on a zero-norm vector (cosine undefined).
    """
    scores = []
    for i in range(len(record.vectors) - 1):
        a, b = record.vectors[i], record.vectors[i + 1]
        na = math.sqrt(sum(x * x for x in a))
        nb = math.sqrt(sum(x * x for x in b))
        if na == 0.0 or nb == 0.0:
            raise ValueError(
                f"{record.utterance_id}: zero-norm embedding at chunk "
                f"{i if na == 0.0 else i + 1}"
            )
        scores.append(sum(x * y for x, y in zip(a, b)) / (na * nb))
    return BoundaryScores(
        utterance_id=record.utterance_id, scores=tuple(scores), scorer_kind="cosine"
    )
