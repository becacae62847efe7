"""Add-alpha smoothed n-gram language model over discrete unit streams.

Deterministic by construction: training is pure counting, probabilities are
closed-form, and the serialized form orders its keys, so identical corpora
yield byte-identical model files.

Scoring convention used everywhere in this package: natural log, and every
standalone scoring call starts from the begin-of-sequence context (the BOS
sentinel pads the left context; BOS itself is never predicted and is not part
of the vocabulary).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .sentencer import TokenSequence

BOS = -1  # reserved begin-of-sequence symbol, outside the unit vocabulary


class SchemaError(ValueError):
    """An interchange file violates its declared structure."""


@dataclass
class NgramModel:
    """Counts and smoothing for an order-n model.

    P(x | ctx) = (count(ctx, x) + alpha) / (count(ctx) + alpha * V)

    where ctx is the preceding (order - 1)-gram, BOS-padded at sequence start.
    An unseen context therefore backs off to the uniform 1/V.
    """

    order: int
    vocab_size: int
    smoothing_alpha: float
    context_counts: dict[tuple[int, ...], int] = field(default_factory=dict)
    continuation_counts: dict[tuple[int, ...], dict[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if self.smoothing_alpha <= 0:
            raise ValueError("smoothing_alpha must be positive")

    def prob(self, ctx: tuple[int, ...], token: int) -> float:
        """Smoothed conditional probability of one token."""
        c_ctx = self.context_counts.get(ctx, 0)
        c_next = self.continuation_counts.get(ctx, {}).get(token, 0)
        return (c_next + self.smoothing_alpha) / (
            c_ctx + self.smoothing_alpha * self.vocab_size
        )


def train_ngram(
    corpus: Iterable[TokenSequence], order: int, smoothing_alpha: float
) -> NgramModel:
    """Count (order-1)-gram transitions over a corpus.

    All sequences must share one vocab_size. Each sequence is scanned once
    with a BOS-padded left context; nothing is appended at the end (no EOS).
    """
    seqs = list(corpus)
    if not seqs:
        raise ValueError("empty corpus")
    vocab = seqs[0].vocab_size
    for s in seqs:
        if s.vocab_size != vocab:
            raise ValueError(
                f"mixed vocab sizes in corpus: {vocab} vs {s.vocab_size} "
                f"({s.utterance_id})"
            )
    model = NgramModel(order=order, vocab_size=vocab, smoothing_alpha=smoothing_alpha)
    pad = (BOS,) * (order - 1)
    for s in seqs:
        buf = pad + s.tokens
        for i, tok in enumerate(s.tokens):
            ctx = buf[i : i + order - 1]
            model.context_counts[ctx] = model.context_counts.get(ctx, 0) + 1
            nxt = model.continuation_counts.setdefault(ctx, {})
            nxt[tok] = nxt.get(tok, 0) + 1
    return model


def log_prob(model: NgramModel, tokens: Sequence[int]) -> float:
    """Natural-log probability of a token sequence scored from BOS.

    Raises:
        ValueError: on an empty sequence or a token outside [0, vocab_size).
    """
    if len(tokens) == 0:
        raise ValueError("cannot score an empty token sequence")
    pad = (BOS,) * (model.order - 1)
    buf = pad + tuple(tokens)
    total = 0.0
    for i, tok in enumerate(tokens):
        if not (0 <= tok < model.vocab_size):
            raise ValueError(f"token {tok} outside [0, {model.vocab_size})")
        total += math.log(model.prob(buf[i : i + model.order - 1], tok))
    return total


# --- model file -------------------------------------------------------------

def save_model(model: NgramModel, path: str) -> None:
    """Serialize deterministically (sorted keys, exact float repr)."""
    contexts = {}
    for ctx, total in model.context_counts.items():
        key = ",".join(str(c) for c in ctx)
        contexts[key] = {
            "total": total,
            "next": {str(t): c for t, c in sorted(model.continuation_counts[ctx].items())},
        }
    doc = {
        "order": model.order,
        "vocab_size": model.vocab_size,
        "smoothing_alpha": model.smoothing_alpha,
        "contexts": contexts,
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def load_model(path: str) -> NgramModel:
    with open(path) as f:
        doc = json.load(f)
    model = NgramModel(
        order=doc["order"],
        vocab_size=doc["vocab_size"],
        smoothing_alpha=doc["smoothing_alpha"],
    )
    for key, entry in doc["contexts"].items():
        ctx = tuple(int(c) for c in key.split(",")) if key else ()
        model.context_counts[ctx] = entry["total"]
        model.continuation_counts[ctx] = {int(t): c for t, c in entry["next"].items()}
    return model


# --- externally computed scores ---------------------------------------------

@dataclass(frozen=True)
class ScoreRecord:
    """Per-utterance span log-probs computed by an external model."""

    utterance_id: str
    frame_rate_hz: float
    sentence_len_s: float
    m: int  # number of chunks these arrays describe
    logp_single: tuple[float, ...]  # len m, standalone chunk log-probs
    logp_pair: tuple[float, ...]  # len m-1, adjacent-concatenation log-probs
    eos_included: bool  # whether the external scorer appended EOS


@dataclass
class ExternalScores:
    """Span scores for a set of utterances, keyed by utterance id.

    The file format is line-delimited JSON, one record per utterance, with
    log_base fixed to "e". Loading validates structure and rejects positive
    or non-finite log-probs.
    """

    records: dict[str, ScoreRecord] = field(default_factory=dict)

    def __contains__(self, utterance_id: str) -> bool:
        return utterance_id in self.records

    def __getitem__(self, utterance_id: str) -> ScoreRecord:
        return self.records[utterance_id]


def _check_logps(utt: str, name: str, values, expected_len: int) -> tuple[float, ...]:
    if not isinstance(values, list) or len(values) != expected_len:
        raise SchemaError(
            f"{utt}: {name} must hold {expected_len} values, got "
            f"{len(values) if isinstance(values, list) else type(values).__name__}"
        )
    out = []
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise SchemaError(f"{utt}: non-finite value in {name}")
        if v > 0:
            raise SchemaError(f"{utt}: {name} holds a positive log-prob ({v})")
        out.append(v)
    return tuple(out)


def load_external_scores(path: str) -> ExternalScores:
    scores = ExternalScores()
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
                m = int(rec["m"])
                if m < 1:
                    raise SchemaError(f"{utt}: m must be >= 1")
                if rec.get("log_base", "e") != "e":
                    raise SchemaError(f"{utt}: log_base must be \"e\"")
                record = ScoreRecord(
                    utterance_id=utt,
                    frame_rate_hz=float(rec["frame_rate_hz"]),
                    sentence_len_s=float(rec["sentence_len_s"]),
                    m=m,
                    logp_single=_check_logps(utt, "logp_single", rec["logp_single"], m),
                    logp_pair=_check_logps(utt, "logp_pair", rec["logp_pair"], m - 1),
                    eos_included=bool(rec.get("eos_included", False)),
                )
            except KeyError as e:
                raise SchemaError(f"{path}:{line_no}: missing field {e}") from e
            if utt in scores.records:
                raise SchemaError(f"{path}:{line_no}: duplicate utterance_id {utt}")
            scores.records[utt] = record
    return scores


def save_external_scores(scores: ExternalScores, path: str) -> None:
    """Write line-delimited records; floats keep full repr precision."""
    with open(path, "w") as f:
        for utt in sorted(scores.records):
            r = scores.records[utt]
            doc = {
                "utterance_id": r.utterance_id,
                "frame_rate_hz": r.frame_rate_hz,
                "sentence_len_s": r.sentence_len_s,
                "m": r.m,
                "logp_single": list(r.logp_single),
                "logp_pair": list(r.logp_pair),
                "log_base": "e",
                "eos_included": r.eos_included,
            }
            f.write(json.dumps(doc, sort_keys=True) + "\n")
