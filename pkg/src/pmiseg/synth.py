"""Synthetic benchmarks with known style boundaries.

Three generators produce (token stream, reference segmentation) pairs:

* emotion-change: one speaker per file, utterances concatenated across that
  speaker's emotions (token-level analogue of concatenative datasets built
  from a labeled pool).
* gender-change: two speakers of opposite gender sharing an emotion,
  strictly alternating.
* markov: files sampled from per-style Markov sources over disjoint token
  subsets, switching source at segment joins without restarting the chain,
  so that equal-matrix styles leave no statistical trace at the joins. Also
  emits a disjoint corpus for LM training.

Everything is a pure function of (inputs, seed): file i draws from its own
RNG stream derived from (seed, stream_tag, i), so datasets are reproducible
file by file and across worker counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .metrics import LabeledInterval, ReferenceAnnotation
from .sentencer import TokenSequence

# RNG stream tags (entropy tuples must differ between uses of one seed)
_STYLES = 0
_FILES = 1
_CORPUS = 2


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng((seed, *tags))


# --- labeled pools -------------------------------------------------------------

GENDERS = ("female", "male")


@dataclass(frozen=True)
class PoolUtterance:
    seq: TokenSequence
    speaker_id: str
    gender: str  # "male" or "female"
    emotion: str


@dataclass
class LabeledPool:
    """Utterances indexable by (speaker, emotion)."""

    utterances: list[PoolUtterance]

    def __post_init__(self):
        if not self.utterances:
            raise ValueError("empty pool")
        fr = self.utterances[0].seq.frame_rate_hz
        vs = self.utterances[0].seq.vocab_size
        for u in self.utterances:
            if u.seq.frame_rate_hz != fr or u.seq.vocab_size != vs:
                raise ValueError(
                    f"pool utterance {u.seq.utterance_id} disagrees on frame "
                    f"rate or vocab size"
                )
            if u.gender not in GENDERS:
                raise ValueError(
                    f"pool utterance {u.seq.utterance_id}: gender must be one "
                    f"of {GENDERS}, got {u.gender!r}"
                )

    @property
    def frame_rate_hz(self) -> float:
        return self.utterances[0].seq.frame_rate_hz

    @property
    def vocab_size(self) -> int:
        return self.utterances[0].seq.vocab_size

    def cells(self) -> dict[tuple[str, str], list[PoolUtterance]]:
        out: dict[tuple[str, str], list[PoolUtterance]] = {}
        for u in self.utterances:
            out.setdefault((u.speaker_id, u.emotion), []).append(u)
        return out

    def speakers(self) -> dict[str, dict[str, list[PoolUtterance]]]:
        out: dict[str, dict[str, list[PoolUtterance]]] = {}
        for u in self.utterances:
            out.setdefault(u.speaker_id, {}).setdefault(u.emotion, []).append(u)
        return out


def load_pool(path: str) -> LabeledPool:
    utts = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            utts.append(
                PoolUtterance(
                    seq=TokenSequence(
                        utterance_id=rec["utterance_id"],
                        tokens=tuple(rec["tokens"]),
                        frame_rate_hz=rec["frame_rate_hz"],
                        vocab_size=rec["vocab_size"],
                    ),
                    speaker_id=rec["speaker_id"],
                    gender=rec["gender"],
                    emotion=rec["emotion"],
                )
            )
    return LabeledPool(utterances=utts)


def save_pool(pool: LabeledPool, path: str) -> None:
    with open(path, "w") as f:
        for u in pool.utterances:
            doc = {
                "utterance_id": u.seq.utterance_id,
                "frame_rate_hz": u.seq.frame_rate_hz,
                "vocab_size": u.seq.vocab_size,
                "tokens": list(u.seq.tokens),
                "speaker_id": u.speaker_id,
                "gender": u.gender,
                "emotion": u.emotion,
            }
            f.write(json.dumps(doc, sort_keys=True) + "\n")


# --- dataset container ----------------------------------------------------------

@dataclass
class SynthDataset:
    files: list[tuple[TokenSequence, ReferenceAnnotation]]
    generator: str
    seed: int
    config: dict = field(default_factory=dict)


def _merge_adjacent(parts: list[tuple[int, int, str]], keep_raw_joins: bool):
    """Collapse adjacent same-label token ranges unless raw joins are kept."""
    if keep_raw_joins:
        return list(parts)
    merged: list[tuple[int, int, str]] = []
    for start, end, label in parts:
        if merged and merged[-1][2] == label:
            merged[-1] = (merged[-1][0], end, label)
        else:
            merged.append((start, end, label))
    return merged


def _annotate(
    utterance_id: str,
    parts: list[tuple[int, int, str]],
    frame_rate_hz: float,
) -> ReferenceAnnotation:
    segments = tuple(
        LabeledInterval(start / frame_rate_hz, end / frame_rate_hz, label)
        for start, end, label in parts
    )
    return ReferenceAnnotation(utterance_id=utterance_id, segments=segments)


def _segment_count(rng: np.random.Generator, seg_range: tuple[int, int]) -> int:
    lo, hi = seg_range
    if not (1 <= lo <= hi):
        raise ValueError(f"invalid seg_range {seg_range}")
    return int(rng.integers(lo, hi + 1))  # inclusive on both ends


# --- emotion change -------------------------------------------------------------

def synth_emotion_change(
    pool: LabeledPool,
    n_files: int,
    seg_range: tuple[int, int] = (4, 30),
    rng_seed: int = 0,
    keep_raw_joins: bool = False,
) -> SynthDataset:
    """One speaker per file; segments drawn across that speaker's emotions.

    Adjacent same-emotion segments merge in the reference by default (a join
    between same-label utterances is not a style change); keep_raw_joins
    retains every concatenation point instead.

    Raises:
        ValueError: if no speaker has utterances under at least two emotions.
    """
    speakers = pool.speakers()
    eligible = sorted(s for s, emos in speakers.items() if len(emos) >= 2)
    if not eligible:
        detail = ", ".join(
            f"{s}: {sorted(emos)}" for s, emos in sorted(speakers.items())
        )
        raise ValueError(
            f"pool too small: no speaker has >= 2 emotions ({detail})"
        )
    files = []
    for i in range(n_files):
        rng = _rng(rng_seed, _FILES, i)
        speaker = eligible[int(rng.integers(len(eligible)))]
        emotions = sorted(speakers[speaker])
        n_segs = _segment_count(rng, seg_range)
        tokens: list[int] = []
        parts: list[tuple[int, int, str]] = []
        for _ in range(n_segs):
            emotion = emotions[int(rng.integers(len(emotions)))]
            cell = speakers[speaker][emotion]
            utt = cell[int(rng.integers(len(cell)))]
            parts.append((len(tokens), len(tokens) + len(utt.seq.tokens), emotion))
            tokens.extend(utt.seq.tokens)
        utt_id = f"emotion_{i:05d}"
        seq = TokenSequence(
            utterance_id=utt_id,
            tokens=tuple(tokens),
            frame_rate_hz=pool.frame_rate_hz,
            vocab_size=pool.vocab_size,
        )
        ref = _annotate(
            utt_id, _merge_adjacent(parts, keep_raw_joins), pool.frame_rate_hz
        )
        files.append((seq, ref))
    return SynthDataset(
        files=files,
        generator="emotion-change",
        seed=rng_seed,
        config={"seg_range": list(seg_range), "keep_raw_joins": keep_raw_joins},
    )


# --- gender change --------------------------------------------------------------

def synth_gender_change(
    pool: LabeledPool,
    n_files: int,
    seg_range: tuple[int, int] = (4, 30),
    rng_seed: int = 0,
) -> SynthDataset:
    """Two speakers of opposite gender alternate segments under one emotion.

    Even-indexed files start with the male speaker, odd-indexed with the
    female one, so starts are balanced to within one file. Labels are genders
    and strictly alternate, so no merging applies.

    Raises:
        ValueError: if no male/female speaker pair shares an emotion.
    """
    speakers = pool.speakers()
    gender_of = {u.speaker_id: u.gender for u in pool.utterances}
    combos = []
    for male in sorted(s for s, g in gender_of.items() if g == "male"):
        for female in sorted(s for s, g in gender_of.items() if g == "female"):
            for emotion in sorted(set(speakers[male]) & set(speakers[female])):
                combos.append((male, female, emotion))
    if not combos:
        raise ValueError(
            "pool too small: no male/female speaker pair shares an emotion"
        )
    files = []
    for i in range(n_files):
        rng = _rng(rng_seed, _FILES, i)
        male, female, emotion = combos[int(rng.integers(len(combos)))]
        n_segs = _segment_count(rng, seg_range)
        male_first = i % 2 == 0
        tokens: list[int] = []
        parts: list[tuple[int, int, str]] = []
        for j in range(n_segs):
            male_turn = male_first == (j % 2 == 0)
            speaker = male if male_turn else female
            cell = speakers[speaker][emotion]
            utt = cell[int(rng.integers(len(cell)))]
            parts.append(
                (len(tokens), len(tokens) + len(utt.seq.tokens), gender_of[speaker])
            )
            tokens.extend(utt.seq.tokens)
        utt_id = f"gender_{i:05d}"
        seq = TokenSequence(
            utterance_id=utt_id,
            tokens=tuple(tokens),
            frame_rate_hz=pool.frame_rate_hz,
            vocab_size=pool.vocab_size,
        )
        ref = _annotate(utt_id, parts, pool.frame_rate_hz)
        files.append((seq, ref))
    return SynthDataset(
        files=files,
        generator="gender-change",
        seed=rng_seed,
        config={"seg_range": list(seg_range)},
    )


# --- markov style sources ---------------------------------------------------------

@dataclass(eq=False)
class StyleSource:
    """A Markov chain over the shared vocabulary, confined to its own subset.

    transition[r] is the next-token distribution after token r; every row is
    supported on the style's token subset, so a style can continue a chain
    from any current token (including one outside its subset).
    """

    style_id: str
    subset: tuple[int, ...]  # tokens this style emits
    transition: np.ndarray  # (V, V), rows sum to 1
    initial: np.ndarray  # (V,), sums to 1

    def __post_init__(self):
        rows = self.transition.sum(axis=1)
        if not np.allclose(rows, 1.0, atol=1e-9):
            raise ValueError(f"{self.style_id}: transition rows must sum to 1")
        if not np.isclose(self.initial.sum(), 1.0, atol=1e-9):
            raise ValueError(f"{self.style_id}: initial must sum to 1")
        # precomputed inverse-CDF tables; renormalized so u < 1 always lands
        cum = np.cumsum(self.transition, axis=1)
        self._cum = cum / cum[:, -1:]
        ci = np.cumsum(self.initial)
        self._cum_init = ci / ci[-1]

    def sample(
        self, rng: np.random.Generator, n: int, state: int | None = None
    ) -> list[int]:
        """Draw n tokens, continuing from state if given (else from initial)."""
        out = []
        for _ in range(n):
            if state is None:
                state = int(np.searchsorted(self._cum_init, rng.random(), side="right"))
            else:
                state = int(np.searchsorted(self._cum[state], rng.random(), side="right"))
            out.append(state)
        return out


def _draw_styles(
    rng: np.random.Generator,
    n_styles: int,
    vocab_size: int,
    identical_styles: bool,
    concentration: float = 0.2,
) -> list[StyleSource]:
    """Dirichlet-row Markov sources over disjoint, evenly split token subsets."""
    if n_styles < 1 or vocab_size < n_styles:
        raise ValueError(
            f"need vocab_size >= n_styles >= 1, got V={vocab_size}, K={n_styles}"
        )
    perm = rng.permutation(vocab_size)
    base, extra = divmod(vocab_size, n_styles)
    subsets, at = [], 0
    for j in range(n_styles):
        size = base + (1 if j < extra else 0)
        subsets.append(tuple(sorted(int(t) for t in perm[at : at + size])))
        at += size

    def build(subset: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        trans = np.zeros((vocab_size, vocab_size))
        alphas = np.full(len(subset), concentration)
        for r in range(vocab_size):
            trans[r, list(subset)] = rng.dirichlet(alphas)
        init = np.zeros(vocab_size)
        init[list(subset)] = 1.0 / len(subset)
        return trans, init

    styles = []
    if identical_styles:
        trans, init = build(subsets[0])
        for j in range(n_styles):
            styles.append(
                StyleSource(
                    style_id=f"style_{j}",
                    subset=subsets[0],
                    transition=trans,
                    initial=init,
                )
            )
    else:
        for j in range(n_styles):
            trans, init = build(subsets[j])
            styles.append(
                StyleSource(
                    style_id=f"style_{j}",
                    subset=subsets[j],
                    transition=trans,
                    initial=init,
                )
            )
    return styles


def _markov_file(
    rng: np.random.Generator,
    styles: list[StyleSource],
    frame_rate_hz: float,
    seg_range: tuple[int, int],
    seg_len_range_s: tuple[float, float],
    seg_len_step_s: float | None,
) -> tuple[list[int], list[tuple[int, int, str]]]:
    lo, hi = seg_len_range_s
    if not (0 < lo <= hi):
        raise ValueError(f"invalid seg_len_range_s {seg_len_range_s}")
    n_segs = _segment_count(rng, seg_range)
    tokens: list[int] = []
    parts: list[tuple[int, int, str]] = []
    state: int | None = None
    for _ in range(n_segs):
        style = styles[int(rng.integers(len(styles)))]
        if seg_len_step_s is None:
            length_s = float(rng.uniform(lo, hi))
        else:
            n_choices = int((hi - lo) / seg_len_step_s + 1e-9) + 1
            length_s = lo + seg_len_step_s * int(rng.integers(n_choices))
        n_tok = max(1, int(length_s * frame_rate_hz + 0.5))
        seg = style.sample(rng, n_tok, state)
        parts.append((len(tokens), len(tokens) + n_tok, style.style_id))
        tokens.extend(seg)
        state = seg[-1]
    return tokens, parts


def synth_markov(
    n_styles: int,
    vocab_size: int,
    seg_len_range_s: tuple[float, float] = (2.0, 6.0),
    seg_range: tuple[int, int] = (4, 30),
    frame_rate_hz: float = 50.0,
    n_files: int = 100,
    n_corpus_tokens: int = 100_000,
    rng_seed: int = 0,
    identical_styles: bool = False,
    seg_len_step_s: float | None = None,
) -> tuple[SynthDataset, list[TokenSequence]]:
    """Markov-source benchmark plus a disjoint LM-training corpus.

    Each file concatenates segments from randomly chosen styles; the chain
    state carries across joins (only the transition matrix switches), so with
    identical_styles=True the joins are invisible by construction. Segment
    lengths are uniform in seg_len_range_s, optionally quantized to multiples
    of seg_len_step_s above the lower end. Adjacent same-style segments merge
    in the reference. The corpus is drawn from the same sources and segment
    process on separate RNG streams and stops at the first file crossing
    n_corpus_tokens.
    """
    styles = _draw_styles(_rng(rng_seed, _STYLES), n_styles, vocab_size, identical_styles)
    files = []
    for i in range(n_files):
        rng = _rng(rng_seed, _FILES, i)
        tokens, parts = _markov_file(
            rng, styles, frame_rate_hz, seg_range, seg_len_range_s, seg_len_step_s
        )
        utt_id = f"markov_{i:05d}"
        seq = TokenSequence(
            utterance_id=utt_id,
            tokens=tuple(tokens),
            frame_rate_hz=frame_rate_hz,
            vocab_size=vocab_size,
        )
        ref = _annotate(utt_id, _merge_adjacent(parts, False), frame_rate_hz)
        files.append((seq, ref))

    corpus: list[TokenSequence] = []
    total = 0
    j = 0
    while total < n_corpus_tokens:
        rng = _rng(rng_seed, _CORPUS, j)
        tokens, _ = _markov_file(
            rng, styles, frame_rate_hz, seg_range, seg_len_range_s, seg_len_step_s
        )
        corpus.append(
            TokenSequence(
                utterance_id=f"corpus_{j:05d}",
                tokens=tuple(tokens),
                frame_rate_hz=frame_rate_hz,
                vocab_size=vocab_size,
            )
        )
        total += len(tokens)
        j += 1

    dataset = SynthDataset(
        files=files,
        generator="markov",
        seed=rng_seed,
        config={
            "n_styles": n_styles,
            "vocab_size": vocab_size,
            "seg_len_range_s": list(seg_len_range_s),
            "seg_range": list(seg_range),
            "frame_rate_hz": frame_rate_hz,
            "n_corpus_tokens": n_corpus_tokens,
            "identical_styles": identical_styles,
            "seg_len_step_s": seg_len_step_s,
        },
    )
    return dataset, corpus


# --- manifest file ---------------------------------------------------------------

def write_manifest(
    files: list[tuple[TokenSequence, ReferenceAnnotation | None]],
    path: str,
    generator: str,
    seed: int,
) -> None:
    """Line-delimited dataset manifest; corpus files carry no segments."""
    with open(path, "w") as f:
        for seq, ref in files:
            doc = {
                "utterance_id": seq.utterance_id,
                "frame_rate_hz": seq.frame_rate_hz,
                "vocab_size": seq.vocab_size,
                "tokens": list(seq.tokens),
                "generator": generator,
                "seed": seed,
            }
            if ref is not None:
                doc["segments"] = [
                    {"start_s": s.start_s, "end_s": s.end_s, "label": s.label}
                    for s in ref.segments
                ]
            f.write(json.dumps(doc, sort_keys=True) + "\n")


def read_manifest(path: str) -> list[tuple[TokenSequence, ReferenceAnnotation | None]]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            seq = TokenSequence(
                utterance_id=rec["utterance_id"],
                tokens=tuple(rec["tokens"]),
                frame_rate_hz=rec["frame_rate_hz"],
                vocab_size=rec["vocab_size"],
            )
            ref = None
            if "segments" in rec:
                ref = ReferenceAnnotation(
                    utterance_id=seq.utterance_id,
                    segments=tuple(
                        LabeledInterval(s["start_s"], s["end_s"], s["label"])
                        for s in rec["segments"]
                    ),
                )
            out.append((seq, ref))
    return out
