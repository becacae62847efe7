"""Span selection: turn adjacency scores into segment boundaries.

Selectors consume the scorer contract (lower score = stronger boundary) and
return indices into the score array; index i places a boundary between chunks
i and i+1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .sentencer import AcousticSentence

SELECTOR_KINDS = (
    "constant",
    "adaptive",
    "threshold",
    "equal_length_constant",
    "equal_length_adaptive",
)


@dataclass(frozen=True)
class SelectorConfig:
    """Which selector to run and its single parameter.

    constant / equal_length_constant need k, adaptive / equal_length_adaptive
    need v, threshold needs t. Exactly the required parameter must be set.
    """

    kind: str
    k: int | None = None
    v: int | None = None
    t: float | None = None

    def __post_init__(self):
        if self.kind not in SELECTOR_KINDS:
            raise ValueError(f"unknown selector kind {self.kind!r}")
        required = {
            "constant": "k",
            "equal_length_constant": "k",
            "adaptive": "v",
            "equal_length_adaptive": "v",
            "threshold": "t",
        }[self.kind]
        for name in ("k", "v", "t"):
            value = getattr(self, name)
            if name == required and value is None:
                raise ValueError(f"selector {self.kind} requires {name}")
            if name != required and value is not None:
                raise ValueError(f"selector {self.kind} does not take {name}")

    def describe(self) -> dict:
        out = {"kind": self.kind}
        for name in ("k", "v", "t"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out


@dataclass(frozen=True)
class Segmentation:
    """Interior boundary times for one utterance."""

    utterance_id: str
    duration_s: float
    boundaries: tuple[float, ...]  # strictly increasing, inside (0, duration)
    labels: tuple[str, ...] | None = None  # optional, one per segment

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        prev = 0.0
        for b in self.boundaries:
            if not (prev < b < self.duration_s):
                raise ValueError(
                    f"{self.utterance_id}: boundary {b} not strictly inside "
                    f"(previous {prev}, duration {self.duration_s})"
                )
            prev = b
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(self.boundaries) + 1:
                raise ValueError(
                    f"{self.utterance_id}: {len(self.labels)} labels for "
                    f"{len(self.boundaries) + 1} segments"
                )

    @property
    def segments(self) -> list[tuple[float, float]]:
        edges = (0.0, *self.boundaries, self.duration_s)
        return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def select_constant(scores: list[float], k: int) -> list[int]:
    """Indices of the k-1 smallest scores (a fixed k-segment split).

    Ties break toward the smaller index. k=1 selects nothing.

    Raises:
        ValueError: if k < 1 or k exceeds the chunk count (len(scores) + 1).
    """
    m = len(scores) + 1
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > m:
        raise ValueError(f"cannot cut {m} chunks into {k} segments")
    ranked = sorted(range(len(scores)), key=lambda i: (scores[i], i))
    return sorted(ranked[: k - 1])


def adaptive_k(m: int, v: int) -> int:
    """Duration-adaptive segment count: floor(max(0, m - 20) / v) + 4, at most m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if v < 1:
        raise ValueError(f"v must be >= 1, got {v}")
    return min(m, max(0, m - 20) // v + 4)


def select_adaptive(scores: list[float], v: int) -> list[int]:
    """Constant selection with k derived from the chunk count via adaptive_k."""
    return select_constant(scores, adaptive_k(len(scores) + 1, v))


def select_threshold(scores: list[float], t: float) -> list[int]:
    """Every index scoring strictly below t."""
    return [i for i, s in enumerate(scores) if s < t]


def equal_length_segments(
    duration_s: float, k: int, utterance_id: str = ""
) -> Segmentation:
    """Uninformed baseline: k equal segments, boundaries at i * duration / k."""
    if duration_s <= 0:
        raise ValueError(f"duration must be positive, got {duration_s}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return Segmentation(
        utterance_id=utterance_id,
        duration_s=duration_s,
        boundaries=tuple(duration_s * i / k for i in range(1, k)),
    )


def indices_to_segmentation(
    indices: list[int], sentences: list[AcousticSentence]
) -> Segmentation:
    """Boundary index i becomes the end time of chunk i."""
    m = len(sentences)
    for i in indices:
        if not (0 <= i < m - 1):
            raise ValueError(f"boundary index {i} outside [0, {m - 1})")
    return Segmentation(
        utterance_id=sentences[0].parent_id,
        duration_s=sentences[-1].end_s,
        boundaries=tuple(sentences[i].end_s for i in sorted(indices)),
    )


# --- segmentation file --------------------------------------------------------

def write_segmentations(
    segmentations: list[Segmentation], path: str, selector: dict | None = None
) -> None:
    """One JSON line per utterance; selector echo recorded on each line."""
    with open(path, "w") as f:
        for seg in segmentations:
            doc = {
                "utterance_id": seg.utterance_id,
                "duration_s": seg.duration_s,
                "boundaries": list(seg.boundaries),
            }
            if seg.labels is not None:
                doc["labels"] = list(seg.labels)
            if selector is not None:
                doc["selector"] = selector
            f.write(json.dumps(doc, sort_keys=True) + "\n")


def read_segmentations(path: str) -> dict[str, Segmentation]:
    out: dict[str, Segmentation] = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            seg = Segmentation(
                utterance_id=rec["utterance_id"],
                duration_s=rec["duration_s"],
                boundaries=tuple(rec["boundaries"]),
                labels=tuple(rec["labels"]) if "labels" in rec else None,
            )
            out[seg.utterance_id] = seg
    return out
