"""Boundary and segment-quality metrics.

Boundary metrics (precision/recall/F1, R-Value) compare interior boundary
times under a tolerance; segment metrics (purity/coverage) compare interval
structure by duration overlap. Corpus-level numbers are means over utterances
with normal-approximation confidence intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist, mean, stdev

from .selector import Segmentation

# z for the default two-sided 90% interval, kept to the customary 4 decimals
Z_90 = 1.6449


@dataclass(frozen=True)
class LabeledInterval:
    start_s: float
    end_s: float
    label: str


@dataclass(frozen=True)
class ReferenceAnnotation:
    """Ground-truth segments for one utterance: contiguous, labeled, from 0."""

    utterance_id: str
    segments: tuple[LabeledInterval, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError(f"{self.utterance_id}: no segments")
        cursor = 0.0
        for seg in self.segments:
            if not math.isclose(seg.start_s, cursor, abs_tol=1e-9):
                raise ValueError(
                    f"{self.utterance_id}: segment starts at {seg.start_s}, "
                    f"expected {cursor}"
                )
            if seg.end_s <= seg.start_s:
                raise ValueError(f"{self.utterance_id}: empty or inverted segment")
            cursor = seg.end_s

    @property
    def duration_s(self) -> float:
        return self.segments[-1].end_s

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Interior boundary times (segment ends except the last)."""
        return tuple(seg.end_s for seg in self.segments[:-1])


def _require_sorted(name: str, times) -> list[float]:
    times = list(times)
    if any(times[i] > times[i + 1] for i in range(len(times) - 1)):
        raise ValueError(f"{name} boundary times must be sorted ascending")
    return times


def match_boundaries(ref, hyp, tol_s: float = 0.5) -> int:
    """One-to-one greedy matching; returns the number of matched pairs.

    Hypotheses are taken in increasing time order and each matches the
    earliest still-unmatched reference boundary within tol_s (inclusive).
    """
    if tol_s < 0:
        raise ValueError("tolerance must be non-negative")
    ref = _require_sorted("reference", ref)
    hyp = _require_sorted("hypothesis", hyp)
    used = [False] * len(ref)
    matched = 0
    lo = 0
    for h in hyp:
        for i in range(lo, len(ref)):
            if used[i]:
                continue
            if ref[i] > h + tol_s:
                break
            if abs(ref[i] - h) <= tol_s:
                used[i] = True
                matched += 1
                break
        while lo < len(ref) and used[lo]:
            lo += 1
    return matched


def boundary_prf(ref, hyp, tol_s: float = 0.5) -> tuple[float, float, float]:
    """Precision, recall, F1 of hypothesis boundaries against the reference.

    Empty hypothesis or reference makes the corresponding ratio 0.
    """
    ref, hyp = list(ref), list(hyp)
    matched = match_boundaries(ref, hyp, tol_s)
    precision = matched / len(hyp) if hyp else 0.0
    recall = matched / len(ref) if ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def r_value(ref, hyp, tol_s: float = 0.5) -> float:
    """R-Value: recall rewarded, over-segmentation punished (100 = perfect).

    HR = 100 * recall, OS = 100 * (|hyp| / |ref| - 1), and

        r1 = sqrt((100 - HR)^2 + OS^2)
        r2 = (-OS + HR - 100) / sqrt(2)
        R  = 100 * (1 - (|r1| + |r2|) / 200)

    Raises:
        ValueError: on an empty reference (OS undefined).
    """
    ref, hyp = list(ref), list(hyp)
    if not ref:
        raise ValueError("reference has no boundaries; over-segmentation undefined")
    matched = match_boundaries(ref, hyp, tol_s)
    hit_rate = 100.0 * matched / len(ref)
    over_seg = 100.0 * (len(hyp) / len(ref) - 1.0)
    r1 = math.sqrt((100.0 - hit_rate) ** 2 + over_seg**2)
    r2 = (-over_seg + hit_rate - 100.0) / math.sqrt(2.0)
    return 100.0 * (1.0 - (abs(r1) + abs(r2)) / 200.0)


def _overlap(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(0.0, min(a[1], b[1]) - max(a[0], b[0]))


def purity_coverage_f1(
    ref: ReferenceAnnotation, hyp: Segmentation
) -> tuple[float, float, float]:
    """Duration-weighted segment purity, coverage, and their harmonic mean.

    coverage: each reference segment credits its best-overlapping hypothesis
    segment; purity: each hypothesis segment credits its best-overlapping
    reference segment; both normalized by total duration.

    Raises:
        ValueError: if reference and hypothesis durations disagree (> 1e-6 s).
    """
    if abs(ref.duration_s - hyp.duration_s) > 1e-6:
        raise ValueError(
            f"{ref.utterance_id}: reference duration {ref.duration_s} vs "
            f"hypothesis {hyp.duration_s}"
        )
    total = ref.duration_s
    ref_ivals = [(s.start_s, s.end_s) for s in ref.segments]
    hyp_ivals = hyp.segments
    coverage = sum(max(_overlap(r, h) for h in hyp_ivals) for r in ref_ivals) / total
    purity = sum(max(_overlap(h, r) for r in ref_ivals) for h in hyp_ivals) / total
    pc_f1 = (
        2 * purity * coverage / (purity + coverage) if purity and coverage else 0.0
    )
    return purity, coverage, pc_f1


def confidence_interval(values, alpha: float = 0.9) -> tuple[float, float]:
    """Normal-approximation interval: (mean, z_{(1+alpha)/2} * sd / sqrt(n)).

    Raises:
        ValueError: with fewer than two values.
    """
    values = list(values)
    if len(values) < 2:
        raise ValueError("confidence interval needs at least 2 values")
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    z = Z_90 if alpha == 0.9 else NormalDist().inv_cdf((1 + alpha) / 2)
    return mean(values), z * stdev(values) / math.sqrt(len(values))


# --- report -------------------------------------------------------------------

@dataclass(frozen=True)
class UtteranceMetrics:
    utterance_id: str
    n_ref: int  # reference boundary count
    n_hyp: int  # hypothesis boundary count
    precision: float
    recall: float
    f1: float
    r_value: float | None  # None when the reference has no boundaries
    purity: float
    coverage: float
    pc_f1: float


@dataclass
class MetricReport:
    """Per-utterance rows plus corpus means with CI half-widths."""

    per_utterance: list[UtteranceMetrics]
    corpus: dict[str, tuple[float, float]] = field(default_factory=dict)
    alpha: float = 0.9
    tol_s: float = 0.5
    r_value_skipped: int = 0  # utterances without reference boundaries


CORPUS_METRICS = ("precision", "recall", "f1", "r_value", "purity", "coverage", "pc_f1")


def evaluate_utterance(
    ref: ReferenceAnnotation, hyp: Segmentation, tol_s: float = 0.5
) -> UtteranceMetrics:
    ref_times, hyp_times = ref.boundaries, hyp.boundaries
    precision, recall, f1 = boundary_prf(ref_times, hyp_times, tol_s)
    rv = r_value(ref_times, hyp_times, tol_s) if ref_times else None
    purity, coverage, pc_f1 = purity_coverage_f1(ref, hyp)
    return UtteranceMetrics(
        utterance_id=ref.utterance_id,
        n_ref=len(ref_times),
        n_hyp=len(hyp_times),
        precision=precision,
        recall=recall,
        f1=f1,
        r_value=rv,
        purity=purity,
        coverage=coverage,
        pc_f1=pc_f1,
    )


def aggregate_report(
    rows: list[UtteranceMetrics], alpha: float = 0.9, tol_s: float = 0.5
) -> MetricReport:
    """Corpus means with CI half-widths; R-Value skips undefined utterances."""
    report = MetricReport(per_utterance=rows, alpha=alpha, tol_s=tol_s)
    for name in CORPUS_METRICS:
        values = [
            getattr(r, name) for r in rows if getattr(r, name) is not None
        ]
        if len(values) >= 2:
            report.corpus[name] = confidence_interval(values, alpha)
        elif values:
            report.corpus[name] = (values[0], 0.0)
    report.r_value_skipped = sum(1 for r in rows if r.r_value is None)
    return report
