"""Command-line driver: train-lm, segment, evaluate, sweep, synth.

Batch-only by design (no service mode). All randomness flows from --seed;
outputs are byte-stable across reruns. Log level comes from PMISEG_LOG.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys

from . import lm as lm_mod
from . import metrics as metrics_mod
from . import scorer as scorer_mod
from . import selector as selector_mod
from . import synth as synth_mod
from .pipeline import RunConfig, segment_batch
from .scorer import pmi_scores
from .selector import SelectorConfig, adaptive_k, select_constant, select_threshold
from .sentencer import chunk_fixed

log = logging.getLogger("pmiseg")

SELECTOR_FLAGS = {
    "C": "constant",
    "A": "adaptive",
    "T": "threshold",
    "EL-C": "equal_length_constant",
    "EL-A": "equal_length_adaptive",
}

DEFAULT_K_GRID = (10, 15, 20)
DEFAULT_V_GRID = (5, 10, 15, 20)
DEFAULT_T_GRID = (-5.0, -8.0, -10.0, -12.5, -15.0)
DEFAULT_LEN_GRID = (0.25, 0.5, 1.0, 2.0)

CSV_METRIC_COLUMNS = [
    f"{name}_{part}"
    for name in metrics_mod.CORPUS_METRICS
    for part in ("mean", "half_width")
]


def _configure_logging() -> None:
    level = os.environ.get("PMISEG_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _build_selector(args) -> SelectorConfig:
    kind = SELECTOR_FLAGS[args.selector]
    if kind in ("constant", "equal_length_constant"):
        if args.k is None:
            raise ValueError(f"selector {args.selector} requires --k")
        return SelectorConfig(kind=kind, k=args.k)
    if kind in ("adaptive", "equal_length_adaptive"):
        if args.v is None:
            raise ValueError(f"selector {args.selector} requires --v")
        return SelectorConfig(kind=kind, v=args.v)
    if args.t is None:
        raise ValueError("selector T requires --t")
    return SelectorConfig(kind=kind, t=args.t)


def _load_refs(path: str):
    """Manifest records that carry reference segments, keyed by utterance."""
    refs = {}
    seqs = {}
    for seq, ref in synth_mod.read_manifest(path):
        seqs[seq.utterance_id] = seq
        if ref is not None:
            refs[seq.utterance_id] = ref
    return seqs, refs


# --- subcommands ---------------------------------------------------------------

def cmd_train_lm(args) -> int:
    files = synth_mod.read_manifest(args.manifest)
    seqs = [seq for seq, _ in files]
    model = lm_mod.train_ngram(seqs, order=args.order, smoothing_alpha=args.alpha)
    lm_mod.save_model(model, args.out)
    log.info("trained order-%d model on %d sequences -> %s", args.order, len(seqs), args.out)
    return 0


def cmd_segment(args) -> int:
    selector = _build_selector(args)
    model = lm_mod.load_model(args.model) if args.model else None
    external = (
        lm_mod.load_external_scores(args.external_scores)
        if args.external_scores
        else None
    )
    embeddings = (
        scorer_mod.load_sentence_embeddings(args.embeddings)
        if args.embeddings
        else None
    )
    cfg = RunConfig(
        selector=selector,
        sentence_len_s=args.sentence_len,
        scorer=args.scorer,
        model=model,
        external_scores=external,
        embeddings=embeddings,
        seed=args.seed,
        jobs=args.jobs,
    )
    seqs = [seq for seq, _ in synth_mod.read_manifest(args.manifest)]
    result = segment_batch(seqs, cfg)
    echo = selector.describe()
    echo["scorer"] = args.scorer
    echo["sentence_len_s"] = args.sentence_len
    if args.seed is not None:
        echo["seed"] = args.seed
    selector_mod.write_segmentations(result.segmentations, args.out, selector=echo)
    if args.dump_scores:
        with open(args.dump_scores, "w") as f:
            for s in result.scores:
                doc = {
                    "utterance_id": s.utterance_id,
                    "scorer": s.scorer_kind,
                    "scores": list(s.scores),
                }
                f.write(json.dumps(doc, sort_keys=True) + "\n")
    for utt, err in result.failures:
        log.warning("skipped %s: %s", utt, err)
    if result.all_failed:
        log.error("all %d utterances failed", len(result.failures))
        return 1
    return 0


def _report_doc(report: metrics_mod.MetricReport) -> dict:
    return {
        "tol_s": report.tol_s,
        "alpha": report.alpha,
        "n_utterances": len(report.per_utterance),
        "r_value_skipped": report.r_value_skipped,
        "corpus": {
            name: {"mean": mean, "half_width": hw}
            for name, (mean, hw) in sorted(report.corpus.items())
        },
        "per_utterance": [
            {
                "utterance_id": r.utterance_id,
                "n_ref": r.n_ref,
                "n_hyp": r.n_hyp,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
                "r_value": r.r_value,
                "purity": r.purity,
                "coverage": r.coverage,
                "pc_f1": r.pc_f1,
            }
            for r in report.per_utterance
        ],
    }


def _metric_cells(report: metrics_mod.MetricReport) -> list:
    cells = []
    for name in metrics_mod.CORPUS_METRICS:
        mean, hw = report.corpus.get(name, ("", ""))
        cells.extend([mean, hw])
    return cells


def cmd_evaluate(args) -> int:
    _, refs = _load_refs(args.ref)
    if not refs:
        raise ValueError(f"{args.ref}: no utterance carries reference segments")
    hyps = selector_mod.read_segmentations(args.hyp)
    rows = []
    for utt in sorted(refs):
        if utt not in hyps:
            raise ValueError(f"hypothesis file lacks utterance {utt}")
        rows.append(metrics_mod.evaluate_utterance(refs[utt], hyps[utt], args.tol))
    for utt in sorted(set(hyps) - set(refs)):
        log.warning("hypothesis utterance %s not in reference; ignored", utt)
    report = metrics_mod.aggregate_report(rows, alpha=args.alpha, tol_s=args.tol)
    with open(args.out, "w") as f:
        json.dump(_report_doc(report), f, sort_keys=True, indent=1)
        f.write("\n")
    if args.csv:
        with open(args.hyp) as f:
            first = json.loads(f.readline())
        echo = first.get("selector", {})
        with open(args.csv, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(
                ["selector", "k", "v", "t", "scorer", "sentence_len_s", "n",
                 "r_value_skipped", *CSV_METRIC_COLUMNS]
            )
            writer.writerow(
                [
                    echo.get("kind", ""),
                    echo.get("k", ""),
                    echo.get("v", ""),
                    echo.get("t", ""),
                    echo.get("scorer", ""),
                    echo.get("sentence_len_s", ""),
                    len(rows),
                    report.r_value_skipped,
                    *_metric_cells(report),
                ]
            )
    log.info("evaluated %d utterances -> %s", len(rows), args.out)
    return 0


def _parse_grid(text: str | None, default: tuple, cast) -> list:
    if text is None:
        return list(default)
    values = [cast(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("empty grid")
    return values


def cmd_sweep(args) -> int:
    model = lm_mod.load_model(args.model)
    seqs, refs = _load_refs(args.manifest)
    if not refs:
        raise ValueError(f"{args.manifest}: no utterance carries reference segments")
    k_grid = _parse_grid(args.k_grid, DEFAULT_K_GRID, int)
    v_grid = _parse_grid(args.v_grid, DEFAULT_V_GRID, int)
    t_grid = _parse_grid(args.t_grid, DEFAULT_T_GRID, float)
    len_grid = _parse_grid(args.sentence_len_grid, DEFAULT_LEN_GRID, float)

    out_rows = []
    for sentence_len in len_grid:
        scored = {}
        for utt in sorted(refs):
            sentences = chunk_fixed(seqs[utt], sentence_len)
            scored[utt] = (sentences, list(pmi_scores(model, sentences).scores))
        configs = (
            [("C", "k", k) for k in k_grid]
            + [("A", "v", v) for v in v_grid]
            + [("T", "t", t) for t in t_grid]
        )
        for flag, pname, pval in configs:
            rows = []
            for utt in sorted(refs):
                sentences, scores = scored[utt]
                m = len(sentences)
                if flag == "C":
                    indices = select_constant(scores, min(pval, m))
                elif flag == "A":
                    indices = select_constant(scores, adaptive_k(m, pval))
                else:
                    indices = select_threshold(scores, pval)
                seg = selector_mod.indices_to_segmentation(indices, sentences)
                rows.append(metrics_mod.evaluate_utterance(refs[utt], seg, args.tol))
            report = metrics_mod.aggregate_report(rows, alpha=args.alpha, tol_s=args.tol)
            out_rows.append(
                {
                    "sentence_len_s": sentence_len,
                    "selector": flag,
                    "param": pval,
                    "n": len(rows),
                    "r_value_skipped": report.r_value_skipped,
                    "report": report,
                }
            )

    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["sentence_len_s", "selector", "param", "n", "r_value_skipped",
             *CSV_METRIC_COLUMNS]
        )
        for row in out_rows:
            writer.writerow(
                [row["sentence_len_s"], row["selector"], row["param"], row["n"],
                 row["r_value_skipped"], *_metric_cells(row["report"])]
            )
    if args.plot_data:
        with open(args.plot_data, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(
                ["sentence_len_s", "selector", "param", "metric", "mean", "half_width"]
            )
            for row in out_rows:
                for name in metrics_mod.CORPUS_METRICS:
                    if name in row["report"].corpus:
                        mean, hw = row["report"].corpus[name]
                        writer.writerow(
                            [row["sentence_len_s"], row["selector"], row["param"],
                             name, mean, hw]
                        )
    log.info("swept %d configs -> %s", len(out_rows), args.out)
    return 0


def _default_corpus_out(out: str) -> str:
    stem = re.sub(r"\.jsonl$", "", out)
    return f"{stem}.corpus.jsonl"


def cmd_synth(args) -> int:
    if args.generator == "markov":
        dataset, corpus = synth_mod.synth_markov(
            n_styles=args.n_styles,
            vocab_size=args.vocab_size,
            seg_len_range_s=(args.seg_len_min, args.seg_len_max),
            seg_range=(args.seg_min, args.seg_max),
            frame_rate_hz=args.frame_rate,
            n_files=args.n_files,
            n_corpus_tokens=args.corpus_tokens,
            rng_seed=args.seed,
            identical_styles=args.identical_styles,
            seg_len_step_s=args.seg_len_step,
        )
        corpus_out = args.corpus_out or _default_corpus_out(args.out)
        synth_mod.write_manifest(
            [(seq, None) for seq in corpus], corpus_out,
            generator="markov-corpus", seed=args.seed,
        )
        log.info("wrote %d corpus sequences -> %s", len(corpus), corpus_out)
    else:
        if not args.pool:
            raise ValueError(f"generator {args.generator} requires --pool")
        pool = synth_mod.load_pool(args.pool)
        if args.generator == "emotion-change":
            dataset = synth_mod.synth_emotion_change(
                pool,
                n_files=args.n_files,
                seg_range=(args.seg_min, args.seg_max),
                rng_seed=args.seed,
                keep_raw_joins=args.keep_raw_joins,
            )
        else:
            dataset = synth_mod.synth_gender_change(
                pool,
                n_files=args.n_files,
                seg_range=(args.seg_min, args.seg_max),
                rng_seed=args.seed,
            )
    synth_mod.write_manifest(
        list(dataset.files), args.out, generator=dataset.generator, seed=dataset.seed
    )
    log.info("wrote %d files -> %s", len(dataset.files), args.out)
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmiseg",
        description="Segment discrete token streams at language-model PMI dips",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-lm", help="count an n-gram model from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--alpha", type=float, default=0.1, help="add-alpha smoothing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("segment", help="chunk, score, and select boundaries")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model")
    p.add_argument("--external-scores")
    p.add_argument("--embeddings")
    p.add_argument("--scorer", choices=["pmi", "cosine"], default="pmi")
    p.add_argument("--selector", choices=sorted(SELECTOR_FLAGS), default="A")
    p.add_argument("--k", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--sentence-len", type=float, default=0.5)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dump-scores", help="also write per-utterance boundary scores")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("evaluate", help="score a segmentation against references")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True, help="manifest with reference segments")
    p.add_argument("--tol", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.9, help="CI confidence level")
    p.add_argument("--csv", help="also write the corpus row as a flat table")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="grid over selectors and sentence lengths")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--k-grid", help="comma list, default 10,15,20")
    p.add_argument("--v-grid", help="comma list, default 5,10,15,20")
    p.add_argument("--t-grid", help="comma list, default -5,-8,-10,-12.5,-15")
    p.add_argument("--sentence-len-grid", help="comma list, default 0.25,0.5,1.0,2.0")
    p.add_argument("--tol", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--plot-data", help="also write tidy long-format rows")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a benchmark with known boundaries")
    p.add_argument(
        "--generator",
        required=True,
        choices=["markov", "emotion-change", "gender-change"],
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-files", type=int, default=100)
    p.add_argument("--seg-min", type=int, default=4)
    p.add_argument("--seg-max", type=int, default=30)
    p.add_argument("--pool", help="labeled utterance pool (emotion/gender)")
    p.add_argument("--keep-raw-joins", action="store_true")
    p.add_argument("--n-styles", type=int, default=4)
    p.add_argument("--vocab-size", type=int, default=50)
    p.add_argument("--frame-rate", type=float, default=50.0)
    p.add_argument("--seg-len-min", type=float, default=2.0)
    p.add_argument("--seg-len-max", type=float, default=6.0)
    p.add_argument("--seg-len-step", type=float, help="quantize segment lengths")
    p.add_argument("--corpus-tokens", type=int, default=100_000)
    p.add_argument("--corpus-out", help="markov LM corpus path (default <out>.corpus.jsonl)")
    p.add_argument("--identical-styles", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        log.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
