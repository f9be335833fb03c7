"""Command line entry points.

One executable, nine subcommands covering the corpus pipeline end to end:

  transfer    label a corpus from a feature table
  select      rank reviews by distance to per-feature centroids
  split       build cross-validation fold plans
  score       compare predicted labels against gold labels
  beta        compute the recall weight from timing measurements
  humaneval   aggregate annotator questionnaires
  stats       descriptive corpus statistics
  mock-embed  deterministic hash embeddings for testing pipelines
  validate    check artifacts without producing output

Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage errors.
Set FREX_LOG (DEBUG/INFO/WARNING/ERROR) to control logging.  Commands that
write files write them atomically and drop a ``<out>.manifest.json`` with
sha256 digests of all inputs and outputs.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .artifacts import atomic_target, write_json_atomic, write_manifest, write_text_atomic
from .conllu import read_corpus, serialize_corpus
from .embeddings import load_embeddings, mock_embed_corpus, save_embeddings
from .figures import (
    render_fold_score_figure,
    render_humaneval_figure,
    render_score_figure,
    render_stats_figure,
)
from .humaneval import ControlPolicy, evaluate, load_records
from .metrics import (
    DEFAULT_BETA,
    TimingSample,
    aggregate_folds,
    compute_beta,
    score_spans,
    score_tokens,
)
from .model import AnnotatedCorpus, validate_corpus
from .selection import SelectionConfig, select_instances
from .splitting import parse_fold_plan, split_in_domain, split_out_of_domain
from .stats import compute_stats, render_stats_json, render_stats_tsv
from .transfer import TransferConfig, load_features, transfer_annotations

log = logging.getLogger("frex")


def _setup_logging() -> None:
    name = os.environ.get("FREX_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_features_file(path: str):
    with open(path, encoding="utf-8") as handle:
        return load_features(handle)


def _load_embeddings_file(path: str):
    with open(path, encoding="utf-8") as handle:
        return load_embeddings(handle)


def _load_fold_plan_file(path: str):
    with open(path, encoding="utf-8") as handle:
        return parse_fold_plan(handle)


def _figure_path(args) -> Path | None:
    if args.no_figure:
        return None
    if args.figure:
        return Path(args.figure)
    return Path(args.out).with_suffix(".png")


def _fmt(value: float, defined: bool = True) -> str:
    return repr(float(value)) if defined else "NA"


# ---------------------------------------------------------------- transfer


def cmd_transfer(args) -> int:
    corpus = read_corpus(args.corpus)
    features = _load_features_file(args.features)
    config = TransferConfig(args.match_on, args.occurrence, args.overwrite)
    labeled, report = transfer_annotations(corpus, features, config)

    write_text_atomic(args.out, serialize_corpus(labeled))
    outputs = [args.out]
    if args.report:
        write_json_atomic(args.report, report.to_json_dict())
        outputs.append(args.report)
    write_manifest(
        args.out, "transfer",
        {"match_on": args.match_on, "occurrence": args.occurrence,
         "overwrite": args.overwrite},
        [args.corpus, args.features], outputs)
    print(f"labeled {report.annotations_made} spans in "
          f"{report.reviews_touched} reviews "
          f"({report.conflicts_skipped} conflicts skipped)")
    return 0


# ----------------------------------------------------------------- select


def cmd_select(args) -> int:
    corpus = read_corpus(args.corpus)
    features = _load_features_file(args.features)
    store = _load_embeddings_file(args.embeddings)
    fractions = tuple(float(part) for part in args.fractions.split(","))
    config = SelectionConfig(fractions, args.order)
    plan = select_instances(corpus, features, store, config)

    write_json_atomic(args.out, plan.to_json_dict())
    audit = args.audit or str(Path(args.out).with_suffix(".audit.tsv"))
    lines = ["feature\treview_id\tdistance\trank"]
    for feature, review_id, distance, rank in plan.audit_rows():
        lines.append(f"{feature}\t{review_id}\t{_fmt(distance)}\t{rank}")
    write_text_atomic(audit, "\n".join(lines) + "\n")
    write_manifest(
        args.out, "select",
        {"fractions": list(fractions), "order": args.order},
        [args.corpus, args.features, args.embeddings], [args.out, audit])
    sizes = ", ".join(f"{d}: {len(plan.selected[d])}" for d in fractions)
    print(f"selected {sizes}")
    return 0


# ------------------------------------------------------------------ split


def cmd_split(args) -> int:
    corpus = read_corpus(args.corpus)
    if args.mode == "in-domain":
        plan = split_in_domain(corpus, k=args.k, seed=args.seed)
    else:
        log.info("out-of-domain mode ignores --k and --seed")
        plan = split_out_of_domain(corpus)
    write_json_atomic(args.out, plan.to_json_dict())
    write_manifest(
        args.out, "split",
        {"mode": args.mode, "k": args.k, "seed": args.seed},
        [args.corpus], [args.out])
    for warning in plan.warnings:
        log.warning("%s", warning)
    print(f"wrote {len(plan.folds)} {plan.mode} folds")
    return 0


# ------------------------------------------------------------------ score


def _restrict(corpus: AnnotatedCorpus, ids) -> AnnotatedCorpus:
    return AnnotatedCorpus(tuple(r for r in corpus if r.review_id in ids))


def cmd_score(args) -> int:
    gold = read_corpus(args.gold)
    pred = read_corpus(args.pred)
    levels = ("token", "span") if args.level == "both" else (args.level,)
    scorers = {"token": score_tokens, "span": score_spans}

    rows = ["level\tscope\ttp\tfp\tfn\tprecision\trecall\tf1\tf_beta\tpred_repairs"]

    def data_row(level: str, scope: str, rep) -> str:
        return "\t".join([
            level, scope, str(rep.counts.tp), str(rep.counts.fp),
            str(rep.counts.fn),
            _fmt(rep.precision, rep.precision_defined),
            _fmt(rep.recall, rep.recall_defined),
            _fmt(rep.f1), _fmt(rep.f_beta), str(rep.pred_repairs),
        ])

    doc: dict = {"beta": args.beta, "levels": {}}
    fold_reports: dict[str, list] = {}
    if args.folds:
        plan = _load_fold_plan_file(args.folds)
        gold_ids = {r.review_id for r in gold}
        missing = sorted(plan.all_ids() - gold_ids)
        if missing:
            raise ValueError(
                f"fold plan names reviews absent from gold: {missing[:5]}"
                + ("..." if len(missing) > 5 else ""))
        for level in levels:
            per_fold = []
            for fold in plan.folds:
                rep = scorers[level](_restrict(gold, fold.test),
                                     _restrict(pred, fold.test), beta=args.beta)
                per_fold.append(rep)
                rows.append(data_row(level, fold.name, rep))
            agg = aggregate_folds(per_fold)
            rows.append("\t".join([
                level, "macro", "", "", "",
                _fmt(agg.macro_precision), _fmt(agg.macro_recall),
                _fmt(agg.macro_f1), _fmt(agg.macro_f_beta), ""]))
            rows.append(data_row(level, "micro", agg.micro))
            fold_reports[level] = per_fold
            doc["levels"][level] = {
                "folds": [{"name": fold.name, **rep.to_json_dict()}
                          for fold, rep in zip(plan.folds, per_fold)],
                "aggregate": agg.to_json_dict(),
            }
    else:
        for level in levels:
            rep = scorers[level](gold, pred, beta=args.beta)
            rows.append(data_row(level, "all", rep))
            doc["levels"][level] = rep.to_json_dict()

    write_text_atomic(args.out, "\n".join(rows) + "\n")
    outputs = [args.out]
    if args.json:
        write_json_atomic(args.json, doc)
        outputs.append(args.json)

    figure = _figure_path(args)
    if figure is not None:
        # chart shows the first computed level (token before span)
        level = levels[0]
        with atomic_target(figure) as tmp:
            if args.folds:
                render_fold_score_figure(
                    fold_reports[level],
                    aggregate_folds(fold_reports[level]), tmp)
            else:
                render_score_figure(scorers[level](gold, pred, beta=args.beta), tmp)
        outputs.append(str(figure))

    inputs = [args.gold, args.pred] + ([args.folds] if args.folds else [])
    write_manifest(
        args.out, "score",
        {"level": args.level, "beta": args.beta,
         "folds": bool(args.folds)},
        inputs, outputs)
    print(f"scored {len(levels)} level(s) -> {args.out}")
    return 0


# ------------------------------------------------------------------- beta


def cmd_beta(args) -> int:
    sample = TimingSample(args.a_t, args.a_small_t)
    print(f"{compute_beta(sample):.3f}")
    return 0


# -------------------------------------------------------------- humaneval


def cmd_humaneval(args) -> int:
    with open(args.records, encoding="utf-8") as handle:
        records = load_records(handle)
    policy = ControlPolicy(args.controls_per_task, args.min_correct)
    categories = None
    if args.corpus:
        categories = {r.review_id: r.category for r in read_corpus(args.corpus)}
    report = evaluate(records, policy, args.min_annotators, categories)

    lines = ["category\tn_reviews\tyes_pct\tno_pct\tidk_pct"]
    summary = report.summary
    for cat in sorted(summary.per_category):
        b = summary.per_category[cat]
        lines.append(f"{cat}\t{b.n_reviews}\t{_fmt(b.yes_pct)}"
                     f"\t{_fmt(b.no_pct)}\t{_fmt(b.idk_pct)}")
    total = summary.total
    lines.append(f"total\t{total.n_reviews}\t{_fmt(total.yes_pct)}"
                 f"\t{_fmt(total.no_pct)}\t{_fmt(total.idk_pct)}")
    write_text_atomic(args.out, "\n".join(lines) + "\n")
    outputs = [args.out]

    if args.json:
        write_json_atomic(args.json, report.to_json_dict())
        outputs.append(args.json)

    figure = _figure_path(args)
    if figure is not None:
        with atomic_target(figure) as tmp:
            render_humaneval_figure(summary, tmp)
        outputs.append(str(figure))

    inputs = [args.records] + ([args.corpus] if args.corpus else [])
    write_manifest(
        args.out, "humaneval",
        {"controls_per_task": args.controls_per_task,
         "min_correct": args.min_correct,
         "min_annotators": args.min_annotators},
        inputs, outputs)
    if report.rejections:
        log.warning("rejected %d (task, annotator) pairs on controls",
                    len(report.rejections))
    if report.coverage:
        log.warning("%d items below the annotator minimum", len(report.coverage))
    print(f"aggregated {total.n_reviews} items across "
          f"{len(summary.per_category)} categories")
    return 0


# ------------------------------------------------------------------ stats


def cmd_stats(args) -> int:
    corpus = read_corpus(args.corpus)
    report = compute_stats(corpus)
    write_text_atomic(args.out, render_stats_tsv(report))
    outputs = [args.out]
    if args.json:
        write_json_atomic(args.json, render_stats_json(report))
        outputs.append(args.json)
    figure = _figure_path(args)
    if figure is not None:
        with atomic_target(figure) as tmp:
            render_stats_figure(report, tmp)
        outputs.append(str(figure))
    write_manifest(args.out, "stats", {}, [args.corpus], outputs)
    print(f"{report.total.reviews} reviews, {report.total.tokens} tokens, "
          f"{len(report.per_category)} categories")
    return 0


# ------------------------------------------------------------- mock-embed


def cmd_mock_embed(args) -> int:
    corpus = read_corpus(args.corpus)
    store = mock_embed_corpus(corpus, args.dim)
    buffer = io.StringIO()
    save_embeddings(store, buffer)
    write_text_atomic(args.out, buffer.getvalue())
    write_manifest(args.out, "mock-embed", {"dim": args.dim},
                   [args.corpus], [args.out])
    print(f"embedded {len(store)} reviews at dim {args.dim}")
    return 0


# --------------------------------------------------------------- validate


def cmd_validate(args) -> int:
    if not (args.corpus or args.embeddings or args.folds):
        raise ValueError(
            "nothing to validate; pass --corpus, --embeddings, or --folds")
    if args.corpus:
        corpus = read_corpus(args.corpus)
        validate_corpus(corpus)
        print(f"ok corpus {args.corpus} ({len(corpus)} reviews)")
    if args.embeddings:
        store = _load_embeddings_file(args.embeddings)
        print(f"ok embeddings {args.embeddings} "
              f"({len(store)} vectors, dim {store.dim})")
    if args.folds:
        plan = _load_fold_plan_file(args.folds)
        print(f"ok folds {args.folds} ({len(plan.folds)} {plan.mode} folds)")
    return 0


# ----------------------------------------------------------------- parser


def _add_figure_flags(sub) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--figure", metavar="PATH",
                       help="chart location (default: <out> with .png suffix)")
    group.add_argument("--no-figure", action="store_true",
                       help="skip chart rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frex",
        description="corpus engineering and evaluation for feature extraction")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("transfer", help="label a corpus from a feature table")
    sub.add_argument("--corpus", required=True, help="unlabeled corpus")
    sub.add_argument("--features", required=True, help="feature table (TSV)")
    sub.add_argument("--out", required=True, help="labeled corpus destination")
    sub.add_argument("--match-on", choices=("lemma", "surface"),
                     default="lemma", dest="match_on")
    sub.add_argument("--occurrence", choices=("first", "all-non-overlapping"),
                     default="first")
    sub.add_argument("--overwrite", choices=("skip-conflicts", "literal-overwrite"),
                     default="skip-conflicts")
    sub.add_argument("--report", help="optional JSON transfer report")
    sub.set_defaults(func=cmd_transfer)

    sub = subs.add_parser("select", help="rank reviews around feature centroids")
    sub.add_argument("--corpus", required=True, help="labeled corpus")
    sub.add_argument("--features", required=True, help="feature table (TSV)")
    sub.add_argument("--embeddings", required=True, help="JSONL embeddings")
    sub.add_argument("--out", required=True, help="partition plan (JSON)")
    sub.add_argument("--fractions", default="0.125,0.25,0.5,0.75",
                     help="comma-separated selection fractions")
    sub.add_argument("--order", choices=("farthest-first", "nearest-first"),
                     default="farthest-first")
    sub.add_argument("--audit", help="ranking audit TSV "
                                     "(default: <out> with .audit.tsv suffix)")
    sub.set_defaults(func=cmd_select)

    sub = subs.add_parser("split", help="build cross-validation folds")
    sub.add_argument("--corpus", required=True, help="labeled corpus")
    sub.add_argument("--out", required=True, help="fold plan (JSON)")
    sub.add_argument("--mode", choices=("in-domain", "out-of-domain"),
                     default="in-domain")
    sub.add_argument("--k", type=int, default=10, help="fold count")
    sub.add_argument("--seed", type=int, default=42, help="shuffle seed")
    sub.set_defaults(func=cmd_split)

    sub = subs.add_parser("score", help="compare predictions against gold")
    sub.add_argument("--gold", required=True, help="gold corpus")
    sub.add_argument("--pred", required=True, help="predicted corpus")
    sub.add_argument("--out", required=True, help="score table (TSV)")
    sub.add_argument("--level", choices=("token", "span", "both"), default="both")
    sub.add_argument("--beta", type=float, default=DEFAULT_BETA,
                     help="recall weight for f_beta")
    sub.add_argument("--folds", help="fold plan; score each fold's test split")
    sub.add_argument("--json", help="optional JSON report")
    _add_figure_flags(sub)
    sub.set_defaults(func=cmd_score)

    sub = subs.add_parser("beta", help="recall weight from timing measurements")
    sub.add_argument("--a-t", type=float, default=28.29, dest="a_t",
                     help="seconds to annotate from scratch")
    sub.add_argument("--a-small-t", type=float, default=11.86, dest="a_small_t",
                     help="seconds to confirm a suggestion")
    sub.set_defaults(func=cmd_beta)

    sub = subs.add_parser("humaneval", help="aggregate annotator questionnaires")
    sub.add_argument("--records", required=True, help="annotation records (TSV)")
    sub.add_argument("--out", required=True, help="summary table (TSV)")
    sub.add_argument("--corpus", help="labeled corpus for category lookup")
    sub.add_argument("--controls-per-task", type=int, default=5,
                     dest="controls_per_task")
    sub.add_argument("--min-correct", type=int, default=4, dest="min_correct")
    sub.add_argument("--min-annotators", type=int, default=5,
                     dest="min_annotators")
    sub.add_argument("--json", help="optional full JSON report")
    _add_figure_flags(sub)
    sub.set_defaults(func=cmd_humaneval)

    sub = subs.add_parser("stats", help="descriptive corpus statistics")
    sub.add_argument("--corpus", required=True, help="labeled corpus")
    sub.add_argument("--out", required=True, help="statistics table (TSV)")
    sub.add_argument("--json", help="optional JSON statistics")
    _add_figure_flags(sub)
    sub.set_defaults(func=cmd_stats)

    sub = subs.add_parser("mock-embed", help="deterministic test embeddings")
    sub.add_argument("--corpus", required=True, help="corpus to embed")
    sub.add_argument("--out", required=True, help="JSONL destination")
    sub.add_argument("--dim", type=int, default=64, help="vector dimension")
    sub.set_defaults(func=cmd_mock_embed)

    sub = subs.add_parser("validate", help="check artifacts")
    sub.add_argument("--corpus", help="corpus to validate")
    sub.add_argument("--embeddings", help="JSONL embeddings to validate")
    sub.add_argument("--folds", help="fold plan to validate")
    sub.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"frex {args.command}: {exc}", file=sys.stderr)
        log.debug("command failed", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
