"""Matplotlib renderings of score, stats, and questionnaire reports.

Every chart is written straight to a file with the Agg backend, so rendering
works headless.  These are companions to the delimited outputs, not a
replacement: the numbers of record live in the TSV/JSON files.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .humaneval import EvalSummary
from .metrics import FoldAggregate, MetricReport
from .stats import StatsReport

_METRIC_KEYS = ("precision", "recall", "f1", "f_beta")


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), dpi=120, bbox_inches="tight")
    plt.close(fig)


def render_score_figure(report: MetricReport, path: str | Path) -> None:
    """Bar chart of precision/recall/f1/f_beta for a single evaluation."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    values = [getattr(report, key) for key in _METRIC_KEYS]
    ax.bar(range(len(_METRIC_KEYS)), values, color="tab:blue")
    ax.set_xticks(range(len(_METRIC_KEYS)), _METRIC_KEYS)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title(f"{report.level} scores")
    _save(fig, path)


def render_fold_score_figure(
    fold_reports: Sequence[MetricReport],
    aggregate: FoldAggregate,
    path: str | Path,
) -> None:
    """Grouped bars per fold with the macro means as the last group."""
    n = len(fold_reports)
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * (n + 1)), 4.0))
    labels = [f"fold {i + 1}" for i in range(n)] + ["macro"]
    width = 0.2
    for offset, key in enumerate(_METRIC_KEYS):
        values = [getattr(fold, key) for fold in fold_reports]
        values.append(getattr(aggregate, f"macro_{key}"))
        positions = [i + (offset - 1.5) * width for i in range(len(values))]
        ax.bar(positions, values, width=width, label=key)
    ax.set_xticks(range(len(labels)), labels)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title(f"{aggregate.level} scores across {n} folds")
    ax.legend(fontsize="small")
    _save(fig, path)


def render_stats_figure(report: StatsReport, path: str | Path) -> None:
    """Reviews per category plus the label mix within each category."""
    categories = sorted(report.per_category)
    fig, (left, right) = plt.subplots(
        1, 2, figsize=(max(8.0, 1.0 * len(categories) + 6.0), 4.0))

    reviews = [report.per_category[c].reviews for c in categories]
    left.bar(categories, reviews, color="tab:blue")
    left.set_title("reviews per category")
    left.set_ylabel("reviews")
    left.tick_params(axis="x", rotation=45)

    bottoms = [0.0] * len(categories)
    colors = {"b_labels": "tab:green", "i_labels": "tab:olive",
              "o_labels": "tab:gray"}
    for key in ("b_labels", "i_labels", "o_labels"):
        shares = []
        for c in categories:
            stats = report.per_category[c]
            shares.append(100.0 * getattr(stats, key) / stats.tokens
                          if stats.tokens else 0.0)
        right.bar(categories, shares, bottom=bottoms, label=key,
                  color=colors[key])
        bottoms = [b + s for b, s in zip(bottoms, shares)]
    right.set_title("label mix (% of tokens)")
    right.set_ylabel("%")
    right.tick_params(axis="x", rotation=45)
    right.legend(fontsize="small")
    _save(fig, path)


def render_humaneval_figure(summary: EvalSummary, path: str | Path) -> None:
    """Stacked Yes/No/Idk shares per category, total row last."""
    rows = [*sorted(summary.per_category), "total"]
    breakdowns = [*(summary.per_category[c] for c in sorted(summary.per_category)),
                  summary.total]
    fig, ax = plt.subplots(figsize=(7.0, max(3.0, 0.5 * len(rows) + 1.5)))
    lefts = [0.0] * len(rows)
    parts = [("yes_pct", "Yes", "tab:green"), ("no_pct", "No", "tab:red"),
             ("idk_pct", "Idk", "tab:gray")]
    for key, label, color in parts:
        values = [getattr(b, key) for b in breakdowns]
        ax.barh(rows, values, left=lefts, label=label, color=color)
        lefts = [l + v for l, v in zip(lefts, values)]
    ax.invert_yaxis()
    ax.set_xlim(0.0, 100.0)
    ax.set_xlabel("% of voted items")
    ax.set_title("questionnaire outcomes by category")
    ax.legend(fontsize="small", loc="lower right")
    _save(fig, path)
