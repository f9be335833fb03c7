"""Token- and span-level scoring with recall-weighted F measures.

Token counts over aligned corpora:

* TP: predicted label is B or I and equals gold,
* FP: predicted label is B or I and differs from gold,
* FN: predicted label is O while gold is B or I.

Span counts compare exact (sentence, start, end) matches of maximal spans.
precision = TP/(TP+FP), recall = TP/(TP+FN); a zero denominator yields 0.0
with the corresponding ``*_defined`` flag cleared. f1 is the harmonic mean,
and f_beta = (1+beta^2) * p * r / (beta^2 * p + r) weights recall by beta,
the ratio of the mean time to annotate a feature from scratch to the mean
time to confirm a suggested one. Accuracy is deliberately absent: with O
dominating the label distribution it saturates and differentiates nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Sequence

from .model import AnnotatedCorpus, Label, Review, TokenSpan, extract_spans

# ratio of the two mean annotation times from the timing study that
# motivated recall weighting; compute_beta reproduces it from the raw pair
DEFAULT_BETA = 2.385


class AlignmentError(ValueError):
    """Gold and predictions disagree on ids, shapes, or surfaces."""


@dataclass(frozen=True, slots=True)
class TimingSample:
    """Mean seconds to annotate a feature from scratch vs. confirm one."""

    scratch_seconds: float
    assisted_seconds: float

    def __post_init__(self) -> None:
        for name, value in (("scratch_seconds", self.scratch_seconds),
                            ("assisted_seconds", self.assisted_seconds)):
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and positive, got {value!r}")


def compute_beta(sample: TimingSample) -> float:
    """Recall weight: how many assisted confirmations one manual annotation buys."""
    return sample.scratch_seconds / sample.assisted_seconds


def f_beta(precision: float, recall: float, beta: float) -> float:
    """(1+beta^2) * p * r / (beta^2 * p + r); 0.0 when both p and r are 0."""
    for name, value in (("precision", precision), ("recall", recall)):
        if not (0.0 <= value <= 1.0) or math.isnan(value):
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    if not math.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be finite and positive, got {beta!r}")
    if precision == recall:
        return precision  # algebraic fixed point, returned exactly
    b2 = beta * beta
    return (1.0 + b2) * (precision * recall) / (b2 * precision + recall)


@dataclass(frozen=True, slots=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True, slots=True)
class MetricReport:
    level: str  # "token" | "span"
    counts: ConfusionCounts
    beta: float
    precision: float
    recall: float
    f1: float
    f_beta: float
    precision_defined: bool
    recall_defined: bool
    pred_repairs: int = 0

    @classmethod
    def from_counts(cls, level: str, counts: ConfusionCounts, beta: float,
                    pred_repairs: int = 0) -> "MetricReport":
        if level not in ("token", "span"):
            raise ValueError(f"level must be 'token' or 'span', got {level!r}")
        if min(counts.tp, counts.fp, counts.fn) < 0:
            raise ValueError(f"negative confusion counts: {counts}")
        p_den = counts.tp + counts.fp
        r_den = counts.tp + counts.fn
        precision = counts.tp / p_den if p_den else 0.0
        recall = counts.tp / r_den if r_den else 0.0
        return cls(
            level=level,
            counts=counts,
            beta=beta,
            precision=precision,
            recall=recall,
            f1=f_beta(precision, recall, 1.0),
            f_beta=f_beta(precision, recall, beta),
            precision_defined=p_den > 0,
            recall_defined=r_den > 0,
            pred_repairs=pred_repairs,
        )

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "beta": self.beta,
            "tp": self.counts.tp,
            "fp": self.counts.fp,
            "fn": self.counts.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "f_beta": self.f_beta,
            "precision_defined": self.precision_defined,
            "recall_defined": self.recall_defined,
            "pred_repairs": self.pred_repairs,
        }


def _aligned_reviews(gold: AnnotatedCorpus,
                     pred: AnnotatedCorpus) -> Iterable[tuple[Review, Review]]:
    pred_map = pred.by_id()
    gold_ids = {r.review_id for r in gold}
    for extra in sorted(set(pred_map) - gold_ids):
        raise AlignmentError(f"unexpected prediction for review {extra!r}")
    for g in gold:
        p = pred_map.get(g.review_id)
        if p is None:
            raise AlignmentError(f"review {g.review_id!r} missing from predictions")
        if len(g.sentences) != len(p.sentences):
            raise AlignmentError(
                f"review {g.review_id!r}: {len(g.sentences)} gold sentences "
                f"vs {len(p.sentences)} predicted"
            )
        for si, (gs, ps) in enumerate(zip(g.sentences, p.sentences)):
            if len(gs) != len(ps):
                raise AlignmentError(
                    f"review {g.review_id!r}: sentence {si} has {len(gs)} gold "
                    f"tokens vs {len(ps)} predicted"
                )
            for ti, (gt, pt) in enumerate(zip(gs, ps)):
                if gt.surface != pt.surface:
                    raise AlignmentError(
                        f"review {g.review_id!r}: surface mismatch at sentence "
                        f"{si}, token {ti}: {gt.surface!r} vs {pt.surface!r}"
                    )
        yield g, p


def score_tokens(gold: AnnotatedCorpus, pred: AnnotatedCorpus,
                 beta: float = DEFAULT_BETA) -> MetricReport:
    """Token-level report over every token of the aligned corpora."""
    tp = fp = fn = 0
    for g, p in _aligned_reviews(gold, pred):
        for gs, ps in zip(g.sentences, p.sentences):
            for gt, pt in zip(gs, ps):
                if pt.label is not Label.O:
                    if pt.label is gt.label:
                        tp += 1
                    else:
                        fp += 1
                elif gt.label is not Label.O:
                    fn += 1
    return MetricReport.from_counts("token", ConfusionCounts(tp, fp, fn), beta)


def _repaired_spans(review: Review) -> tuple[set[TokenSpan], int]:
    """Spans of a prediction, reading an orphan I as if it were B."""
    spans: set[TokenSpan] = set()
    repairs = 0
    for si, sentence in enumerate(review.sentences):
        start = -1
        for ti, token in enumerate(sentence):
            if token.label is Label.B or (token.label is Label.I and start < 0):
                if token.label is Label.I:
                    repairs += 1
                if start >= 0:
                    spans.add(TokenSpan(si, start, ti - 1))
                start = ti
            elif token.label is Label.O:
                if start >= 0:
                    spans.add(TokenSpan(si, start, ti - 1))
                    start = -1
        if start >= 0:
            spans.add(TokenSpan(si, start, len(sentence) - 1))
    return spans, repairs


def score_spans(gold: AnnotatedCorpus, pred: AnnotatedCorpus,
                beta: float = DEFAULT_BETA) -> MetricReport:
    """Span-level report; a span counts only on an exact boundary match.

    Gold must be well-formed BIO. Predictions may contain orphan I tags;
    each one opens a span as if it were B and is tallied in pred_repairs.
    """
    tp = fp = fn = 0
    repairs = 0
    for g, p in _aligned_reviews(gold, pred):
        gold_spans = set(extract_spans(g))
        pred_spans, fixed = _repaired_spans(p)
        repairs += fixed
        tp += len(gold_spans & pred_spans)
        fp += len(pred_spans - gold_spans)
        fn += len(gold_spans - pred_spans)
    return MetricReport.from_counts("span", ConfusionCounts(tp, fp, fn), beta,
                                    pred_repairs=repairs)


@dataclass(frozen=True, slots=True)
class FoldAggregate:
    """Macro means across folds next to the pooled (micro) report.

    The two answer different questions and can differ noticeably when fold
    counts are skewed, so both are always reported.
    """

    level: str
    beta: float
    folds: int
    macro_precision: float
    macro_recall: float
    macro_f1: float
    macro_f_beta: float
    micro: MetricReport

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "beta": self.beta,
            "folds": self.folds,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "macro_f_beta": self.macro_f_beta,
            "micro": self.micro.to_json_dict(),
        }


def aggregate_folds(reports: Sequence[MetricReport]) -> FoldAggregate:
    if not reports:
        raise ValueError("no fold reports to aggregate")
    level = reports[0].level
    beta = reports[0].beta
    for rep in reports:
        if rep.level != level:
            raise ValueError(f"mixed level in fold reports: {rep.level!r} vs {level!r}")
        if rep.beta != beta:
            raise ValueError(f"mixed beta in fold reports: {rep.beta!r} vs {beta!r}")
    pooled = ConfusionCounts(
        sum(r.counts.tp for r in reports),
        sum(r.counts.fp for r in reports),
        sum(r.counts.fn for r in reports),
    )
    return FoldAggregate(
        level=level,
        beta=beta,
        folds=len(reports),
        macro_precision=fmean(r.precision for r in reports),
        macro_recall=fmean(r.recall for r in reports),
        macro_f1=fmean(r.f1 for r in reports),
        macro_f_beta=fmean(r.f_beta for r in reports),
        micro=MetricReport.from_counts(
            level, pooled, beta, pred_repairs=sum(r.pred_repairs for r in reports)
        ),
    )
