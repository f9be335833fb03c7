"""Descriptive statistics over an annotated corpus.

Counts are reported per category and in total.  Count-like measures (reviews,
sentences, tokens, labels) add up across categories; set-like measures (apps,
distinct feature phrases) are deduplicated in the total, so the total can be
smaller than the column sum.  Distinct features are normalized lemma phrases
of the labeled spans, so casing and Unicode form do not split them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import AnnotatedCorpus, Label, extract_spans, normalize, span_lemmas


@dataclass(frozen=True, slots=True)
class CategoryStats:
    apps: int
    reviews: int
    sentences: int
    tokens: int
    b_labels: int
    i_labels: int
    o_labels: int
    distinct_features: int

    def to_json_dict(self) -> dict:
        return {
            "apps": self.apps,
            "reviews": self.reviews,
            "sentences": self.sentences,
            "tokens": self.tokens,
            "b_labels": self.b_labels,
            "i_labels": self.i_labels,
            "o_labels": self.o_labels,
            "distinct_features": self.distinct_features,
        }


@dataclass(frozen=True, slots=True)
class StatsReport:
    per_category: dict[str, CategoryStats]
    total: CategoryStats


class _Accumulator:
    __slots__ = ("apps", "features", "reviews", "sentences", "tokens",
                 "b_labels", "i_labels", "o_labels")

    def __init__(self):
        self.apps: set[str] = set()
        self.features: set[str] = set()
        self.reviews = 0
        self.sentences = 0
        self.tokens = 0
        self.b_labels = 0
        self.i_labels = 0
        self.o_labels = 0

    def stats(self) -> CategoryStats:
        return CategoryStats(
            apps=len(self.apps),
            reviews=self.reviews,
            sentences=self.sentences,
            tokens=self.tokens,
            b_labels=self.b_labels,
            i_labels=self.i_labels,
            o_labels=self.o_labels,
            distinct_features=len(self.features),
        )


def compute_stats(corpus: AnnotatedCorpus) -> StatsReport:
    """Count apps, reviews, sentences, tokens, labels, and distinct features."""
    buckets: dict[str, _Accumulator] = {}
    overall = _Accumulator()

    for review in corpus:
        bucket = buckets.setdefault(review.category, _Accumulator())
        spans = extract_spans(review)
        phrases = {" ".join(normalize(lemma) for lemma in span_lemmas(review, span))
                   for span in spans}
        for acc in (bucket, overall):
            acc.apps.add(review.app_id)
            acc.features.update(phrases)
            acc.reviews += 1
            acc.sentences += len(review.sentences)
            for token in review.tokens():
                acc.tokens += 1
                if token.label is Label.B:
                    acc.b_labels += 1
                elif token.label is Label.I:
                    acc.i_labels += 1
                else:
                    acc.o_labels += 1

    per_category = {cat: buckets[cat].stats() for cat in sorted(buckets)}
    return StatsReport(per_category, overall.stats())


_ROWS = ("apps", "reviews", "sentences", "tokens",
         "b_labels", "i_labels", "o_labels", "distinct_features")


def render_stats_tsv(report: StatsReport) -> str:
    """Measures as rows, categories (sorted) plus a total column."""
    categories = sorted(report.per_category)
    lines = ["measure\t" + "\t".join([*categories, "total"])]
    for row in _ROWS:
        values = [getattr(report.per_category[cat], row) for cat in categories]
        values.append(getattr(report.total, row))
        lines.append(row + "\t" + "\t".join(str(v) for v in values))
    return "\n".join(lines) + "\n"


def render_stats_json(report: StatsReport) -> dict:
    return {
        "per_category": {
            cat: stats.to_json_dict()
            for cat, stats in sorted(report.per_category.items())
        },
        "total": report.total.to_json_dict(),
    }
