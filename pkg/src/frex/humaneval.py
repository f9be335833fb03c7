"""Aggregation of crowdsourced usefulness questionnaires.

Annotators judge (review, feature phrase) items with Yes / No / Idk.  Each
task embeds a fixed number of control items with known answers; an annotator
whose control score on a task falls below the policy threshold has all of
that task's judgements discarded.  Surviving judgements are aggregated per
item by plurality vote, requiring a minimum number of annotators.  Ties
resolve conservatively: Idk beats No beats Yes, so an evenly split item is
never reported as a positive finding.

Summaries report per-category answer rates over the voted items plus a
total row weighted by per-category review counts.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, TextIO


class Answer(Enum):
    YES = "Yes"
    NO = "No"
    IDK = "Idk"


# lower value wins ties
_TIE_PRIORITY = {Answer.IDK: 0, Answer.NO: 1, Answer.YES: 2}


class EvalError(ValueError):
    """Raised for malformed or inconsistent questionnaire data."""


class ControlCountError(EvalError):
    """An annotator saw the wrong number of control items on a task."""


class InsufficientAnnotatorsError(EvalError):
    """Too few valid annotators voted on an item."""

    def __init__(self, have: int, needed: int):
        super().__init__(f"item has {have} annotators, needs {needed}")
        self.have = have
        self.needed = needed


@dataclass(frozen=True, slots=True)
class ControlPolicy:
    """Controls embedded per task and the minimum number answered correctly."""

    controls_per_task: int
    min_correct: int

    def __post_init__(self):
        if self.controls_per_task < 1:
            raise ValueError("controls_per_task must be at least 1")
        if not 1 <= self.min_correct <= self.controls_per_task:
            raise ValueError(
                "min_correct must be between 1 and controls_per_task")


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    task_id: str
    annotator_id: str
    review_id: str
    feature_phrase: str
    answer: Answer
    is_control: bool = False
    control_correct: bool = False
    category: str = ""


class Rejection(NamedTuple):
    task_id: str
    annotator_id: str
    correct: int
    required: int


class VotedItem(NamedTuple):
    review_id: str
    feature_phrase: str
    category: str
    answer: Answer


class CoverageGap(NamedTuple):
    review_id: str
    feature_phrase: str
    annotators: int
    required: int


@dataclass(frozen=True, slots=True)
class CategoryBreakdown:
    n_reviews: int
    yes_pct: float
    no_pct: float
    idk_pct: float

    def to_json_dict(self) -> dict:
        return {
            "n_reviews": self.n_reviews,
            "yes_pct": self.yes_pct,
            "no_pct": self.no_pct,
            "idk_pct": self.idk_pct,
        }


@dataclass(frozen=True, slots=True)
class EvalSummary:
    per_category: dict[str, CategoryBreakdown]
    total: CategoryBreakdown

    def to_json_dict(self) -> dict:
        return {
            "per_category": {
                cat: b.to_json_dict()
                for cat, b in sorted(self.per_category.items())
            },
            "total": self.total.to_json_dict(),
        }


@dataclass(frozen=True, slots=True)
class EvalReport:
    summary: EvalSummary
    rejections: tuple[Rejection, ...]
    coverage: tuple[CoverageGap, ...]

    def to_json_dict(self) -> dict:
        return {
            "summary": self.summary.to_json_dict(),
            "rejections": [r._asdict() for r in self.rejections],
            "coverage": [g._asdict() for g in self.coverage],
        }


def filter_annotators(
    records: Iterable[AnnotationRecord], policy: ControlPolicy
) -> tuple[frozenset[tuple[str, str]], tuple[Rejection, ...]]:
    """Partition (task, annotator) pairs by their control performance.

    Every pair appearing anywhere in the records must have exactly
    ``policy.controls_per_task`` control records; anything else means the
    task was assembled wrong, and all offenders are reported in one error.
    """
    seen: set[tuple[str, str]] = set()
    totals: Counter[tuple[str, str]] = Counter()
    correct: Counter[tuple[str, str]] = Counter()
    for record in records:
        pair = (record.task_id, record.annotator_id)
        seen.add(pair)
        if record.is_control:
            totals[pair] += 1
            if record.control_correct:
                correct[pair] += 1

    bad = [(pair, totals[pair]) for pair in sorted(seen)
           if totals[pair] != policy.controls_per_task]
    if bad:
        detail = "; ".join(
            f"task {task!r} annotator {annot!r} has {n} control items"
            f" (expected {policy.controls_per_task})"
            for (task, annot), n in bad)
        raise ControlCountError(detail)

    valid = set()
    rejections = []
    for pair in sorted(seen):
        if correct[pair] >= policy.min_correct:
            valid.add(pair)
        else:
            rejections.append(
                Rejection(pair[0], pair[1], correct[pair], policy.min_correct))
    return frozenset(valid), tuple(rejections)


def vote(records: Iterable[AnnotationRecord], min_annotators: int = 5) -> Answer:
    """Plurality vote over one item's records, ties resolving Idk > No > Yes."""
    records = list(records)
    items = {(r.review_id, r.feature_phrase) for r in records}
    if len(items) > 1:
        raise EvalError(f"vote expects a single item, got {sorted(items)}")
    annotators = [r.annotator_id for r in records]
    duplicates = sorted({a for a in annotators if annotators.count(a) > 1})
    if duplicates:
        raise EvalError(f"duplicate annotators for item: {duplicates}")
    if len(records) < min_annotators:
        raise InsufficientAnnotatorsError(len(records), min_annotators)

    counts = Counter(r.answer for r in records)
    best = max(counts.values())
    tied = [answer for answer, n in counts.items() if n == best]
    return min(tied, key=_TIE_PRIORITY.__getitem__)


def summarize(items: Iterable[VotedItem]) -> EvalSummary:
    """Per-category answer rates plus a review-count-weighted total."""
    by_category: dict[str, Counter[Answer]] = {}
    for item in items:
        by_category.setdefault(item.category, Counter())[item.answer] += 1

    def breakdown(counts: Counter[Answer]) -> CategoryBreakdown:
        n = sum(counts.values())
        if n == 0:
            return CategoryBreakdown(0, 0.0, 0.0, 0.0)
        return CategoryBreakdown(
            n,
            100.0 * counts[Answer.YES] / n,
            100.0 * counts[Answer.NO] / n,
            100.0 * counts[Answer.IDK] / n,
        )

    per_category = {cat: breakdown(c) for cat, c in sorted(by_category.items())}
    pooled = Counter()
    for counts in by_category.values():
        pooled.update(counts)
    return EvalSummary(per_category, breakdown(pooled))


def weighted_totals(
    per_category: Mapping[str, CategoryBreakdown]
) -> tuple[float, float, float]:
    """Answer rates over all categories, weighted by per-category review counts."""
    total = sum(b.n_reviews for b in per_category.values())
    if total == 0:
        return (0.0, 0.0, 0.0)
    yes = sum(b.n_reviews * b.yes_pct for b in per_category.values()) / total
    no = sum(b.n_reviews * b.no_pct for b in per_category.values()) / total
    idk = sum(b.n_reviews * b.idk_pct for b in per_category.values()) / total
    return (yes, no, idk)


def evaluate(
    records: Iterable[AnnotationRecord],
    policy: ControlPolicy,
    min_annotators: int = 5,
    categories: Mapping[str, str] | None = None,
) -> EvalReport:
    """Full pipeline: filter annotators, vote per item, summarize by category.

    Categories come from the records themselves or from the ``categories``
    mapping (review_id to category); the two must agree where both exist.
    Items with too few valid annotators are reported as coverage gaps, not
    errors.
    """
    records = list(records)
    valid, rejections = filter_annotators(records, policy)

    grouped: dict[tuple[str, str], list[AnnotationRecord]] = {}
    for record in records:
        if record.is_control:
            continue
        if (record.task_id, record.annotator_id) not in valid:
            continue
        grouped.setdefault(
            (record.review_id, record.feature_phrase), []).append(record)

    voted: list[VotedItem] = []
    gaps: list[CoverageGap] = []
    for (review_id, phrase), group in sorted(grouped.items()):
        names = {r.category for r in group if r.category}
        if categories and review_id in categories:
            names.add(categories[review_id])
        if len(names) > 1:
            raise EvalError(
                f"conflicting categories for review {review_id!r}: {sorted(names)}")
        if not names:
            raise EvalError(
                f"no category for review {review_id!r}; add a category column"
                " or pass a review-to-category mapping")
        try:
            answer = vote(group, min_annotators)
        except InsufficientAnnotatorsError as exc:
            gaps.append(CoverageGap(review_id, phrase, exc.have, exc.needed))
            continue
        voted.append(VotedItem(review_id, phrase, names.pop(), answer))

    return EvalReport(summarize(voted), rejections, tuple(gaps))


_REQUIRED_COLUMNS = ("task_id", "annotator_id", "review_id", "feature_phrase",
                     "answer", "is_control", "control_correct")
_ANSWERS = {"yes": Answer.YES, "no": Answer.NO, "idk": Answer.IDK}
_BOOLEANS = {"true": True, "1": True, "false": False, "0": False, "": False}


def load_records(source: str | TextIO) -> list[AnnotationRecord]:
    """Read annotation records from tab-separated text.

    Required columns: task_id, annotator_id, review_id, feature_phrase,
    answer (Yes/No/Idk, case-insensitive), is_control, control_correct
    (true/false/1/0, blank means false).  A category column is optional.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source, delimiter="\t")
    fields = reader.fieldnames or []
    missing = [c for c in _REQUIRED_COLUMNS if c not in fields]
    if missing:
        raise EvalError(f"missing columns: {', '.join(missing)}")

    records = []
    for row_no, row in enumerate(reader, start=2):
        answer = _ANSWERS.get((row["answer"] or "").strip().casefold())
        if answer is None:
            raise EvalError(f"row {row_no}: unknown answer {row['answer']!r}")

        def parse_bool(column: str) -> bool:
            raw = (row[column] or "").strip().casefold()
            if raw not in _BOOLEANS:
                raise EvalError(
                    f"row {row_no}: {column} must be true/false/1/0, got {row[column]!r}")
            return _BOOLEANS[raw]

        records.append(AnnotationRecord(
            task_id=row["task_id"],
            annotator_id=row["annotator_id"],
            review_id=row["review_id"],
            feature_phrase=row["feature_phrase"],
            answer=answer,
            is_control=parse_bool("is_control"),
            control_correct=parse_bool("control_correct"),
            category=(row.get("category") or "").strip(),
        ))
    return records
