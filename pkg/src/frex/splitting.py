"""Fold plans: in-domain stratified k-fold, out-of-domain leave-one-category-out.

In-domain: within each category (processed lexicographically), review ids
are sorted, shuffled with one seeded xoshiro256** stream, and dealt
round-robin across the k folds starting at fold 1. Per category the fold
counts therefore differ by at most one. Out-of-domain: one fold per
category, its test set being exactly that category's reviews, so training
never sees the held-out domain.

Train sets are not stored; the folds partition the corpus, so the train
side of a fold is the union of every other fold's test set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TextIO

from .model import AnnotatedCorpus, ValidationError
from .rng import Xoshiro256StarStar


@dataclass(frozen=True, slots=True)
class Fold:
    name: str
    test: frozenset[str]


@dataclass(frozen=True, slots=True)
class FoldPlan:
    mode: str  # "in-domain" | "out-of-domain"
    k: int
    seed: int | None
    folds: tuple[Fold, ...]
    warnings: tuple[str, ...] = ()

    def all_ids(self) -> frozenset[str]:
        out: set[str] = set()
        for fold in self.folds:
            out |= fold.test
        return frozenset(out)

    def train(self, index: int) -> frozenset[str]:
        out: set[str] = set()
        for i, fold in enumerate(self.folds):
            if i != index:
                out |= fold.test
        return frozenset(out)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "k": self.k,
            "seed": self.seed,
            "folds": [{"name": f.name, "test": sorted(f.test)} for f in self.folds],
            "warnings": list(self.warnings),
        }


def _unique_ids_by_category(corpus: AnnotatedCorpus) -> dict[str, list[str]]:
    seen: set[str] = set()
    by_cat: dict[str, list[str]] = {}
    for review in corpus:
        if review.review_id in seen:
            raise ValidationError(f"duplicate review_id {review.review_id!r}")
        seen.add(review.review_id)
        by_cat.setdefault(review.category, []).append(review.review_id)
    return by_cat


def split_in_domain(corpus: AnnotatedCorpus, k: int = 10, seed: int = 42) -> FoldPlan:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    by_cat = _unique_ids_by_category(corpus)
    rng = Xoshiro256StarStar(seed)
    tests: list[set[str]] = [set() for _ in range(k)]
    warnings: list[str] = []
    for category in sorted(by_cat):
        ids = sorted(by_cat[category])
        if len(ids) < k:
            warnings.append(
                f"category {category} has {len(ids)} reviews, fewer than k={k}; "
                f"some folds will not contain it"
            )
        rng.shuffle(ids)
        for i, review_id in enumerate(ids):
            tests[i % k].add(review_id)
    folds = tuple(Fold(f"fold-{i + 1}", frozenset(t)) for i, t in enumerate(tests))
    return FoldPlan("in-domain", k, seed, folds, tuple(warnings))


def split_out_of_domain(corpus: AnnotatedCorpus) -> FoldPlan:
    by_cat = _unique_ids_by_category(corpus)
    if len(by_cat) < 2:
        raise ValueError(
            f"out-of-domain splitting needs at least 2 categories, got {len(by_cat)}"
        )
    folds = tuple(
        Fold(category, frozenset(by_cat[category])) for category in sorted(by_cat)
    )
    return FoldPlan("out-of-domain", len(folds), None, folds)


def parse_fold_plan(source: str | TextIO) -> FoldPlan:
    """Read a fold plan JSON document, checking shape and disjointness."""
    text = source if isinstance(source, str) else source.read()
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("fold plan must be a JSON object")
    missing = {"mode", "k", "seed", "folds"} - set(data)
    if missing:
        raise ValueError(f"fold plan is missing keys: {', '.join(sorted(missing))}")
    if data["mode"] not in ("in-domain", "out-of-domain"):
        raise ValueError(f"unknown fold plan mode {data['mode']!r}")
    folds = []
    claimed: dict[str, str] = {}
    for entry in data["folds"]:
        if not isinstance(entry, dict) or set(entry) != {"name", "test"}:
            raise ValueError("each fold needs exactly the keys name and test")
        for rid in entry["test"]:
            if rid in claimed:
                raise ValueError(
                    f"review {rid!r} appears in more than one fold "
                    f"({claimed[rid]!r} and {entry['name']!r})"
                )
            claimed[rid] = entry["name"]
        folds.append(Fold(entry["name"], frozenset(entry["test"])))
    return FoldPlan(
        mode=data["mode"],
        k=int(data["k"]),
        seed=None if data["seed"] is None else int(data["seed"]),
        folds=tuple(folds),
        warnings=tuple(data.get("warnings", ())),
    )
