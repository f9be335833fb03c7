"""Stratified k-fold and leave-one-category-out split plans."""

import json
import random

import pytest

from conftest import corpus, review_from_labels
from frex.model import ValidationError
from frex.splitting import FoldPlan, parse_fold_plan, split_in_domain, split_out_of_domain


def _corpus_with(counts: dict[str, int]):
    reviews = []
    for cat, n in counts.items():
        for i in range(n):
            reviews.append(review_from_labels(f"{cat.lower()}{i:03d}", [["O"]],
                                              app=f"app.{cat.lower()}", cat=cat))
    return corpus(*reviews)


def _category_of(rid: str) -> str:
    return rid.rstrip("0123456789").upper()


class TestInDomain:
    def test_60_40_with_k10_is_exactly_6_plus_4(self):
        plan = split_in_domain(_corpus_with({"PR": 60, "CO": 40}), k=10, seed=42)
        assert plan.mode == "in-domain" and plan.k == 10 and plan.seed == 42
        assert len(plan.folds) == 10
        for fold in plan.folds:
            assert len(fold.test) == 10
            per_cat = {"PR": 0, "CO": 0}
            for rid in fold.test:
                per_cat[_category_of(rid)] += 1
            assert per_cat == {"PR": 6, "CO": 4}

    def test_partition_property(self):
        c = _corpus_with({"PR": 23, "CO": 11, "TO": 7})
        plan = split_in_domain(c, k=5, seed=1)
        seen = []
        for fold in plan.folds:
            seen.extend(fold.test)
        assert sorted(seen) == sorted(r.review_id for r in c)

    def test_deterministic_and_seed_sensitive(self):
        c = _corpus_with({"PR": 30, "CO": 30})
        a = split_in_domain(c, k=10, seed=42)
        b = split_in_domain(c, k=10, seed=42)
        other = split_in_domain(c, k=10, seed=43)
        assert a == b
        assert a != other

    def test_stratification_bound_on_random_sizes(self):
        rng = random.Random(7)
        for _ in range(25):
            counts = {f"C{chr(65 + j)}": rng.randint(1, 40) for j in range(rng.randint(1, 5))}
            k = rng.randint(2, 12)
            plan = split_in_domain(_corpus_with(counts), k=k, seed=rng.randint(0, 999))
            for cat, n in counts.items():
                fold_counts = [
                    sum(1 for rid in fold.test if _category_of(rid) == cat)
                    for fold in plan.folds
                ]
                assert sum(fold_counts) == n
                assert max(fold_counts) - min(fold_counts) <= 1

    def test_small_category_warns(self):
        plan = split_in_domain(_corpus_with({"PR": 3, "CO": 40}), k=10)
        assert any("PR" in w for w in plan.warnings)
        assert not any("CO" in w for w in plan.warnings)

    def test_k_validation(self):
        c = _corpus_with({"PR": 10})
        for bad in (1, 0, -3):
            with pytest.raises(ValueError):
                split_in_domain(c, k=bad)

    def test_duplicate_review_ids_rejected(self):
        c = corpus(review_from_labels("r1", [["O"]]), review_from_labels("r1", [["O"]]))
        with pytest.raises(ValidationError):
            split_in_domain(c, k=2)

    def test_fold_names_and_train_complement(self):
        plan = split_in_domain(_corpus_with({"PR": 12}), k=3, seed=0)
        assert [f.name for f in plan.folds] == ["fold-1", "fold-2", "fold-3"]
        train = plan.train(0)
        assert train == plan.folds[1].test | plan.folds[2].test
        assert not (train & plan.folds[0].test)


class TestOutOfDomain:
    def test_leave_one_category_out(self):
        c = _corpus_with({"TO": 4, "PR": 3, "CO": 2})
        plan = split_out_of_domain(c)
        assert plan.mode == "out-of-domain"
        assert plan.k == 3 and plan.seed is None
        assert [f.name for f in plan.folds] == ["CO", "PR", "TO"]
        assert all(_category_of(rid) == fold.name
                   for fold in plan.folds for rid in fold.test)
        assert plan.train(2) == plan.folds[0].test | plan.folds[1].test

    def test_single_category_rejected(self):
        with pytest.raises(ValueError, match="categor"):
            split_out_of_domain(_corpus_with({"PR": 5}))


class TestPlanJson:
    def test_shape_and_sorted_ids(self):
        plan = split_in_domain(_corpus_with({"PR": 5, "CO": 5}), k=2, seed=9)
        d = plan.to_json_dict()
        assert set(d) == {"mode", "k", "seed", "folds", "warnings"}
        assert [f["name"] for f in d["folds"]] == ["fold-1", "fold-2"]
        for fold in d["folds"]:
            assert fold["test"] == sorted(fold["test"])

    def test_round_trip(self):
        plan = split_in_domain(_corpus_with({"PR": 7, "CO": 4}), k=3, seed=5)
        text = json.dumps(plan.to_json_dict())
        assert parse_fold_plan(text) == plan

    def test_parse_rejects_overlapping_folds(self):
        bad = {
            "mode": "in-domain", "k": 2, "seed": 1,
            "folds": [{"name": "fold-1", "test": ["r1"]},
                      {"name": "fold-2", "test": ["r1"]}],
            "warnings": [],
        }
        with pytest.raises(ValueError, match="more than one fold"):
            parse_fold_plan(json.dumps(bad))

    def test_parse_rejects_missing_keys(self):
        with pytest.raises(ValueError):
            parse_fold_plan(json.dumps({"mode": "in-domain"}))
