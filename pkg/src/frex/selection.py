"""Instance selection by distance from the per-feature embedding centroid.

For every feature phrase, the reviews whose labeled spans carry that phrase
form a group. The group's centroid is the component-wise mean of the member
embeddings; members are ranked by Euclidean distance from it, farthest
first by default (distance ties break on review_id). For each requested
fraction d the top ceil(d * n) members of every group are kept, and the
union over groups is the selected subset for d. Prefixes of one ranking
nest, so the subsets for increasing fractions always nest as well.

Ranking farthest-first keeps the group's unusual phrasings in the reduced
corpus; nearest-first is available to keep the most typical ones instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

from .embeddings import EmbeddingError, EmbeddingStore, centroid, euclidean
from .model import AnnotatedCorpus, FeatureSet, extract_spans, span_lemmas

_ORDERS = ("farthest-first", "nearest-first")


class SelectionError(ValueError):
    """Invalid selection input: empty features or missing embeddings."""


@dataclass(frozen=True, slots=True)
class SelectionConfig:
    fractions: tuple[float, ...] = (0.125, 0.25, 0.5, 0.75)
    order: str = "farthest-first"

    def __post_init__(self) -> None:
        object.__setattr__(self, "fractions", tuple(self.fractions))
        if not self.fractions:
            raise ValueError("fractions must be non-empty")
        for d in self.fractions:
            if not (0.0 < d <= 1.0) or math.isnan(d):
                raise ValueError(f"fractions must lie in (0, 1], got {d!r}")
        if any(a >= b for a, b in zip(self.fractions, self.fractions[1:])):
            raise ValueError(f"fractions must be strictly increasing: {self.fractions}")
        if self.order not in _ORDERS:
            raise ValueError(f"order must be one of {_ORDERS}, got {self.order!r}")


class RankedMember(NamedTuple):
    review_id: str
    distance: float


@dataclass(slots=True)
class PartitionPlan:
    order: str
    fractions: tuple[float, ...]
    selected: dict[float, frozenset[str]]
    rankings: dict[str, tuple[RankedMember, ...]]

    def to_json_dict(self) -> dict:
        return {
            "order": self.order,
            "fractions": list(self.fractions),
            "selected": {str(d): sorted(self.selected[d]) for d in self.fractions},
        }

    def audit_rows(self) -> Iterator[tuple[str, str, float, int]]:
        """(feature phrase, review_id, distance, 1-based rank) per member."""
        for key in sorted(self.rankings):
            for rank, member in enumerate(self.rankings[key], 1):
                yield key, member.review_id, member.distance, rank


def ceil_portion(fraction: float, n: int) -> int:
    """ceil(fraction * n), reading the fraction as its decimal literal so
    that e.g. 0.125 of 8 is exactly 1 rather than a float-rounding accident."""
    return math.ceil(Fraction(str(fraction)) * n)


def build_feature_groups(corpus: AnnotatedCorpus,
                         features: FeatureSet) -> dict[str, list[str]]:
    """Feature phrase -> sorted review ids whose labeled spans carry it.

    Phrases are identified by their normalized lemma sequence; the feature's
    app plays no role here. Groups that match nothing are kept, empty.
    """
    groups: dict[str, list[str]] = {
        " ".join(f.match_key("lemma")): [] for f in features
    }
    for review in corpus:
        span_keys = {
            " ".join(span_lemmas(review, span)) for span in extract_spans(review)
        }
        for key in span_keys:
            members = groups.get(key)
            if members is not None:
                members.append(review.review_id)
    return {key: sorted(set(members)) for key, members in groups.items()}


def select_instances(
    corpus: AnnotatedCorpus,
    features: FeatureSet,
    store: EmbeddingStore,
    config: SelectionConfig = SelectionConfig(),
) -> PartitionPlan:
    """Rank every feature group by centroid distance and take fraction prefixes."""
    if len(features) == 0:
        raise SelectionError("feature set is empty")
    groups = build_feature_groups(corpus, features)

    rankings: dict[str, tuple[RankedMember, ...]] = {}
    for key in sorted(groups):
        members = groups[key]
        if not members:
            rankings[key] = ()
            continue
        try:
            vectors = [store.get(rid) for rid in members]
        except EmbeddingError as exc:
            raise SelectionError(f"feature {key!r}: {exc}") from None
        center = centroid(vectors)  # members sorted, so the mean is bit-stable
        pairs = [(rid, euclidean(store.get(rid), center)) for rid in members]
        if config.order == "farthest-first":
            pairs.sort(key=lambda p: (-p[1], p[0]))
        else:
            pairs.sort(key=lambda p: (p[1], p[0]))
        rankings[key] = tuple(RankedMember(rid, dist) for rid, dist in pairs)

    selected: dict[float, frozenset[str]] = {}
    for d in config.fractions:
        chosen: set[str] = set()
        for ranked in rankings.values():
            take = ceil_portion(d, len(ranked))
            chosen.update(m.review_id for m in ranked[:take])
        selected[d] = frozenset(chosen)
    return PartitionPlan(config.order, config.fractions, selected, rankings)
