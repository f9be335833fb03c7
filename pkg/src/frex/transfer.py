"""Turning app-level feature phrases into token-level BIO annotations.

Crowd workers name the features of an app; reviews of that app that contain
a feature's phrase verbatim (after normalization) receive B/I labels over
the matched tokens. Matching compares normalized lemmas by default (or
surfaces), is contiguous, and never crosses a sentence boundary.

Features are applied in a fixed order independent of input order: longest
phrase first, then lexicographic phrase, then app_id, so overlaps resolve
the same way on every run. With ``skip-conflicts`` a match that touches an
already labeled token is dropped and counted; ``literal-overwrite``
reassigns the tokens instead. Overwrites always write a B followed by I
tokens, so the result stays structurally valid BIO, but an overlapped
earlier span can silently change identity or boundaries; prefer
skip-conflicts unless replicating the unconditional assignment exactly.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .model import (
    AnnotatedCorpus,
    Feature,
    FeatureSet,
    Label,
    PhraseToken,
    Review,
    Token,
    ValidationError,
    normalize,
)

logger = logging.getLogger(__name__)

_MATCH_ON = ("lemma", "surface")
_OCCURRENCE_MODES = ("first", "all-non-overlapping")
_OVERWRITE_MODES = ("skip-conflicts", "literal-overwrite")


class TransferError(ValueError):
    """Invalid transfer input: labeled corpus, empty features, bad TSV."""


@dataclass(frozen=True, slots=True)
class TransferConfig:
    match_on: str = "lemma"
    occurrence_mode: str = "first"
    overwrite_mode: str = "skip-conflicts"

    def __post_init__(self) -> None:
        for name, value, allowed in (
            ("match_on", self.match_on, _MATCH_ON),
            ("occurrence_mode", self.occurrence_mode, _OCCURRENCE_MODES),
            ("overwrite_mode", self.overwrite_mode, _OVERWRITE_MODES),
        ):
            if value not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {value!r}")


@dataclass(slots=True)
class TransferReport:
    annotations_made: int = 0
    reviews_touched: int = 0
    conflicts_skipped: int = 0
    per_feature_counts: dict[Feature, int] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        entries = [
            {"app_id": f.app_id, "phrase": f.phrase_text(), "count": count}
            for f, count in self.per_feature_counts.items()
        ]
        entries.sort(key=lambda e: (-e["count"], e["app_id"], e["phrase"]))
        return {
            "annotations_made": self.annotations_made,
            "reviews_touched": self.reviews_touched,
            "conflicts_skipped": self.conflicts_skipped,
            "per_feature": entries,
        }


def _scan(hay: Sequence[str], needle: Sequence[str]) -> list[int]:
    """Greedy left-to-right non-overlapping occurrences of needle in hay."""
    n = len(needle)
    out: list[int] = []
    if n == 0 or n > len(hay):
        return out
    i = 0
    needle = list(needle)
    while i <= len(hay) - n:
        if list(hay[i : i + n]) == needle:
            out.append(i)
            i += n
        else:
            i += 1
    return out


def find_matches(sentence: Sequence[Token], phrase: Sequence[PhraseToken],
                 match_on: str = "lemma") -> list[int]:
    """Start indices of greedy non-overlapping matches of phrase in sentence."""
    if match_on not in _MATCH_ON:
        raise ValueError(f"match_on must be one of {_MATCH_ON}, got {match_on!r}")
    attr = "lemma" if match_on == "lemma" else "surface"
    hay = [normalize(getattr(t, attr)) for t in sentence]
    needle = [normalize(getattr(p, attr)) for p in phrase]
    return _scan(hay, needle)


def transfer_annotations(
    corpus: AnnotatedCorpus,
    features: FeatureSet,
    config: TransferConfig = TransferConfig(),
) -> tuple[AnnotatedCorpus, TransferReport]:
    """Label an unannotated corpus with a feature set; returns a new corpus.

    The input corpus must carry only O labels. The report tallies placed
    spans, touched reviews, skipped conflicts, and per-feature span counts.
    """
    if len(features) == 0:
        raise TransferError("feature set is empty")

    ordered = sorted(
        features,
        key=lambda f: (-len(f.phrase), f.match_key(config.match_on), f.app_id),
    )
    by_app: dict[str, list[Feature]] = {}
    for f in ordered:
        by_app.setdefault(f.app_id, []).append(f)
    needles = {f: f.match_key(config.match_on) for f in ordered}

    attr = "lemma" if config.match_on == "lemma" else "surface"
    report = TransferReport()
    new_reviews: list[Review] = []

    for review in corpus:
        for token in review.tokens():
            if token.label is not Label.O:
                raise TransferError(
                    f"review {review.review_id!r} already carries labels"
                )
        grid = [[Label.O] * len(s) for s in review.sentences]
        sent_keys = [
            [normalize(getattr(t, attr)) for t in s] for s in review.sentences
        ]
        touched = False
        for feature in by_app.get(review.app_id, ()):
            needle = needles[feature]
            candidates: list[tuple[int, int]] = []
            for si, keys in enumerate(sent_keys):
                candidates.extend((si, start) for start in _scan(keys, needle))
                if config.occurrence_mode == "first" and candidates:
                    break
            if config.occurrence_mode == "first":
                candidates = candidates[:1]
            for si, start in candidates:
                row = grid[si]
                end = start + len(needle)
                if config.overwrite_mode == "skip-conflicts" and any(
                    lab is not Label.O for lab in row[start:end]
                ):
                    report.conflicts_skipped += 1
                    continue
                row[start] = Label.B
                for i in range(start + 1, end):
                    row[i] = Label.I
                report.annotations_made += 1
                report.per_feature_counts[feature] = (
                    report.per_feature_counts.get(feature, 0) + 1
                )
                touched = True
        if touched:
            report.reviews_touched += 1
        new_reviews.append(
            Review(
                review.review_id,
                review.app_id,
                review.category,
                tuple(
                    tuple(
                        Token(t.surface, t.lemma, t.pos, grid[si][ti])
                        for ti, t in enumerate(s)
                    )
                    for si, s in enumerate(review.sentences)
                ),
            )
        )
    return AnnotatedCorpus(tuple(new_reviews)), report


def load_features(source: str | TextIO) -> FeatureSet:
    """Read the feature TSV: columns app_id, feature_phrase, and optionally
    feature_lemmas (space-separated, aligned with the phrase tokens).

    Exact duplicates after normalization collapse to the first occurrence.
    """
    import io

    handle = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.DictReader(handle, delimiter="\t")
    fieldnames = reader.fieldnames or []
    for required in ("app_id", "feature_phrase"):
        if required not in fieldnames:
            raise TransferError(f"feature TSV is missing the {required} column")

    features: list[Feature] = []
    seen: set[tuple[str, tuple[str, ...]]] = set()
    dropped = 0
    for row_no, row in enumerate(reader, 2):
        app_id = (row["app_id"] or "").strip()
        surfaces = (row["feature_phrase"] or "").split()
        if not app_id:
            raise TransferError(f"row {row_no}: empty app_id")
        if not surfaces:
            raise TransferError(f"row {row_no}: empty feature_phrase")
        lemma_cell = (row.get("feature_lemmas") or "").strip()
        lemmas = lemma_cell.split() if lemma_cell else surfaces
        if len(lemmas) != len(surfaces):
            raise TransferError(
                f"row {row_no}: {len(lemmas)} lemmas for {len(surfaces)} phrase tokens"
            )
        try:
            feature = Feature(
                app_id, tuple(PhraseToken(s, l) for s, l in zip(surfaces, lemmas))
            )
        except ValidationError as exc:
            raise TransferError(f"row {row_no}: {exc}") from None
        key = (app_id, feature.match_key("lemma"))
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        features.append(feature)
    if dropped:
        logger.debug("dropped %d duplicate feature rows", dropped)
    return FeatureSet(tuple(features))
