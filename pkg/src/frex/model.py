"""Core data model: labeled tokens, reviews, feature phrases, span extraction."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple


class Label(Enum):
    """Token tag; exactly these three values exist."""

    O = "O"
    B = "B-feature"
    I = "I-feature"


def normalize(text: str) -> str:
    """Matching equivalence used everywhere: NFC normalization, then casefold."""
    return unicodedata.normalize("NFC", text).casefold()


class ValidationError(ValueError):
    """A corpus object breaks a structural invariant."""


class MalformedBioError(ValidationError):
    """An I tag with no B or I immediately before it in the same sentence."""

    def __init__(self, review_id: str, sentence: int, token: int) -> None:
        self.review_id = review_id
        self.sentence = sentence
        self.token = token
        super().__init__(
            f"review {review_id!r}: orphan {Label.I.value} at sentence {sentence}, token {token}"
        )


class TokenSpan(NamedTuple):
    """Maximal labeled span: a B token plus the run of I tokens after it."""

    sentence: int
    start: int
    end: int  # inclusive


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    lemma: str
    pos: str = ""
    label: Label = Label.O


@dataclass(frozen=True, slots=True)
class Review:
    review_id: str
    app_id: str
    category: str
    sentences: tuple[tuple[Token, ...], ...]

    def tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence


@dataclass(frozen=True, slots=True)
class AnnotatedCorpus:
    reviews: tuple[Review, ...] = ()

    @property
    def categories(self) -> frozenset[str]:
        """Distinct category codes, always derived from the reviews."""
        return frozenset(r.category for r in self.reviews)

    def __len__(self) -> int:
        return len(self.reviews)

    def __iter__(self) -> Iterator[Review]:
        return iter(self.reviews)

    def by_id(self) -> dict[str, Review]:
        return {r.review_id: r for r in self.reviews}


def extract_spans(review: Review) -> list[TokenSpan]:
    """Maximal (sentence, start, end) spans in order of appearance.

    Spans never cross sentence boundaries. Raises MalformedBioError for an
    I tag that does not continue a span.
    """
    spans: list[TokenSpan] = []
    for si, sentence in enumerate(review.sentences):
        open_start = -1  # start of the span being walked, -1 when outside one
        for ti, token in enumerate(sentence):
            if token.label is Label.B:
                if open_start >= 0:
                    spans.append(TokenSpan(si, open_start, ti - 1))
                open_start = ti
            elif token.label is Label.I:
                if open_start < 0:
                    raise MalformedBioError(review.review_id, si, ti)
            else:
                if open_start >= 0:
                    spans.append(TokenSpan(si, open_start, ti - 1))
                    open_start = -1
        if open_start >= 0:
            spans.append(TokenSpan(si, open_start, len(sentence) - 1))
    return spans


def span_lemmas(review: Review, span: TokenSpan) -> tuple[str, ...]:
    """Normalized lemma sequence under a span."""
    sentence = review.sentences[span.sentence]
    return tuple(normalize(t.lemma) for t in sentence[span.start : span.end + 1])


def validate_review(review: Review) -> None:
    if not review.review_id:
        raise ValidationError("empty review_id")
    if not review.app_id or not review.category:
        raise ValidationError(f"review {review.review_id!r}: empty app_id or category")
    if not review.sentences:
        raise ValidationError(f"review {review.review_id!r} has no sentences")
    for si, sentence in enumerate(review.sentences):
        if not sentence:
            raise ValidationError(f"review {review.review_id!r}: sentence {si} is empty")
        for ti, token in enumerate(sentence):
            if not token.surface or not token.lemma:
                raise ValidationError(
                    f"review {review.review_id!r}: empty surface or lemma "
                    f"at sentence {si}, token {ti}"
                )
    extract_spans(review)  # BIO well-formedness


def validate_corpus(corpus: AnnotatedCorpus) -> None:
    seen: set[str] = set()
    for review in corpus:
        if review.review_id in seen:
            raise ValidationError(f"duplicate review_id {review.review_id!r}")
        seen.add(review.review_id)
        validate_review(review)


@dataclass(frozen=True, slots=True)
class PhraseToken:
    surface: str
    lemma: str


@dataclass(frozen=True, slots=True)
class Feature:
    """A crowd-named feature phrase tied to the app it was named for."""

    app_id: str
    phrase: tuple[PhraseToken, ...]

    def __post_init__(self) -> None:
        if not self.app_id:
            raise ValidationError("feature with empty app_id")
        if not self.phrase:
            raise ValidationError(f"feature for app {self.app_id!r} has an empty phrase")
        for pt in self.phrase:
            if not pt.surface or not pt.lemma:
                raise ValidationError(
                    f"feature for app {self.app_id!r} has an empty phrase token"
                )

    def match_key(self, match_on: str = "lemma") -> tuple[str, ...]:
        """Normalized token sequence this feature is matched by."""
        if match_on == "lemma":
            return tuple(normalize(pt.lemma) for pt in self.phrase)
        if match_on == "surface":
            return tuple(normalize(pt.surface) for pt in self.phrase)
        raise ValueError(f"match_on must be 'lemma' or 'surface', got {match_on!r}")

    def phrase_text(self) -> str:
        return " ".join(pt.surface for pt in self.phrase)


@dataclass(frozen=True, slots=True)
class FeatureSet:
    features: tuple[Feature, ...]

    def __post_init__(self) -> None:
        seen: set[tuple[str, tuple[str, ...]]] = set()
        for f in self.features:
            key = (f.app_id, f.match_key("lemma"))
            if key in seen:
                raise ValidationError(
                    f"duplicate feature for app {f.app_id!r}: {' '.join(key[1])!r}"
                )
            seen.add(key)

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self) -> Iterator[Feature]:
        return iter(self.features)
