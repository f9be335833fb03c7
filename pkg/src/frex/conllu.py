"""Reader and writer for the labeled review corpus format.

Files follow CoNLL-U conventions: ten tab-separated columns per token line
(ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC), ``# key =
value`` comments, and a blank line after each sentence. Span labels travel
in MISC as ``ner=B-feature`` / ``ner=I-feature``; O is implicit. The first
sentence of each review block carries ``review_id``, ``app_id`` and
``category`` comments; the block's remaining sentences inherit them.

Unspecified columns hold ``_``. On read, a ``_`` LEMMA falls back to the
surface form and a ``_`` UPOS becomes the empty string; multi-word range
lines (``1-2``) are skipped and never written. Columns 5 to 9 are accepted
but not modeled, so serialization is byte-identical only for files in the
canonical form this module writes.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import TextIO

from .model import AnnotatedCorpus, Label, Review, Token

ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)

_COMMENT = re.compile(r"#\s*(\w+)\s*=\s*(.*)$")
_RANGE_ID = re.compile(r"\d+-\d+$")

# characters that would corrupt the line or column structure of the format
_FORBIDDEN = set("\t\n\r\v\f\x1c\x1d\x1e\x85  ")

_COLUMN_NAMES = ("ID", "FORM", "LEMMA", "UPOS", "XPOS", "FEATS", "HEAD",
                 "DEPREL", "DEPS", "MISC")


class ParseError(ValueError):
    """Malformed corpus input; ``line`` is 1-based."""

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class _Block:
    """An open review whose sentences are still being collected."""

    __slots__ = ("review_id", "app_id", "category", "sentences")

    def __init__(self, review_id: str, app_id: str, category: str) -> None:
        self.review_id = review_id
        self.app_id = app_id
        self.category = category
        self.sentences: list[tuple[Token, ...]] = []

    def close(self) -> Review:
        return Review(self.review_id, self.app_id, self.category,
                      tuple(self.sentences))


def parse_corpus(source: str | TextIO) -> AnnotatedCorpus:
    """Parse corpus text (or a text stream) into an AnnotatedCorpus."""
    text = source if isinstance(source, str) else source.read()
    reviews: list[Review] = []
    seen_ids: set[str] = set()
    block: _Block | None = None

    meta: dict[str, str] = {}
    tokens: list[Token] = []
    sent_line = 0  # line where the pending sentence began

    def flush(at_line: int) -> None:
        nonlocal block, meta, tokens
        if not meta and not tokens:
            return
        if not tokens:
            raise ParseError(at_line, "comments without token lines")
        if "review_id" in meta:
            rid = meta["review_id"]
            for key in ("app_id", "category"):
                if key not in meta:
                    raise ParseError(sent_line, f"review {rid!r} is missing {key}")
            if rid in seen_ids:
                raise ParseError(sent_line, f"duplicate review_id {rid!r}")
            seen_ids.add(rid)
            if block is not None:
                reviews.append(block.close())
            block = _Block(rid, meta["app_id"], meta["category"])
        elif meta:
            extra = ", ".join(sorted(meta))
            raise ParseError(sent_line, f"{extra} comment without review_id")
        elif block is None:
            raise ParseError(sent_line, "sentence without review_id")
        block.sentences.append(tuple(tokens))
        meta = {}
        tokens = []

    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip() == "":
            flush(lineno)
            continue
        if not tokens and not meta:
            sent_line = lineno
        if line.startswith("#"):
            if tokens:
                raise ParseError(lineno, "comment inside a sentence")
            m = _COMMENT.match(line)
            if m:
                meta[m.group(1)] = m.group(2).strip()
            continue
        token = _parse_token_line(line, lineno, expected_id=len(tokens) + 1)
        if token is not None:  # None marks a skipped multi-word range line
            tokens.append(token)

    flush(len(text.splitlines()) + 1)
    if block is not None:
        reviews.append(block.close())
    return AnnotatedCorpus(tuple(reviews))


def _parse_token_line(line: str, lineno: int, expected_id: int) -> Token | None:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ParseError(lineno, f"expected 10 columns, got {len(cols)}")
    for i, col in enumerate(cols):
        if col == "":
            raise ParseError(lineno, f"empty {_COLUMN_NAMES[i]} column")
    if _RANGE_ID.fullmatch(cols[ID]):
        return None
    if not cols[ID].isdigit():
        raise ParseError(lineno, f"invalid token ID {cols[ID]!r}")
    if int(cols[ID]) != expected_id:
        raise ParseError(lineno, f"token ID {cols[ID]} out of order, expected {expected_id}")

    label = Label.O
    if cols[MISC] != "_":
        for item in cols[MISC].split("|"):
            if item.startswith("ner="):
                value = item[len("ner="):]
                try:
                    label = Label(value)
                except ValueError:
                    raise ParseError(lineno, f"unknown label {value!r}") from None

    surface = cols[FORM]
    lemma = surface if cols[LEMMA] == "_" else cols[LEMMA]
    pos = "" if cols[UPOS] == "_" else cols[UPOS]
    return Token(surface, lemma, pos, label)


def serialize_corpus(corpus: AnnotatedCorpus) -> str:
    """Render a corpus in canonical form: metadata comments on each review's
    first sentence, one blank line after every sentence."""
    parts: list[str] = []
    for review in corpus.reviews:
        for si, sentence in enumerate(review.sentences):
            if si == 0:
                for key, value in (("review_id", review.review_id),
                                   ("app_id", review.app_id),
                                   ("category", review.category)):
                    _check_field(value, key)
                    parts.append(f"# {key} = {value}")
            for i, token in enumerate(sentence, 1):
                _check_field(token.surface, "surface")
                _check_field(token.lemma, "lemma")
                _check_field(token.pos, "pos")
                misc = "_" if token.label is Label.O else f"ner={token.label.value}"
                parts.append("\t".join((
                    str(i), token.surface, token.lemma, token.pos or "_",
                    "_", "_", "_", "_", "_", misc,
                )))
            parts.append("")
    if not parts:
        return ""
    return "\n".join(parts) + "\n"


def _check_field(value: str, name: str) -> None:
    if _FORBIDDEN & set(value):
        raise ValueError(f"{name} {value!r} contains a tab or line break")


def read_corpus(path: str | Path) -> AnnotatedCorpus:
    with open(path, encoding="utf-8") as handle:
        return parse_corpus(handle)


def write_corpus(corpus: AnnotatedCorpus, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")
