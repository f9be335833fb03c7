"""Minimal reader for the tab-separated review corpus format.

The exporter only needs each review's id and running text, so this reader
deliberately ignores lemmas, tags, and labels.  Format essentials honored
here: sentences are blank-line separated blocks of tab-separated token
lines, a ``# review_id = ...`` comment opens a new review, and sentences
without such a comment belong to the most recent review.  Multi-word range
lines (ids like ``3-4``) are surface artifacts and are skipped.
"""

from __future__ import annotations

import io
import re
from pathlib import Path
from typing import NamedTuple, TextIO

_COMMENT = re.compile(r"#\s*(\w+)\s*=\s*(.*)$")
_RANGE_ID = re.compile(r"^\d+-\d+$")


class ReviewText(NamedTuple):
    review_id: str
    text: str


class ReaderError(ValueError):
    """Raised for corpus text this reader cannot interpret."""


def read_review_texts(source: str | TextIO) -> list[ReviewText]:
    """Collect (review_id, space-joined surface text) pairs in file order."""
    if isinstance(source, str):
        source = io.StringIO(source)

    reviews: list[ReviewText] = []
    seen: set[str] = set()
    current_id: str | None = None
    words: list[str] = []

    def flush() -> None:
        nonlocal words
        if current_id is not None and words:
            reviews.append(ReviewText(current_id, " ".join(words)))
            words = []

    for line_no, raw in enumerate(source, 1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            match = _COMMENT.match(line)
            if match and match.group(1) == "review_id":
                flush()
                current_id = match.group(2).strip()
                if not current_id:
                    raise ReaderError(f"line {line_no}: empty review_id")
                if current_id in seen:
                    raise ReaderError(
                        f"line {line_no}: duplicate review_id {current_id!r}")
                seen.add(current_id)
            continue
        columns = line.split("\t")
        if len(columns) < 2:
            raise ReaderError(f"line {line_no}: expected tab-separated columns")
        if _RANGE_ID.match(columns[0]):
            continue
        if current_id is None:
            raise ReaderError(f"line {line_no}: token before any review_id")
        words.append(columns[1])

    flush()
    return reviews


def read_review_texts_file(path: str | Path) -> list[ReviewText]:
    with open(path, encoding="utf-8") as handle:
        return read_review_texts(handle)
