"""Per-review embedding vectors: store, JSONL interchange, geometry, mock encoder.

The interchange format is JSON Lines, one object per review::

    {"review_id": "r1", "vector": [0.12, -0.5, ...]}

All vectors in a file share one dimensionality and every value is finite;
review_ids are unique. Floats are written at full precision, so a saved
store loads back bit-identically.
"""

from __future__ import annotations

import json
import math
from typing import Mapping, Sequence, TextIO

import numpy as np

from .model import AnnotatedCorpus, Review

# FNV-1a, 64 bit
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    """FNV-1a hash: offset basis 14695981039346656037, prime 1099511628211,
    xor each byte then multiply, all modulo 2^64."""
    value = _FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * _FNV_PRIME) & _MASK64
    return value


class EmbeddingError(ValueError):
    """Invalid embedding data or a lookup for a review that has none."""


class EmbeddingStore:
    """Validated review_id -> float64 vector map; vectors are read-only."""

    def __init__(self, vectors: Mapping[str, Sequence[float] | np.ndarray]) -> None:
        self._vectors: dict[str, np.ndarray] = {}
        self._dim: int | None = None
        for review_id, raw in vectors.items():
            if not review_id or not isinstance(review_id, str):
                raise EmbeddingError(f"invalid review_id {review_id!r}")
            arr = np.array(raw, dtype=np.float64)
            if arr.ndim != 1 or arr.size == 0:
                raise EmbeddingError(
                    f"review {review_id!r}: vector must be a non-empty 1-D sequence"
                )
            if not np.all(np.isfinite(arr)):
                raise EmbeddingError(f"review {review_id!r}: vector is not finite")
            if self._dim is None:
                self._dim = arr.size
            elif arr.size != self._dim:
                raise EmbeddingError(
                    f"review {review_id!r}: dimension {arr.size} != {self._dim}"
                )
            arr.setflags(write=False)
            self._vectors[review_id] = arr

    @property
    def dim(self) -> int | None:
        """Shared vector dimensionality; None only for an empty store."""
        return self._dim

    def get(self, review_id: str) -> np.ndarray:
        try:
            return self._vectors[review_id]
        except KeyError:
            raise EmbeddingError(f"no embedding for review {review_id!r}") from None

    def ids(self) -> list[str]:
        return sorted(self._vectors)

    def __contains__(self, review_id: str) -> bool:
        return review_id in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingStore):
            return NotImplemented
        return self._dim == other._dim and self._vectors.keys() == other._vectors.keys() and all(
            np.array_equal(v, other._vectors[k]) for k, v in self._vectors.items()
        )


def load_embeddings(source: str | TextIO) -> EmbeddingStore:
    """Read the JSONL format; errors carry 1-based line numbers."""
    text = source if isinstance(source, str) else source.read()
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip() == "":
            raise EmbeddingError(f"line {lineno}: blank line")
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EmbeddingError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict) or set(record) != {"review_id", "vector"}:
            raise EmbeddingError(
                f"line {lineno}: record must have exactly the keys review_id and vector"
            )
        review_id = record["review_id"]
        vector = record["vector"]
        if not isinstance(review_id, str) or not review_id:
            raise EmbeddingError(f"line {lineno}: review_id must be a non-empty string")
        if review_id in vectors:
            raise EmbeddingError(f"line {lineno}: duplicate review_id {review_id!r}")
        if not isinstance(vector, list) or not vector:
            raise EmbeddingError(f"line {lineno}: vector must be a non-empty array")
        values = []
        for x in vector:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise EmbeddingError(f"line {lineno}: vector element {x!r} is not a number")
            if not math.isfinite(x):
                raise EmbeddingError(f"line {lineno}: vector element {x!r} is not finite")
            values.append(float(x))
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise EmbeddingError(f"line {lineno}: dimension {len(values)} != {dim}")
        vectors[review_id] = np.array(values, dtype=np.float64)
    return EmbeddingStore(vectors)


def save_embeddings(store: EmbeddingStore, dest: TextIO) -> None:
    """Write JSONL sorted by review_id, floats at full round-trip precision."""
    for review_id in store.ids():
        vector = [float(x) for x in store.get(review_id)]
        dest.write(json.dumps({"review_id": review_id, "vector": vector},
                              separators=(",", ":")))
        dest.write("\n")


def mock_embed(review: Review, dim: int) -> np.ndarray:
    """Deterministic stand-in for a learned encoder: hashed bag of lemmas.

    Each token's raw lemma (UTF-8 bytes, no normalization) is hashed with
    FNV-1a 64 and counted in bucket ``hash % dim``; the count vector is then
    L2-normalized. Sentence boundaries play no role.
    """
    if dim < 1:
        raise ValueError(f"dim must be at least 1, got {dim}")
    counts = np.zeros(dim, dtype=np.float64)
    for token in review.tokens():
        counts[fnv1a_64(token.lemma.encode("utf-8")) % dim] += 1.0
    norm = float(np.linalg.norm(counts))
    return counts / norm if norm else counts


def mock_embed_corpus(corpus: AnnotatedCorpus, dim: int) -> EmbeddingStore:
    vectors: dict[str, np.ndarray] = {}
    for review in corpus:
        if review.review_id in vectors:
            raise EmbeddingError(f"duplicate review_id {review.review_id!r}")
        vectors[review.review_id] = mock_embed(review, dim)
    return EmbeddingStore(vectors)


def centroid(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Component-wise mean. Input order does not change the result only up
    to float rounding, so callers that need bit-stable output must pass a
    canonically ordered sequence."""
    if len(vectors) == 0:
        raise ValueError("centroid of an empty sequence")
    first = np.asarray(vectors[0], dtype=np.float64)
    for v in vectors[1:]:
        if np.asarray(v).shape != first.shape:
            raise ValueError("centroid over vectors of mixed dimensions")
    return np.stack([np.asarray(v, dtype=np.float64) for v in vectors]).mean(axis=0)


def euclidean(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))
