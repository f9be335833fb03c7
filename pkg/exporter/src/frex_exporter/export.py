"""Embed review texts with a Hugging Face encoder and stream JSONL."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TextIO

import torch
from transformers import AutoModel, AutoTokenizer

from .reader import ReviewText

log = logging.getLogger("frex_exporter")

_POOLINGS = ("mean", "cls")


@dataclass(frozen=True)
class ExportConfig:
    model_name: str
    pooling: str = "mean"
    batch_size: int = 8
    max_length: int = 256

    def __post_init__(self):
        if not self.model_name:
            raise ValueError("model_name must be set")
        if self.pooling not in _POOLINGS:
            raise ValueError(f"pooling must be one of {_POOLINGS}, "
                             f"got {self.pooling!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.max_length < 8:
            raise ValueError("max_length must be at least 8")


@dataclass(frozen=True)
class ExportReport:
    reviews: int
    truncated: int
    hidden_size: int


def _pool(last_hidden: torch.Tensor, attention_mask: torch.Tensor,
          special_mask: torch.Tensor, pooling: str) -> torch.Tensor:
    if pooling == "cls":
        return last_hidden[:, 0, :]
    # mean over real word pieces: padding and special tokens excluded
    keep = attention_mask.bool() & (special_mask == 0)
    weights = keep.unsqueeze(-1).to(last_hidden.dtype)
    summed = (last_hidden * weights).sum(dim=1)
    counts = weights.sum(dim=1).clamp(min=1.0)
    return summed / counts


def export_embeddings(reviews: Sequence[ReviewText], config: ExportConfig,
                      dest: TextIO) -> ExportReport:
    """Write one ``{"review_id": ..., "vector": [...]}`` line per review."""
    if not reviews:
        raise ValueError("no reviews to embed")
    ids = [r.review_id for r in reviews]
    if len(set(ids)) != len(ids):
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate review ids: {duplicates}")

    tokenizer = AutoTokenizer.from_pretrained(config.model_name)
    model = AutoModel.from_pretrained(config.model_name)
    model.eval()
    hidden_size = model.config.hidden_size

    truncated = 0
    written = 0
    with torch.no_grad():
        for start in range(0, len(reviews), config.batch_size):
            batch = reviews[start:start + config.batch_size]
            texts = [r.text for r in batch]
            full = tokenizer(texts, truncation=False)["input_ids"]
            truncated += sum(1 for ids_ in full if len(ids_) > config.max_length)
            encoded = tokenizer(
                texts, padding=True, truncation=True,
                max_length=config.max_length, return_tensors="pt",
                return_special_tokens_mask=True)
            special_mask = encoded.pop("special_tokens_mask")
            output = model(**encoded)
            vectors = _pool(output.last_hidden_state,
                            encoded["attention_mask"], special_mask,
                            config.pooling)
            for review, vector in zip(batch, vectors):
                dest.write(json.dumps(
                    {"review_id": review.review_id,
                     "vector": [float(x) for x in vector]},
                    separators=(",", ":")) + "\n")
                written += 1
            log.debug("embedded %d/%d", written, len(reviews))

    return ExportReport(written, truncated, hidden_size)
