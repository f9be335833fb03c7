"""frex-export: corpus file in, JSONL embeddings out."""

from __future__ import annotations

import argparse
import contextlib
import io
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .export import ExportConfig, export_embeddings
from .reader import read_review_texts_file

log = logging.getLogger("frex_exporter")


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    parent = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=f".{target.name}.",
                               suffix=target.suffix or ".tmp")
    os.close(fd)
    try:
        Path(tmp).write_text(text, encoding="utf-8")
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frex-export",
        description="embed review texts with a transformer encoder")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--corpus", required=True, help="review corpus file")
    parser.add_argument("--model", required=True,
                        help="Hugging Face model name or local path")
    parser.add_argument("--out", required=True, help="JSONL destination")
    parser.add_argument("--pooling", choices=("mean", "cls"), default="mean",
                        help="mean of word pieces (default) or the CLS vector")
    parser.add_argument("--batch-size", type=int, default=8, dest="batch_size")
    parser.add_argument("--max-length", type=int, default=256, dest="max_length")
    return parser


def main(argv=None) -> int:
    level = os.environ.get("FREX_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    try:
        reviews = read_review_texts_file(args.corpus)
        config = ExportConfig(args.model, args.pooling, args.batch_size,
                              args.max_length)
        buffer = io.StringIO()
        report = export_embeddings(reviews, config, buffer)
        _write_atomic(args.out, buffer.getvalue())
    except (ValueError, OSError) as exc:
        print(f"frex-export: {exc}", file=sys.stderr)
        log.debug("export failed", exc_info=True)
        return 1
    print(f"wrote {report.reviews} embeddings (dim {report.hidden_size}, "
          f"{report.truncated} truncated)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
