"""Atomic output files and run manifests.

Outputs are written to a temp file in the destination directory and moved
into place with os.replace, so a crash never leaves a half-written file
under the requested name.  Each command that produces files also drops a
``<out>.manifest.json`` recording the command, package version, resolved
options, and sha256 digests of every input and output.  Manifests carry no
timestamps: rerunning the same command on the same inputs yields an
identical manifest.
"""

from __future__ import annotations

import contextlib
import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__


@contextlib.contextmanager
def atomic_target(path: str | Path):
    """Yield a temp path that replaces ``path`` on a clean exit."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    # keep the real suffix so format-sniffing writers (matplotlib) behave
    fd, tmp = tempfile.mkstemp(dir=parent, prefix=f".{path.name}.",
                               suffix=path.suffix or ".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def write_text_atomic(path: str | Path, text: str) -> None:
    with atomic_target(path) as tmp:
        tmp.write_text(text, encoding="utf-8")


def write_json_atomic(path: str | Path, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return f"sha256:{digest.hexdigest()}"


def write_manifest(
    primary_out: str | Path,
    command: str,
    config: dict,
    inputs: list[str | Path],
    outputs: list[str | Path],
) -> Path:
    """Write ``<primary_out>.manifest.json`` and return its path."""
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": {str(p): sha256_of(p) for p in inputs},
        "outputs": {str(p): sha256_of(p) for p in outputs},
    }
    path = Path(f"{primary_out}.manifest.json")
    write_json_atomic(path, manifest)
    return path
