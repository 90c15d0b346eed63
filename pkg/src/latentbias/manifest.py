"""Run manifests: one JSON file per CLI invocation.

A manifest pins the command, the configuration snapshot, SHA-256 digests
of every input file, and the paths of every output, so a rerun can be
checked for reproducibility. The wall-time field is informational and is
the one field excluded from byte-identity comparisons.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(
    command: str,
    config: dict,
    inputs: dict[str, str | Path],
    outputs: dict[str, str | Path],
    wall_time_s: float,
    extra: dict | None = None,
) -> dict:
    from . import __version__

    doc = {
        "command": command,
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": sha256_file(p)} for name, p in inputs.items()},
        "outputs": {name: str(p) for name, p in outputs.items()},
        "wall_time_s": round(wall_time_s, 6),
        "library_version": __version__,
    }
    if extra:
        doc.update(extra)
    return doc


def write_manifest(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
