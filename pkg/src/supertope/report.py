"""Report assembly and atomic file output.

Every command emits the same envelope: fixed top-level sections, each either
populated or the string ``"skipped"``, plus a command-specific ``details``
object.  Wall-clock data lives only under ``timings``.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__

SECTIONS = (
    "vertex_count",
    "quadric_space_dim",
    "is_pd",
    "delaunay",
    "theorem_audit",
    "gram",
    "skeleton",
    "simplices",
)

SKIPPED = "skipped"


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Report:
    def __init__(self, command: str, n: int | None = None):
        self.command = command
        self.n = n
        self.sections: dict = {k: SKIPPED for k in SECTIONS}
        self.details: dict = {}
        self.inputs: dict = {"config_digest": None, "input_digest": None}
        self.timings: dict[str, float] = {}
        self.status = "failed"

    def set(self, key: str, value) -> None:
        if key not in SECTIONS:
            raise KeyError(key)
        self.sections[key] = value

    def to_dict(self) -> dict:
        return {
            "tool_version": __version__,
            "command": self.command,
            "n": self.n,
            "status": self.status,
            **self.inputs,
            **self.sections,
            "details": self.details,
            "timings": {k: round(v, 6) for k, v in sorted(self.timings.items())},
        }

    def dumps(self) -> str:
        return dumps(self.to_dict())


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def strip_timings(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timings"}


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
