"""Checkpoint files for long enumeration runs.

Layout (text, three lines)::

    ucslab-checkpoint format=1 n=5 strategy=recursive
    {"token": ..., ...}
    sha256=<hex digest of line 2>
"""
from __future__ import annotations

import hashlib
import json
import os
import re
from pathlib import Path
from typing import Any

FORMAT_VERSION = 1
MAGIC = "ucslab-checkpoint"
_HEADER_RE = re.compile(rf"^{MAGIC} format=(\d+) n=(\d+) strategy=(\w+)$")


class CheckpointError(Exception):
    """Unreadable, truncated or tampered checkpoint."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint written by an incompatible format version."""


class CheckpointMismatchError(CheckpointError):
    """Checkpoint belongs to a different run (n, strategy or job identity)."""


def write_checkpoint(path: str | os.PathLike, n: int, strategy: str, payload: dict[str, Any]) -> None:
    path = Path(path)
    body = json.dumps(payload, separators=(",", ":"), sort_keys=True)
    digest = hashlib.sha256(body.encode()).hexdigest()
    text = f"{MAGIC} format={FORMAT_VERSION} n={n} strategy={strategy}\n{body}\nsha256={digest}\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def read_checkpoint(
    path: str | os.PathLike, n: int | None = None, strategy: str | None = None
) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except UnicodeDecodeError as exc:
        raise CheckpointError(f"{path}: not a text checkpoint") from exc
    lines = text.split("\n")
    if len(lines) < 3 or not lines[0].startswith(MAGIC):
        raise CheckpointError(f"{path}: missing checkpoint header")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise CheckpointError(f"{path}: malformed header {lines[0]!r}")
    version, file_n, file_strategy = int(m.group(1)), int(m.group(2)), m.group(3)
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    body, trailer = lines[1], lines[2]
    if trailer != "sha256=" + hashlib.sha256(body.encode()).hexdigest():
        raise CheckpointError(f"{path}: checksum mismatch")
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: undecodable payload") from exc
    if n is not None and file_n != n:
        raise CheckpointMismatchError(f"{path}: checkpoint is for n={file_n}, run has n={n}")
    if strategy is not None and file_strategy != strategy:
        raise CheckpointMismatchError(f"{path}: checkpoint is for strategy {file_strategy}, run uses {strategy}")
    return payload
