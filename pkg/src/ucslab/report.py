"""Result serialization (JSON lines, CSV) and run manifests."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Iterable

FORMAT_VERSION = 1
SCHEMA = f"ucslab.v{FORMAT_VERSION}"

CONSTANT_COLUMNS = (
    "schema",
    "n",
    "k",
    "l",
    "class",
    "value_num",
    "value_den",
    "witness",
    "witness_s",
    "families_scanned",
    "canonical_scanned",
    "conjectured_num",
    "conjectured_den",
    "verdict",
    "manifest",
)


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    params: dict[str, Any]
    config: dict[str, Any]
    workers: int
    n: int | None = None
    strategy: str | None = None
    started: str = field(default_factory=utc_now)
    finished: str | None = None
    totals: dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @property
    def hash(self) -> str:
        """Identity of the run's results: command and result-affecting
        parameters only, so worker count and timestamps do not change it."""
        ident = {"format_version": self.format_version, "command": self.command, "params": self.params}
        blob = json.dumps(ident, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_json(self) -> str:
        data = asdict(self)
        data["hash"] = self.hash
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def stamp(records: Iterable[dict], manifest_hash: str) -> list[dict]:
    return [{"schema": SCHEMA, **r, "manifest": manifest_hash} for r in records]


def to_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=False, separators=(",", ":")) + "\n" for r in records)


def to_csv(records: Iterable[dict], columns: tuple[str, ...] = CONSTANT_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in records:
        writer.writerow(r)
    return buf.getvalue()
