"""Append-only JSON Lines store of validated circuit records.

Every record is re-validated at append time (parse + flatten + lint) and
deduplicated on (task_id, canonical netlist hash). Exports copy the store
verbatim, so exporting twice without intervening appends yields byte-identical
files.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import SpicebenchError
from ..lint import TaskRequirements, lint, structure_report
from ..metrics import CircuitMetrics, Difficulty, compute_metrics
from ..netlist import ParseError, RecursionDetected, SubcktArityError, UnknownSubckt, flatten, parse_netlist, serialize


class InvalidRecord(SpicebenchError):
    pass


class AlreadyPresent(SpicebenchError):
    def __init__(self, task_id: int, digest: str):
        super().__init__(f"record for task {task_id} with netlist {digest[:12]} already stored")


@dataclass(frozen=True)
class DatasetRecord:
    task_id: int
    description: str
    netlist: str  # canonical serialized form
    metrics: CircuitMetrics
    gain: float | None = None
    gain_method: str | None = None
    provenance: dict = field(default_factory=dict)
    verdict_trail: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "description": self.description,
            "netlist": self.netlist,
            "metrics": self.metrics.to_dict(),
            "gain": self.gain,
            "gain_method": self.gain_method,
            "provenance": self.provenance,
            "verdict_trail": list(self.verdict_trail),
        }

    @staticmethod
    def from_dict(blob: dict) -> "DatasetRecord":
        m = blob["metrics"]
        metrics = CircuitMetrics(
            transistor_count=m["transistors"],
            node_count=m["nodes"],
            element_counts=dict(m["elements"]),
            difficulty=Difficulty(m["difficulty"]),
        )
        return DatasetRecord(
            task_id=blob["task_id"],
            description=blob["description"],
            netlist=blob["netlist"],
            metrics=metrics,
            gain=blob.get("gain"),
            gain_method=blob.get("gain_method"),
            provenance=blob.get("provenance", {}),
            verdict_trail=tuple(blob.get("verdict_trail", [])),
        )


def _netlist_digest(netlist_text: str) -> str:
    return hashlib.sha256(netlist_text.encode("utf-8")).hexdigest()


class DatasetStore:
    """One JSONL file; appends are serialized through a lock."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seen: set[tuple[int, str]] = set()
        self._count = 0
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                if not line.strip():
                    continue
                blob = json.loads(line)
                self._seen.add((blob["task_id"], _netlist_digest(blob["netlist"])))
                self._count += 1

    def __len__(self) -> int:
        return self._count

    def records(self) -> list[DatasetRecord]:
        if not self.path.exists():
            return []
        return [
            DatasetRecord.from_dict(json.loads(line))
            for line in self.path.read_text().splitlines()
            if line.strip()
        ]

    def append(self, record: DatasetRecord, requirements: TaskRequirements | None = None) -> int:
        """Validate and append; returns the record's 1-based position.

        With ``requirements`` the full rule set re-runs; without, the
        requirement-independent subset does. Either way an Error-severity
        diagnostic rejects the record.
        """
        try:
            flat = flatten(parse_netlist(record.netlist))
        except (ParseError, UnknownSubckt, RecursionDetected, SubcktArityError) as err:
            raise InvalidRecord(f"stored netlist no longer parses: {err}") from err
        if requirements is not None:
            report = lint(flat, requirements)
        else:
            report = structure_report(flat)
        if not report.valid:
            rules = sorted({d.rule_id for d in report.errors()})
            raise InvalidRecord(f"stored netlist fails lint: {', '.join(rules)}")

        key = (record.task_id, _netlist_digest(record.netlist))
        with self._lock:
            if key in self._seen:
                raise AlreadyPresent(*key)
            line = json.dumps(record.to_dict(), sort_keys=False)
            with open(self.path, "a") as fh:
                fh.write(line + "\n")
            self._seen.add(key)
            self._count += 1
            return self._count

    def export(self, path: str | Path) -> Path:
        """Copy the store to ``path`` byte-for-byte (empty store, empty file)."""
        out = Path(path)
        data = self.path.read_bytes() if self.path.exists() else b""
        out.write_bytes(data)
        return out
