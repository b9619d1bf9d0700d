"""Suite execution with incremental persistence and resume.

Each completed task appends one JSONL record (task id, provider identity,
timestamp, all attempt transcripts) to the records file. Re-running the same
suite against the same provider identity skips tasks that already have a
record, so an interrupted run resumes at the first incomplete task. Passing
attempts are proposed to the dataset store; duplicates are ignored.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..errors import DomainError
from ..metrics import compute_metrics
from ..netlist import flatten, parse_netlist, serialize
from ..sim import MinGain, SimOptions
from .dataset import AlreadyPresent, DatasetRecord, DatasetStore, InvalidRecord
from .loop import Attempt, Verdict, repair_loop
from .prompt import PromptTemplate, default_prompt_template
from .provider import Provider
from .tasks import Task

log = logging.getLogger(__name__)


@dataclass
class RunRecord:
    task_id: int
    provider: dict
    timestamp: str
    attempts: list = field(default_factory=list)  # Attempt or plain dict when loaded

    @property
    def n(self) -> int:
        return len(self.attempts)

    @property
    def c(self) -> int:
        count = 0
        for a in self.attempts:
            verdict = a.final_verdict.value if isinstance(a, Attempt) else a["final_verdict"]
            if verdict == Verdict.PASS.value:
                count += 1
        return count

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "provider": self.provider,
            "timestamp": self.timestamp,
            "c": self.c,
            "attempts": [
                a.to_dict() if isinstance(a, Attempt) else a for a in self.attempts
            ],
        }

    @staticmethod
    def from_dict(blob: dict) -> "RunRecord":
        return RunRecord(
            task_id=blob["task_id"],
            provider=blob["provider"],
            timestamp=blob["timestamp"],
            attempts=blob["attempts"],
        )


def _identity_key(task_id: int, provider_identity: dict) -> tuple:
    return (task_id, json.dumps(provider_identity, sort_keys=True))


def load_run_records(path_or_dir: str | Path) -> list[RunRecord]:
    """Read run records from a JSONL file or every ``*.jsonl`` in a directory."""
    root = Path(path_or_dir)
    if root.is_dir():
        files = sorted(root.glob("*.jsonl"))
    elif root.exists():
        files = [root]
    else:
        raise DomainError(f"no run records at {path_or_dir}")
    records = []
    for file in files:
        for line in file.read_text().splitlines():
            if line.strip():
                records.append(RunRecord.from_dict(json.loads(line)))
    return records


def _dataset_record(task: Task, attempt: Attempt, provider_identity: dict) -> DatasetRecord | None:
    text = attempt.final_netlist_text()
    if text is None:
        return None
    flat = flatten(parse_netlist(text))
    metrics = compute_metrics(flat)
    gain = gain_method = None
    if isinstance(task.functional_spec, MinGain):
        final = attempt.iterations[-1]
        if final.functional and final.functional.get("gain") is not None:
            gain = final.functional["gain"]
            gain_method = "dc_finite_difference"
    return DatasetRecord(
        task_id=task.id,
        description=task.description,
        netlist=serialize(parse_netlist(text)),
        metrics=metrics,
        gain=gain,
        gain_method=gain_method,
        provenance={
            "provider": provider_identity,
            "iterations": attempt.iterations_used,
            "manual_override": False,
        },
        verdict_trail=tuple(r.verdict.value for r in attempt.iterations),
    )


def run_benchmark(
    tasks: list[Task],
    provider: Provider,
    n_attempts: int,
    max_iters: int,
    options: SimOptions | None = None,
    records_path: str | Path = "records.jsonl",
    dataset: DatasetStore | None = None,
    template: PromptTemplate | None = None,
    concurrency: int = 1,
) -> list[RunRecord]:
    """Run ``n_attempts`` independent repair-loop attempts per task.

    Attempt-level failures are data, never exceptions; only configuration
    errors abort the run.
    """
    if n_attempts < 1:
        raise DomainError("n_attempts must be >= 1")
    if max_iters < 1:
        raise DomainError("max_iters must be >= 1")
    if concurrency < 1:
        raise DomainError("concurrency must be >= 1")
    options = options or SimOptions()
    template = template or default_prompt_template()
    records_path = Path(records_path)
    records_path.parent.mkdir(parents=True, exist_ok=True)

    identity = provider.identity()
    done: dict[tuple, RunRecord] = {}
    if records_path.exists():
        for record in load_run_records(records_path):
            done[_identity_key(record.task_id, record.provider)] = record

    results: list[RunRecord] = []
    for task in tasks:
        key = _identity_key(task.id, identity)
        if key in done:
            log.info("task %d already recorded; skipping", task.id)
            results.append(done[key])
            continue

        if concurrency == 1:
            attempts = [
                repair_loop(provider, task, template, max_iters, options)
                for _ in range(n_attempts)
            ]
        else:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                attempts = list(
                    pool.map(
                        lambda _: repair_loop(provider, task, template, max_iters, options),
                        range(n_attempts),
                    )
                )

        record = RunRecord(
            task_id=task.id,
            provider=identity,
            timestamp=datetime.now(timezone.utc).isoformat(),
            attempts=attempts,
        )
        with open(records_path, "a") as fh:
            fh.write(json.dumps(record.to_dict(), sort_keys=False) + "\n")
        results.append(record)

        if dataset is not None:
            for attempt in attempts:
                if not attempt.passed:
                    continue
                ds_record = _dataset_record(task, attempt, identity)
                if ds_record is None:
                    continue
                try:
                    dataset.append(ds_record, task.requirements)
                except AlreadyPresent:
                    pass
                except InvalidRecord as err:
                    log.warning("task %d: passing netlist rejected by store: %s", task.id, err)
    return results
