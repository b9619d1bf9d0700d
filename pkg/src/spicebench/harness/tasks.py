"""Benchmark task definitions and the JSON suite loader.

A suite file is a JSON array of task objects:

    {
      "id": 1,
      "name": "CMOS Inverter",
      "description": "Design a ...",
      "difficulty": "easy",
      "expected_transistors": [2, 4],
      "requirements": {"analyses": ["tran"], "rail": 5.0,
                        "inputs": ["in"], "outputs": ["out"],
                        "requires_temp": false},
      "functional": {"type": "truth_table", ...} | {"type": "min_gain", ...},
      "origin": "core" | "extended"
    }

``functional`` and ``origin`` are optional. The packaged default suite mixes
the canonical benchmark rows (origin "core") with reconstructed extras
(origin "extended"); the origin tag records which is which.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import DomainError
from ..lint import TaskRequirements
from ..metrics import Difficulty, classify_difficulty
from ..sim import FunctionalSpec, MinGain, TruthTable


@dataclass(frozen=True)
class Task:
    id: int
    name: str
    description: str
    difficulty: Difficulty
    expected_transistor_range: tuple[int, int]
    requirements: TaskRequirements
    functional_spec: FunctionalSpec | None = None
    origin: str = "core"

    def __post_init__(self):
        lo, hi = self.expected_transistor_range
        if lo < 0 or hi < lo:
            raise DomainError(f"task {self.id}: bad transistor range [{lo}, {hi}]")
        # the declared tier must be reachable within the expected range
        if not (
            classify_difficulty(lo).order
            <= self.difficulty.order
            <= classify_difficulty(hi).order
        ):
            raise DomainError(
                f"task {self.id}: difficulty {self.difficulty.value} inconsistent "
                f"with transistor range [{lo}, {hi}]"
            )


def _parse_functional(blob: dict | None) -> FunctionalSpec | None:
    if blob is None:
        return None
    kind = blob.get("type")
    if kind == "truth_table":
        return TruthTable(
            inputs=tuple(blob["inputs"]),
            outputs=tuple(blob["outputs"]),
            rows=tuple((tuple(i), tuple(o)) for i, o in blob["rows"]),
            rail=float(blob["rail"]),
            v_low_max=float(blob.get("v_low_max", 0.1)),
            v_high_min=float(blob.get("v_high_min", 0.9)),
        )
    if kind == "min_gain":
        return MinGain(
            input_source=blob["input_source"],
            output_node=blob["output_node"],
            min_abs_gain=float(blob["min_abs_gain"]),
        )
    raise DomainError(f"unknown functional spec type: {kind!r}")


def _parse_task(blob: dict) -> Task:
    req = blob["requirements"]
    requirements = TaskRequirements(
        required_analyses=frozenset(req.get("analyses", [])),
        supply_rail=float(req["rail"]),
        input_nodes=tuple(req.get("inputs", [])),
        output_nodes=tuple(req.get("outputs", [])),
        requires_temp=bool(req.get("requires_temp", False)),
    )
    lo, hi = blob["expected_transistors"]
    return Task(
        id=int(blob["id"]),
        name=blob["name"],
        description=blob["description"],
        difficulty=Difficulty(blob["difficulty"]),
        expected_transistor_range=(int(lo), int(hi)),
        requirements=requirements,
        functional_spec=_parse_functional(blob.get("functional")),
        origin=blob.get("origin", "core"),
    )


def load_tasks(path: str | Path) -> list[Task]:
    """Load and validate a task suite. Task ids must be unique."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise DomainError(f"cannot load task suite {path}: {err}") from err
    if not isinstance(raw, list) or not raw:
        raise DomainError(f"task suite {path} must be a non-empty JSON array")
    tasks = [_parse_task(blob) for blob in raw]
    ids = [t.id for t in tasks]
    if len(ids) != len(set(ids)):
        raise DomainError("task ids must be unique within a suite")
    return tasks


def load_task(path: str | Path, task_id: int) -> Task:
    for task in load_tasks(path):
        if task.id == task_id:
            return task
    raise DomainError(f"no task with id {task_id} in {path}")


def default_suite_path() -> Path:
    """Filesystem path of the packaged default task suite."""
    return Path(str(resources.files("spicebench").joinpath("data/tasks.json")))
