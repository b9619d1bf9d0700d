import json

import pytest

from spicebench.errors import DomainError
from spicebench.harness import Task, default_suite_path, load_tasks
from spicebench.harness.tasks import load_task
from spicebench.lint import TaskRequirements
from spicebench.metrics import Difficulty, classify_difficulty
from spicebench.sim import MinGain, TruthTable


def test_default_suite_loads():
    tasks = load_tasks(default_suite_path())
    assert len(tasks) == 20
    origins = {t.origin for t in tasks}
    assert origins == {"core", "extended"}
    assert sum(t.origin == "core" for t in tasks) == 12


def test_default_suite_tiers_follow_thresholds():
    # every declared tier must be reachable by a count inside the range
    for task in load_tasks(default_suite_path()):
        lo, hi = task.expected_transistor_range
        tiers = {classify_difficulty(n) for n in range(lo, hi + 1)}
        assert task.difficulty in tiers, task.name


def test_default_suite_functional_specs_parse():
    tasks = {t.name: t for t in load_tasks(default_suite_path())}
    inverter = tasks["CMOS Inverter"]
    assert isinstance(inverter.functional_spec, TruthTable)
    assert inverter.functional_spec.rows == (((0,), (1,)), ((1,), (0,)))
    cs = tasks["Common-Source Amplifier"]
    assert isinstance(cs.functional_spec, MinGain)
    assert cs.functional_spec.min_abs_gain == 0.8


def test_load_single_task():
    task = load_task(default_suite_path(), 13)
    assert task.name == "CMOS Inverter"
    with pytest.raises(DomainError):
        load_task(default_suite_path(), 9999)


def test_duplicate_ids_rejected(tmp_path):
    blob = json.loads(default_suite_path().read_text())
    blob[1]["id"] = blob[0]["id"]
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(blob))
    with pytest.raises(DomainError):
        load_tasks(path)


def test_empty_or_bad_files_rejected(tmp_path):
    path = tmp_path / "suite.json"
    path.write_text("[]")
    with pytest.raises(DomainError):
        load_tasks(path)
    path.write_text("not json")
    with pytest.raises(DomainError):
        load_tasks(path)
    with pytest.raises(DomainError):
        load_tasks(tmp_path / "missing.json")


def test_inconsistent_difficulty_rejected():
    with pytest.raises(DomainError):
        Task(
            id=1,
            name="bad",
            description="x",
            difficulty=Difficulty.EXTREME,
            expected_transistor_range=(2, 4),
            requirements=TaskRequirements(supply_rail=5.0),
        )


def test_bad_range_rejected():
    with pytest.raises(DomainError):
        Task(
            id=1,
            name="bad",
            description="x",
            difficulty=Difficulty.EASY,
            expected_transistor_range=(4, 2),
            requirements=TaskRequirements(supply_rail=5.0),
        )
