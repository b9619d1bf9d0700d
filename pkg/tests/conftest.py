import json
from pathlib import Path

import pytest

CORPUS_DIR = Path(__file__).parent / "corpus"
FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


def corpus_text(name: str) -> str:
    return (CORPUS_DIR / name).read_text()


def load_requirements(spec: dict):
    from spicebench.lint import TaskRequirements

    return TaskRequirements(
        required_analyses=frozenset(spec["analyses"]),
        supply_rail=spec["rail"],
        input_nodes=tuple(spec["inputs"]),
        output_nodes=tuple(spec["outputs"]),
        requires_temp=spec["requires_temp"],
    )


@pytest.fixture(scope="session")
def golden_manifest():
    raw = json.loads((CORPUS_DIR / "golden_manifest.json").read_text())
    return {name: load_requirements(spec) for name, spec in raw.items()}


@pytest.fixture(scope="session")
def mutation_manifest():
    raw = json.loads((CORPUS_DIR / "mutations" / "manifest.json").read_text())
    return {
        name: (entry["rule"], load_requirements(entry["requirements"]))
        for name, entry in raw.items()
    }
