import json

import pytest

from spicebench.harness import AlreadyPresent, DatasetRecord, DatasetStore, InvalidRecord
from spicebench.lint import TaskRequirements
from spicebench.metrics import compute_metrics
from spicebench.netlist import flatten, parse_netlist, serialize

from conftest import corpus_text

REQ = TaskRequirements(
    required_analyses=frozenset({"tran"}),
    supply_rail=5.0,
    input_nodes=("in",),
    output_nodes=("out",),
)


def _record(netlist_text: str, task_id: int = 1) -> DatasetRecord:
    canonical = serialize(parse_netlist(netlist_text))
    flat = flatten(parse_netlist(canonical))
    return DatasetRecord(
        task_id=task_id,
        description="golden inverter",
        netlist=canonical,
        metrics=compute_metrics(flat),
        provenance={"provider": {"provider": "replay"}, "iterations": 1,
                    "manual_override": False},
        verdict_trail=("Pass",),
    )


def test_first_append_is_line_one(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    position = store.append(_record(corpus_text("inverter.sp")), REQ)
    assert position == 1
    assert len(store) == 1


def test_duplicate_rejected(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    record = _record(corpus_text("inverter.sp"))
    store.append(record, REQ)
    with pytest.raises(AlreadyPresent):
        store.append(record, REQ)


def test_same_netlist_different_task_allowed(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    store.append(_record(corpus_text("inverter.sp"), task_id=1), REQ)
    assert store.append(_record(corpus_text("inverter.sp"), task_id=2), REQ) == 2


def test_invalid_record_rejected(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    bad = _record(corpus_text("inverter.sp"))
    tampered = DatasetRecord(
        task_id=bad.task_id,
        description=bad.description,
        netlist=bad.netlist.replace("VDD vdd 0", "VDD vddx 0"),
        metrics=bad.metrics,
        provenance=bad.provenance,
        verdict_trail=bad.verdict_trail,
    )
    with pytest.raises(InvalidRecord):
        store.append(tampered, REQ)
    assert len(store) == 0


def test_unparseable_record_rejected(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    broken = DatasetRecord(
        task_id=1,
        description="broken",
        netlist="R1 1 0\n.end\n",
        metrics=_record(corpus_text("inverter.sp")).metrics,
    )
    with pytest.raises(InvalidRecord):
        store.append(broken)


def test_structure_only_validation_without_requirements(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    divider = _record(corpus_text("divider.sp"))
    # divider's mid node is a probe output; without requirements the
    # structure rules would flag it, so pass the requirement context
    req = TaskRequirements(required_analyses=frozenset({"op"}), supply_rail=10.0,
                           output_nodes=("mid",))
    assert store.append(divider, req) == 1


def test_export_byte_identical(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    store.append(_record(corpus_text("inverter.sp")), REQ)
    store.append(_record(corpus_text("inverter.sp"), task_id=2), REQ)
    out1 = store.export(tmp_path / "export1.jsonl")
    out2 = store.export(tmp_path / "export2.jsonl")
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() == (tmp_path / "data.jsonl").read_bytes()


def test_store_reload_keeps_dedupe(tmp_path):
    path = tmp_path / "data.jsonl"
    DatasetStore(path).append(_record(corpus_text("inverter.sp")), REQ)
    reopened = DatasetStore(path)
    assert len(reopened) == 1
    with pytest.raises(AlreadyPresent):
        reopened.append(_record(corpus_text("inverter.sp")), REQ)


def test_record_json_round_trip(tmp_path):
    store = DatasetStore(tmp_path / "data.jsonl")
    record = _record(corpus_text("inverter.sp"))
    store.append(record, REQ)
    loaded = store.records()[0]
    assert loaded == record
    raw = json.loads((tmp_path / "data.jsonl").read_text().splitlines()[0])
    assert list(raw) == [
        "task_id",
        "description",
        "netlist",
        "metrics",
        "gain",
        "gain_method",
        "provenance",
        "verdict_trail",
    ]
