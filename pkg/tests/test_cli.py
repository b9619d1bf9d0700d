"""CLI surface: exit codes, machine-readable stdout, config handling."""

import json

import pytest

from spicebench.cli import main

from conftest import CORPUS_DIR, corpus_text


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def inverter_file(tmp_path):
    path = tmp_path / "inverter.sp"
    path.write_text(corpus_text("inverter.sp"))
    return str(path)


@pytest.fixture()
def requirements_file(tmp_path):
    path = tmp_path / "req.json"
    path.write_text(
        json.dumps(
            {
                "analyses": ["tran"],
                "rail": 5.0,
                "inputs": ["in"],
                "outputs": ["out"],
                "requires_temp": False,
            }
        )
    )
    return str(path)


def test_parse_roundtrip(capsys, inverter_file):
    code, out, _ = run_cli(capsys, "parse", inverter_file)
    assert code == 0
    assert out.endswith(".end\n")
    assert "M1 out in vdd vdd PMOD" in out


def test_parse_failure_exits_one(capsys, tmp_path):
    bad = tmp_path / "bad.sp"
    bad.write_text("R1 1 0\n")
    code, out, err = run_cli(capsys, "parse", str(bad))
    assert code == 1
    assert out == ""
    assert "error" in err


def test_lint_valid_golden(capsys, inverter_file, requirements_file):
    code, out, _ = run_cli(capsys, "lint", inverter_file, "--requirements", requirements_file)
    assert code == 0
    blob = json.loads(out)
    assert blob["verdict"] == "valid"
    assert blob["diagnostics"] == []


def test_lint_task_reference(capsys, inverter_file):
    from spicebench.harness import default_suite_path

    code, out, _ = run_cli(
        capsys, "lint", inverter_file, "--task", f"{default_suite_path()}#13"
    )
    assert code == 0
    assert json.loads(out)["verdict"] == "valid"


def test_lint_invalid_exits_one(capsys, tmp_path, requirements_file):
    path = tmp_path / "broken.sp"
    path.write_text((CORPUS_DIR / "mutations" / "undriven_1.sp").read_text())
    code, out, _ = run_cli(capsys, "lint", str(path), "--requirements", requirements_file)
    assert code == 1
    blob = json.loads(out)
    assert blob["verdict"] == "invalid"
    assert any(d["rule"] == "UNDRIVEN_INPUT" for d in blob["diagnostics"])


def test_lint_without_context_is_config_error(capsys, inverter_file):
    code, _, err = run_cli(capsys, "lint", inverter_file)
    assert code == 2
    assert "config error" in err


def test_classify(capsys, inverter_file):
    code, out, _ = run_cli(capsys, "classify", inverter_file)
    assert code == 0
    blob = json.loads(out)
    assert blob["transistors"] == 2
    assert blob["difficulty"] == "easy"


def test_simulate_op_divider(capsys, tmp_path):
    path = tmp_path / "divider.sp"
    path.write_text(corpus_text("divider.sp"))
    code, out, _ = run_cli(capsys, "simulate", str(path), "--op")
    assert code == 0
    blob = json.loads(out)
    assert blob["node_voltages"]["mid"] == pytest.approx(5.0, abs=1e-6)
    assert blob["analysis"] == "op"


def test_simulate_dc_sweep(capsys, inverter_file):
    code, out, _ = run_cli(capsys, "simulate", inverter_file, "--dc", "VIN", "0", "5", "1")
    assert code == 0
    blob = json.loads(out)
    assert blob["values"] == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    assert blob["node_voltages"]["out"][0] > 4.5


def test_simulate_tran_csv_stdout(capsys, tmp_path):
    path = tmp_path / "rc.sp"
    path.write_text(corpus_text("rc_lowpass.sp"))
    code, out, _ = run_cli(capsys, "simulate", str(path), "--tran", "1e-5", "1e-3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "time,in,out"
    assert len(lines) == 102


def test_simulate_tran_csv_file(capsys, tmp_path):
    path = tmp_path / "rc.sp"
    path.write_text(corpus_text("rc_lowpass.sp"))
    csv_path = tmp_path / "wave.csv"
    code, out, _ = run_cli(
        capsys, "simulate", str(path), "--tran", "1e-5", "1e-3", "--csv", str(csv_path)
    )
    assert code == 0
    blob = json.loads(out)
    assert blob["samples"] == 101
    assert csv_path.read_text().startswith("time,in,out")


def test_simulate_nonconvergent_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.sp"
    path.write_text("V1 a 0 DC 5\nV2 a 0 DC 3\nR1 a 0 1k\n.end\n")
    code, _, err = run_cli(capsys, "simulate", str(path), "--op")
    assert code == 1
    assert "error" in err


def test_usage_errors_exit_two(capsys, inverter_file):
    with pytest.raises(SystemExit) as err:
        main(["simulate", inverter_file])  # missing analysis flag
    assert err.value.code == 2


def test_bad_config_exits_two(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{")
    code, _, err = run_cli(
        capsys,
        "bench", "run", "--config", str(config), "--provider", "replay",
        "--out", str(tmp_path / "out"),
    )
    assert code == 2
    assert "config error" in err


def test_live_provider_requires_api_key_env(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("SPICEBENCH_KEY", raising=False)
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "provider": {
                    "endpoint": "https://example.invalid/v1",
                    "model": "m",
                    "api_key_env": "SPICEBENCH_KEY",
                }
            }
        )
    )
    code, _, err = run_cli(
        capsys,
        "bench", "run", "--config", str(config), "--provider", "live",
        "--out", str(tmp_path / "out"),
    )
    assert code == 2
    assert "SPICEBENCH_KEY" in err


def test_dataset_export(capsys, tmp_path):
    store_path = tmp_path / "store.jsonl"
    store_path.write_text("")
    out_path = tmp_path / "export.jsonl"
    code, out, _ = run_cli(
        capsys, "dataset", "export", "--store", str(store_path), "--out", str(out_path)
    )
    assert code == 0
    assert json.loads(out)["records"] == 0
    assert out_path.exists()
