"""External engine adapter, exercised against a stand-in engine script."""

import stat
import sys
import textwrap

import pytest

from spicebench.netlist import parse_netlist
from spicebench.sim import (
    EngineNonzeroExit,
    EngineTimeout,
    EngineUnavailable,
    external_engine_run,
)

from conftest import corpus_text


def _fake_engine(tmp_path, body: str) -> str:
    """Write a python script that plays the role of the engine binary."""
    script = tmp_path / "fake_engine.py"
    script.write_text(textwrap.dedent(body))
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    return f"{sys.executable} {script} {{netlist}}"


def test_engine_unavailable():
    n = parse_netlist(corpus_text("divider.sp"))
    with pytest.raises(EngineUnavailable):
        external_engine_run(n, "definitely-not-a-spice-binary -b {netlist}", "/tmp/x")


def test_smoke_run_and_artifacts(tmp_path):
    cmd = _fake_engine(
        tmp_path,
        """
        import sys
        print("fake engine processed", sys.argv[1])
        """,
    )
    n = parse_netlist(corpus_text("divider.sp"))
    result = external_engine_run(n, cmd, tmp_path / "run1")
    assert result.returncode == 0
    assert result.netlist_path.name == "circuit.sp"
    assert "R1 top mid" in result.netlist_path.read_text()
    assert "fake engine processed" in result.stdout_path.read_text()
    assert result.node_voltages is None


def test_node_table_parsing(tmp_path):
    cmd = _fake_engine(
        tmp_path,
        """
        print("Node voltages:")
        print("mid   5.000000e+00")
        print("top   1.000000e+01")
        print("v(extra) = 2.5")
        """,
    )
    n = parse_netlist(corpus_text("divider.sp"))
    result = external_engine_run(n, cmd, tmp_path / "run2")
    assert result.node_voltages == {"mid": 5.0, "top": 10.0, "extra": 2.5}


def test_cross_check_against_internal_solver(tmp_path):
    from spicebench.sim import dc_operating_point

    cmd = _fake_engine(
        tmp_path,
        """
        print("mid 5.000000e+00")
        """,
    )
    n = parse_netlist(corpus_text("divider.sp"))
    engine = external_engine_run(n, cmd, tmp_path / "run3")
    internal = dc_operating_point(n)
    assert abs(engine.node_voltages["mid"] - internal.v("mid")) < 1e-6


def test_nonzero_exit(tmp_path):
    cmd = _fake_engine(
        tmp_path,
        """
        import sys
        print("something broke", file=sys.stderr)
        sys.exit(3)
        """,
    )
    n = parse_netlist(corpus_text("divider.sp"))
    with pytest.raises(EngineNonzeroExit) as err:
        external_engine_run(n, cmd, tmp_path / "run4")
    assert err.value.code == 3
    assert "something broke" in err.value.stderr_excerpt


def test_timeout(tmp_path):
    cmd = _fake_engine(
        tmp_path,
        """
        import time
        time.sleep(5)
        """,
    )
    n = parse_netlist(corpus_text("divider.sp"))
    with pytest.raises(EngineTimeout):
        external_engine_run(n, cmd, tmp_path / "run5", timeout=0.3)


def test_template_must_have_placeholder(tmp_path):
    from spicebench.errors import SpicebenchError

    n = parse_netlist(corpus_text("divider.sp"))
    with pytest.raises(SpicebenchError):
        external_engine_run(n, "ngspice -b", tmp_path)
