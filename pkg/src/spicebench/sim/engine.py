"""Adapter for running an external SPICE engine as a subprocess.

The engine command is a template with a ``{netlist}`` placeholder; the
canonical netlist is written to ``circuit.sp`` inside the given working
directory, stdout/stderr are captured to files, and a whitespace-delimited
node-voltage table is parsed from stdout when one is recognizable. Absence of
the engine binary reports EngineUnavailable; it is never a silent failure and
callers treat it as "cross-check skipped"."""

from __future__ import annotations

import re
import shlex
import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

from ..errors import SpicebenchError
from ..netlist import Netlist, canonical_node, serialize

_PRINT_STYLE = re.compile(r"^\s*v\((\S+)\)\s*=?\s*([-+0-9.eEdD]+)\s*$", re.IGNORECASE)
_TWO_COLUMN = re.compile(r"^\s*(\S+)\s+([-+]?[0-9][0-9.eEdD+-]*)\s*$")


class EngineUnavailable(SpicebenchError):
    def __init__(self, command: str):
        super().__init__(f"engine executable not found: {command}")


class EngineTimeout(SpicebenchError):
    def __init__(self, seconds: float):
        super().__init__(f"engine run exceeded {seconds:g}s")


class EngineNonzeroExit(SpicebenchError):
    def __init__(self, code: int, stderr_excerpt: str):
        self.code = code
        self.stderr_excerpt = stderr_excerpt
        super().__init__(f"engine exited with status {code}: {stderr_excerpt!r}")


@dataclass
class EngineResult:
    returncode: int
    netlist_path: Path
    stdout_path: Path
    stderr_path: Path
    node_voltages: dict[str, float] | None


def _parse_node_table(text: str) -> dict[str, float] | None:
    voltages: dict[str, float] = {}
    for line in text.splitlines():
        m = _PRINT_STYLE.match(line) or _TWO_COLUMN.match(line)
        if not m:
            continue
        name, raw = m.groups()
        try:
            value = float(raw.replace("D", "E").replace("d", "e"))
        except ValueError:
            continue
        voltages[canonical_node(name)] = value
    return voltages or None


def external_engine_run(
    netlist: Netlist,
    engine_command: str,
    workdir: str | Path,
    timeout: float = 60.0,
) -> EngineResult:
    """Serialize the netlist, run the engine, capture artifacts.

    Each run should get its own ``workdir`` so concurrent runs cannot
    collide."""
    if "{netlist}" not in engine_command:
        raise SpicebenchError("engine command template must contain {netlist}")
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    netlist_path = workdir / "circuit.sp"
    netlist_path.write_text(serialize(netlist))

    argv = shlex.split(engine_command.format(netlist=str(netlist_path)))
    if shutil.which(argv[0]) is None:
        raise EngineUnavailable(argv[0])

    try:
        proc = subprocess.run(
            argv,
            cwd=workdir,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired:
        raise EngineTimeout(timeout) from None

    stdout_path = workdir / "stdout.txt"
    stderr_path = workdir / "stderr.txt"
    stdout_path.write_text(proc.stdout)
    stderr_path.write_text(proc.stderr)
    if proc.returncode != 0:
        raise EngineNonzeroExit(proc.returncode, proc.stderr[:400])

    return EngineResult(
        returncode=proc.returncode,
        netlist_path=netlist_path,
        stdout_path=stdout_path,
        stderr_path=stderr_path,
        node_voltages=_parse_node_table(proc.stdout),
    )
