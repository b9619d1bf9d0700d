"""Functional verification: digital truth tables via per-row DC solves, and
minimum small-signal gain checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..errors import DomainError
from ..netlist import Netlist, VSource, canonical_node
from .mna import SimOptions, SimulationError, dc_operating_point, small_signal_gain


@dataclass(frozen=True)
class TruthTable:
    """Digital behavior spec.

    ``inputs`` names the voltage sources that drive the logic inputs; a bit of
    1 drives the rail, 0 drives ground. Output nodes read high when at or
    above ``v_high_min * rail`` and low when at or below ``v_low_max * rail``.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    rail: float
    v_low_max: float = 0.1
    v_high_min: float = 0.9

    def __post_init__(self):
        if self.rail <= 0:
            raise DomainError("rail must be > 0")
        vectors = [tuple(i) for i, _ in self.rows]
        if len(vectors) != len(set(vectors)):
            raise DomainError("truth table rows must cover distinct input vectors")
        for ins, outs in self.rows:
            if len(ins) != len(self.inputs) or len(outs) != len(self.outputs):
                raise DomainError("row arity does not match inputs/outputs")
            if not all(bit in (0, 1) for bit in (*ins, *outs)):
                raise DomainError("truth table bits must be 0 or 1")


@dataclass(frozen=True)
class MinGain:
    input_source: str
    output_node: str
    min_abs_gain: float

    def __post_init__(self):
        if self.min_abs_gain <= 0:
            raise DomainError("min_abs_gain must be > 0")


FunctionalSpec = Union[TruthTable, MinGain]


@dataclass(frozen=True)
class RowResult:
    inputs: tuple[int, ...]
    expected: tuple[int, ...]
    measured: tuple[float, ...]
    ok: bool
    reason: str | None = None


@dataclass(frozen=True)
class FunctionalResult:
    passed: bool
    kind: str
    reason: str | None = None
    rows: tuple[RowResult, ...] = ()
    gain: float | None = None
    unsimulatable: bool = False

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "kind": self.kind,
            "reason": self.reason,
            "gain": self.gain,
            "unsimulatable": self.unsimulatable,
            "rows": [
                {
                    "inputs": list(r.inputs),
                    "expected": list(r.expected),
                    "measured": list(r.measured),
                    "ok": r.ok,
                    "reason": r.reason,
                }
                for r in self.rows
            ],
        }


def _classify(v: float, spec: TruthTable) -> int | None:
    if v <= spec.v_low_max * spec.rail:
        return 0
    if v >= spec.v_high_min * spec.rail:
        return 1
    return None


def functional_check(
    netlist: Netlist, spec: FunctionalSpec, options: SimOptions | None = None
) -> FunctionalResult:
    """Run the functional spec against a flattened netlist.

    Solver failures are reported as a failed result with
    ``unsimulatable=True`` rather than raised, so a judging pipeline can
    treat them as a verdict."""
    options = options or SimOptions()
    if isinstance(spec, TruthTable):
        return _check_truth_table(netlist, spec, options)
    return _check_min_gain(netlist, spec, options)


def _check_truth_table(
    netlist: Netlist, spec: TruthTable, options: SimOptions
) -> FunctionalResult:
    source_names = {e.name for e in netlist.elements if isinstance(e, VSource)}
    for src in spec.inputs:
        if src.upper() not in source_names:
            raise DomainError(f"truth table input {src} is not a V source in the netlist")

    rows: list[RowResult] = []
    first_fail: str | None = None
    for row_no, (bits, expected) in enumerate(spec.rows):
        overrides = {
            src.upper(): (spec.rail if bit else 0.0)
            for src, bit in zip(spec.inputs, bits)
        }
        try:
            solution = dc_operating_point(netlist, options, source_overrides=overrides)
        except SimulationError as err:
            reason = f"Unsimulatable: row {row_no} {bits}: {err}"
            return FunctionalResult(
                passed=False,
                kind="truth_table",
                reason=reason,
                rows=tuple(rows),
                unsimulatable=True,
            )
        measured = tuple(solution.v(node) for node in spec.outputs)
        row_ok = True
        row_reason = None
        for node, want, got in zip(spec.outputs, expected, measured):
            level = _classify(got, spec)
            if level != want:
                row_ok = False
                row_reason = (
                    f"row {row_no} {bits}: output {canonical_node(node)} expected "
                    f"{want}, measured {got:.4f} V"
                )
                break
        rows.append(RowResult(tuple(bits), tuple(expected), measured, row_ok, row_reason))
        if not row_ok and first_fail is None:
            first_fail = row_reason
    return FunctionalResult(
        passed=first_fail is None,
        kind="truth_table",
        reason=first_fail,
        rows=tuple(rows),
    )


def _check_min_gain(
    netlist: Netlist, spec: MinGain, options: SimOptions
) -> FunctionalResult:
    try:
        gain = small_signal_gain(
            netlist, spec.input_source, spec.output_node, options=options
        )
    except SimulationError as err:
        return FunctionalResult(
            passed=False,
            kind="min_gain",
            reason=f"Unsimulatable: {err}",
            unsimulatable=True,
        )
    ok = abs(gain) >= spec.min_abs_gain
    reason = None
    if not ok:
        reason = (
            f"|gain| = {abs(gain):.4g} below required {spec.min_abs_gain:g} "
            f"({spec.input_source} -> {spec.output_node})"
        )
    return FunctionalResult(passed=ok, kind="min_gain", reason=reason, gain=gain)
