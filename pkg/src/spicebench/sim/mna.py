"""Modified nodal analysis: DC operating point, DC sweep, small-signal gain.

Unknowns are the non-ground node voltages followed by one branch current per
voltage-defined element (independent V sources, and inductors at DC where
they act as zero-volt branches). Capacitors are open at DC. MOSFETs iterate
under damped Newton-Raphson with the square-law model from
:mod:`spicebench.sim.device`; a gmin conductance from every node to ground is
always applied so floating subgraphs cannot make the matrix singular.

Convergence requires every node-voltage update to drop below
``vntol + reltol * |v|`` and the KCL residual at every node to drop below
``abstol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, SpicebenchError
from ..netlist import (
    Bjt,
    Capacitor,
    Inductor,
    ISource,
    Mosfet,
    Netlist,
    Resistor,
    SubcktInstance,
    VSource,
    canonical_node,
    is_ground,
)
from .device import mos_current
from .sources import waveform_value

# per-iteration limit on node-voltage updates; generous but keeps Newton from
# overshooting hard on stiff MOS circuits
_STEP_LIMIT = 1.0


class SimulationError(SpicebenchError):
    """Base class for solver failures."""


class NonConvergence(SimulationError):
    def __init__(self, iterations: int, detail: str = ""):
        self.iterations = iterations
        msg = f"Newton iteration did not converge after {iterations} iterations"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class SingularMatrix(SimulationError):
    def __init__(self, detail: str = ""):
        super().__init__("singular MNA matrix" + (f" ({detail})" if detail else ""))


class UnsupportedElement(SimulationError):
    def __init__(self, name: str, why: str):
        self.name = name
        super().__init__(f"{name}: {why}")


@dataclass(frozen=True)
class SimOptions:
    abstol: float = 1e-12
    reltol: float = 1e-6
    vntol: float = 1e-9
    gmin: float = 1e-12
    max_newton_iter: int = 200
    temp_celsius: float = 27.0

    def __post_init__(self):
        for name in ("abstol", "reltol", "vntol", "gmin"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0")


@dataclass
class DcSolution:
    """Converged operating point. ``node_voltages`` includes ground at 0.0;
    ``source_currents`` holds branch currents of voltage-defined elements
    (positive into the + terminal and out of the - terminal)."""

    node_voltages: dict[str, float]
    source_currents: dict[str, float]
    iterations_used: int
    converged: bool = True

    def v(self, node: str) -> float:
        return self.node_voltages[canonical_node(node)]


@dataclass
class DcSweepResult:
    source: str
    values: list[float] = field(default_factory=list)
    solutions: list[DcSolution] = field(default_factory=list)

    def voltages(self, node: str) -> list[float]:
        return [s.v(node) for s in self.solutions]


def effective_temperature(netlist: Netlist, options: SimOptions) -> float:
    """Reported simulation temperature: the first .temp directive wins,
    otherwise the option default. Device equations do not use it."""
    temps = netlist.temp_directives()
    return temps[0].celsius if temps else options.temp_celsius


@dataclass(frozen=True)
class _MosInfo:
    element: Mosfet
    kind: str
    vto: float
    beta: float
    lam: float


def _mos_info(e: Mosfet, netlist: Netlist) -> _MosInfo:
    card = netlist.models.get(e.params.model)
    if card is None:
        raise UnsupportedElement(e.name, f"references missing model {e.params.model}")
    if not card.is_mos:
        raise UnsupportedElement(e.name, f"bound to non-MOS model {card.name}")
    vto_default = 1.0 if card.kind == "NMOS" else -1.0
    vto = card.params.get("VTO", vto_default)
    kp = card.params.get("KP", 2e-5)
    lam = card.params.get("LAMBDA", 0.0)
    beta = kp * e.w_over_l * e.params.m
    return _MosInfo(e, card.kind, vto, beta, lam)


class _DcSystem:
    """Index maps and stamping for DC analysis of one netlist."""

    def __init__(self, netlist: Netlist, options: SimOptions):
        self.netlist = netlist
        self.options = options
        self.resistors: list[Resistor] = []
        self.isources: list[ISource] = []
        self.vsources: list[VSource] = []
        self.inductors: list[Inductor] = []
        self.mosfets: list[_MosInfo] = []
        for e in netlist.elements:
            if isinstance(e, Resistor):
                self.resistors.append(e)
            elif isinstance(e, Capacitor):
                continue  # open at DC
            elif isinstance(e, Inductor):
                self.inductors.append(e)
            elif isinstance(e, VSource):
                self.vsources.append(e)
            elif isinstance(e, ISource):
                self.isources.append(e)
            elif isinstance(e, Mosfet):
                self.mosfets.append(_mos_info(e, netlist))
            elif isinstance(e, Bjt):
                raise UnsupportedElement(e.name, "BJT simulation is not supported")
            elif isinstance(e, SubcktInstance):
                raise UnsupportedElement(e.name, "flatten the netlist before simulating")
            else:
                raise UnsupportedElement(e.name, "unsupported element")

        self.nodes = sorted(
            {n for e in netlist.elements for n in e.nodes if not is_ground(n)}
        )
        self.node_idx = {n: i for i, n in enumerate(self.nodes)}
        self.n_nodes = len(self.nodes)
        self.branches: list = self.vsources + self.inductors
        self.size = self.n_nodes + len(self.branches)

    def _idx(self, node: str) -> int:
        return -1 if is_ground(node) else self.node_idx[node]

    def source_dc_value(self, e, overrides: dict[str, float]) -> float:
        if e.name in overrides:
            return overrides[e.name]
        return waveform_value(e.waveform, 0.0)

    def assemble(self, x: np.ndarray, overrides: dict[str, float]):
        n = self.size
        A = np.zeros((n, n))
        b = np.zeros(n)
        for i in range(self.n_nodes):
            A[i, i] += self.options.gmin

        for r in self.resistors:
            g = 1.0 / r.value
            a, c = self._idx(r.nodes[0]), self._idx(r.nodes[1])
            _stamp_conductance(A, a, c, g)

        for s in self.isources:
            val = self.source_dc_value(s, overrides)
            a, c = self._idx(s.nodes[0]), self._idx(s.nodes[1])
            if a >= 0:
                b[a] -= val
            if c >= 0:
                b[c] += val

        for j, e in enumerate(self.branches):
            row = self.n_nodes + j
            a, c = self._idx(e.nodes[0]), self._idx(e.nodes[1])
            if a >= 0:
                A[a, row] += 1.0
                A[row, a] += 1.0
            if c >= 0:
                A[c, row] -= 1.0
                A[row, c] -= 1.0
            if isinstance(e, VSource):
                b[row] = self.source_dc_value(e, overrides)
            else:  # inductor: zero-volt branch at DC
                b[row] = 0.0

        for info in self.mosfets:
            _stamp_mosfet(A, b, x, info, self._idx)
        return A, b

    def solve(
        self, overrides: dict[str, float] | None = None, guess: np.ndarray | None = None
    ) -> tuple[DcSolution, np.ndarray]:
        overrides = overrides or {}
        x, iterations = _newton(
            lambda x: self.assemble(x, overrides),
            self.size,
            self.n_nodes,
            self.options,
            nonlinear=bool(self.mosfets),
            guess=guess,
        )
        voltages = {"0": 0.0}
        for node, i in self.node_idx.items():
            voltages[node] = float(x[i])
        currents = {
            e.name: float(x[self.n_nodes + j]) for j, e in enumerate(self.branches)
        }
        return DcSolution(voltages, currents, iterations), x


def _stamp_conductance(A: np.ndarray, a: int, c: int, g: float) -> None:
    if a >= 0:
        A[a, a] += g
    if c >= 0:
        A[c, c] += g
    if a >= 0 and c >= 0:
        A[a, c] -= g
        A[c, a] -= g


def _stamp_mosfet(A, b, x, info: _MosInfo, idx) -> None:
    e = info.element
    d, g, s, _ = (idx(n) for n in e.nodes)
    vd = x[d] if d >= 0 else 0.0
    vg = x[g] if g >= 0 else 0.0
    vs = x[s] if s >= 0 else 0.0
    i0, gm, gds = mos_current(info.kind, vg - vs, vd - vs, info.vto, info.beta, info.lam)
    ieq = i0 - gm * (vg - vs) - gds * (vd - vs)
    # channel current leaves the drain node and enters the source node
    if d >= 0:
        if g >= 0:
            A[d, g] += gm
        A[d, d] += gds
        if s >= 0:
            A[d, s] -= gm + gds
        b[d] -= ieq
    if s >= 0:
        if g >= 0:
            A[s, g] -= gm
        if d >= 0:
            A[s, d] -= gds
        A[s, s] += gm + gds
        b[s] += ieq


def _lin_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as err:
        raise SingularMatrix(str(err)) from None
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("non-finite solution")
    return x


def _newton(assemble, size, n_nodes, options: SimOptions, nonlinear: bool, guess=None):
    x = np.zeros(size) if guess is None else np.asarray(guess, dtype=float).copy()
    if not nonlinear:
        A, b = assemble(x)
        return _lin_solve(A, b), 1

    for it in range(1, options.max_newton_iter + 1):
        A, b = assemble(x)
        x_new = _lin_solve(A, b)
        dx = x_new - x
        vtol = options.vntol + options.reltol * np.abs(x_new[:n_nodes])
        if np.all(np.abs(dx[:n_nodes]) <= vtol):
            A2, b2 = assemble(x_new)
            residual = A2 @ x_new - b2
            if n_nodes == 0 or np.max(np.abs(residual[:n_nodes])) < options.abstol:
                return x_new, it
        # damped update: node voltages may move at most _STEP_LIMIT per pass
        step = dx.copy()
        step[:n_nodes] = np.clip(step[:n_nodes], -_STEP_LIMIT, _STEP_LIMIT)
        x = x + step
    raise NonConvergence(options.max_newton_iter)


def dc_operating_point(
    netlist: Netlist,
    options: SimOptions | None = None,
    source_overrides: dict[str, float] | None = None,
) -> DcSolution:
    """Solve the DC operating point of a flattened netlist.

    ``source_overrides`` maps source names to replacement DC values; it is the
    hook used by sweeps, gain probing, and truth-table drives.
    """
    options = options or SimOptions()
    system = _DcSystem(netlist, options)
    overrides = _canonical_overrides(source_overrides)
    solution, _ = system.solve(overrides)
    return solution


def _canonical_overrides(overrides: dict[str, float] | None) -> dict[str, float]:
    if not overrides:
        return {}
    return {name.upper(): float(v) for name, v in overrides.items()}


def dc_sweep(
    netlist: Netlist,
    source: str,
    start: float,
    stop: float,
    step: float,
    options: SimOptions | None = None,
) -> DcSweepResult:
    """Sweep one source across [start, stop], warm-starting each point from
    the previous solution. A step larger than the span yields the single
    point at ``start``."""
    if step <= 0:
        raise DomainError("sweep step must be > 0")
    if start > stop:
        raise DomainError("sweep start must be <= stop")
    options = options or SimOptions()
    name = source.upper()
    system = _DcSystem(netlist, options)
    if not any(e.name == name for e in system.vsources + system.isources):
        raise DomainError(f"unknown sweep source {source}")

    values: list[float] = []
    v = start
    eps = step * 1e-9
    while v <= stop + eps:
        values.append(min(v, stop))
        v += step

    result = DcSweepResult(source=name)
    guess = None
    for v in values:
        try:
            solution, guess = system.solve({name: v}, guess=guess)
        except NonConvergence as err:
            raise NonConvergence(err.iterations, detail=f"at {name}={v:g}") from err
        result.values.append(v)
        result.solutions.append(solution)
    return result


def small_signal_gain(
    netlist: Netlist,
    input_source: str,
    output_node: str,
    delta: float = 1e-4,
    options: SimOptions | None = None,
) -> float:
    """Central-difference DC gain dV(output)/dV(input) about the nominal bias."""
    if delta <= 0:
        raise DomainError("delta must be > 0")
    options = options or SimOptions()
    system = _DcSystem(netlist, options)
    name = input_source.upper()
    src = next((e for e in system.vsources if e.name == name), None)
    if src is None:
        raise DomainError(f"{input_source} is not a voltage source in the netlist")
    out = canonical_node(output_node)
    if out not in system.node_idx and not is_ground(out):
        raise DomainError(f"unknown output node {output_node}")

    v0 = waveform_value(src.waveform, 0.0)
    plus, raw = system.solve({name: v0 + delta})
    minus, _ = system.solve({name: v0 - delta}, guess=raw)
    return (plus.v(out) - minus.v(out)) / (2.0 * delta)
