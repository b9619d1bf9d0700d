"""Fixed-step backward-Euler transient analysis.

Companion models: a capacitor becomes a C/dt conductance with a history
current from the previous voltage; an inductor becomes a dt/L conductance
with its accumulated branch current as history. Time-varying sources are
evaluated at the end of each step. The initial condition is the DC operating
point with every source held at its t=0 value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DomainError
from ..netlist import Capacitor, Inductor, ISource, Netlist, VSource, canonical_node, is_ground
from .mna import (
    NonConvergence,
    SimOptions,
    _DcSystem,
    _lin_solve,
    _newton,
    _stamp_conductance,
    _stamp_mosfet,
)
from .sources import waveform_value


@dataclass
class TranTrace:
    """Uniformly sampled node voltages, times starting at 0."""

    times: list[float]
    voltages: dict[str, list[float]]  # keyed by canonical node name

    def node(self, name: str) -> list[float]:
        key = canonical_node(name)
        if is_ground(key):
            return [0.0] * len(self.times)
        return self.voltages[key]

    def at(self, name: str, t: float) -> float:
        """Sample closest to ``t`` (grid is uniform)."""
        if not self.times:
            raise DomainError("empty trace")
        step = self.times[1] - self.times[0] if len(self.times) > 1 else 1.0
        i = int(round(t / step))
        i = min(max(i, 0), len(self.times) - 1)
        return self.node(name)[i]

    def to_csv(self, path: str | Path) -> None:
        """Waveform artifact: header ``time,<node>,...``, one row per step."""
        names = sorted(self.voltages)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time"] + names)
            for i, t in enumerate(self.times):
                writer.writerow(
                    [f"{t:.9e}"] + [f"{self.voltages[n][i]:.9e}" for n in names]
                )


class _TranSystem(_DcSystem):
    """DC system plus reactive companion stamps. Branch unknowns cover only
    V sources; inductors use their companion conductance."""

    def __init__(self, netlist: Netlist, options: SimOptions, dt: float):
        super().__init__(netlist, options)
        self.dt = dt
        self.capacitors = [e for e in netlist.elements if isinstance(e, Capacitor)]
        self.branches = list(self.vsources)
        self.size = self.n_nodes + len(self.branches)
        self.cap_hist = {c.name: 0.0 for c in self.capacitors}  # v across cap
        self.ind_hist = {l.name: 0.0 for l in self.inductors}  # current a->b
        self._t = 0.0

    def _vdiff(self, x, e) -> float:
        a, c = self._idx(e.nodes[0]), self._idx(e.nodes[1])
        va = x[a] if a >= 0 else 0.0
        vc = x[c] if c >= 0 else 0.0
        return va - vc

    def assemble(self, x: np.ndarray, overrides: dict[str, float]):
        n = self.size
        A = np.zeros((n, n))
        b = np.zeros(n)
        for i in range(self.n_nodes):
            A[i, i] += self.options.gmin

        for r in self.resistors:
            _stamp_conductance(A, self._idx(r.nodes[0]), self._idx(r.nodes[1]), 1.0 / r.value)

        for s in self.isources:
            val = waveform_value(s.waveform, self._t)
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
            b[row] = waveform_value(e.waveform, self._t)

        for cap in self.capacitors:
            g = cap.value / self.dt
            a, c = self._idx(cap.nodes[0]), self._idx(cap.nodes[1])
            _stamp_conductance(A, a, c, g)
            hist = g * self.cap_hist[cap.name]
            if a >= 0:
                b[a] += hist
            if c >= 0:
                b[c] -= hist

        for ind in self.inductors:
            g = self.dt / ind.value
            a, c = self._idx(ind.nodes[0]), self._idx(ind.nodes[1])
            _stamp_conductance(A, a, c, g)
            hist = self.ind_hist[ind.name]
            if a >= 0:
                b[a] -= hist
            if c >= 0:
                b[c] += hist

        for info in self.mosfets:
            _stamp_mosfet(A, b, x, info, self._idx)
        return A, b

    def step(self, t: float, guess: np.ndarray) -> np.ndarray:
        self._t = t
        x, _ = _newton(
            lambda x: self.assemble(x, {}),
            self.size,
            self.n_nodes,
            self.options,
            nonlinear=bool(self.mosfets),
            guess=guess,
        )
        for cap in self.capacitors:
            self.cap_hist[cap.name] = self._vdiff(x, cap)
        for ind in self.inductors:
            self.ind_hist[ind.name] += (self.dt / ind.value) * self._vdiff(x, ind)
        return x


def transient(
    netlist: Netlist, tstep: float, tstop: float, options: SimOptions | None = None
) -> TranTrace:
    """Integrate node voltages from 0 to ``tstop`` at a fixed ``tstep``."""
    if tstep <= 0:
        raise DomainError("tstep must be > 0")
    if tstop < 10 * tstep:
        raise DomainError("tstop must be at least 10 * tstep")
    options = options or SimOptions()

    # t = 0 operating point seeds the state
    dc = _DcSystem(netlist, options)
    _, x0 = dc.solve({})

    system = _TranSystem(netlist, options, tstep)
    for cap in system.capacitors:
        system.cap_hist[cap.name] = system._vdiff(x0, cap)
    for j, e in enumerate(dc.branches):
        if isinstance(e, Inductor):
            system.ind_hist[e.name] = float(x0[dc.n_nodes + j])

    n_steps = int(np.floor(tstop / tstep + 1e-9))
    times = [k * tstep for k in range(n_steps + 1)]
    voltages = {node: [0.0] * (n_steps + 1) for node in system.nodes}
    for node, i in system.node_idx.items():
        voltages[node][0] = float(x0[i])

    x = np.zeros(system.size)
    x[: system.n_nodes] = x0[: system.n_nodes]
    for j, e in enumerate(system.branches):
        k = dc.branches.index(e)
        x[system.n_nodes + j] = x0[dc.n_nodes + k]

    for step_no in range(1, n_steps + 1):
        t = times[step_no]
        try:
            x = system.step(t, x)
        except NonConvergence as err:
            raise NonConvergence(err.iterations, detail=f"at t={t:g}s") from err
        for node, i in system.node_idx.items():
            voltages[node][step_no] = float(x[i])
    return TranTrace(times=times, voltages=voltages)
