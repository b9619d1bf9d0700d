"""Time evaluation of independent source waveforms."""

from __future__ import annotations

import math

from ..netlist import Dc, Pulse, Pwl, Sin, Waveform


def waveform_value(w: Waveform, t: float) -> float:
    """Source value at time ``t``. DC analysis uses t = 0."""
    if isinstance(w, Dc):
        return w.v
    if isinstance(w, Pulse):
        return _pulse_value(w, t)
    if isinstance(w, Sin):
        if t < w.td:
            return w.vo
        dt = t - w.td
        return w.vo + w.va * math.sin(2.0 * math.pi * w.freq * dt) * math.exp(-dt * w.theta)
    if isinstance(w, Pwl):
        return _pwl_value(w, t)
    raise TypeError(f"unknown waveform {w!r}")


def _pulse_value(w: Pulse, t: float) -> float:
    if t < w.td:
        return w.v1
    per = w.per if w.per > 0 else float("inf")
    phase = (t - w.td) % per if math.isfinite(per) else t - w.td
    if phase < w.tr:
        return w.v1 + (w.v2 - w.v1) * phase / w.tr if w.tr > 0 else w.v2
    phase -= w.tr
    if phase < w.pw:
        return w.v2
    phase -= w.pw
    if phase < w.tf:
        return w.v2 + (w.v1 - w.v2) * phase / w.tf if w.tf > 0 else w.v1
    return w.v1


def _pwl_value(w: Pwl, t: float) -> float:
    points = w.points
    if t <= points[0][0]:
        return points[0][1]
    for (t0, v0), (t1, v1) in zip(points, points[1:]):
        if t <= t1:
            if t1 == t0:
                return v1
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    return points[-1][1]
