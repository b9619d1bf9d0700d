"""Numerical circuit verification: DC operating points and sweeps via modified
nodal analysis with a square-law MOSFET model, fixed-step backward-Euler
transients, finite-difference small-signal gain, truth-table/gain functional
checks, and a subprocess adapter for an external SPICE engine."""

from .device import mos_current, nmos_square_law
from .engine import (
    EngineNonzeroExit,
    EngineResult,
    EngineTimeout,
    EngineUnavailable,
    external_engine_run,
)
from .functional import (
    FunctionalResult,
    FunctionalSpec,
    MinGain,
    RowResult,
    TruthTable,
    functional_check,
)
from .mna import (
    DcSolution,
    DcSweepResult,
    NonConvergence,
    SimOptions,
    SimulationError,
    SingularMatrix,
    UnsupportedElement,
    dc_operating_point,
    dc_sweep,
    effective_temperature,
    small_signal_gain,
)
from .sources import waveform_value
from .transient import TranTrace, transient

__all__ = [
    "DcSolution",
    "DcSweepResult",
    "EngineNonzeroExit",
    "EngineResult",
    "EngineTimeout",
    "EngineUnavailable",
    "FunctionalResult",
    "FunctionalSpec",
    "MinGain",
    "NonConvergence",
    "RowResult",
    "SimOptions",
    "SimulationError",
    "SingularMatrix",
    "TranTrace",
    "TruthTable",
    "UnsupportedElement",
    "dc_operating_point",
    "dc_sweep",
    "effective_temperature",
    "external_engine_run",
    "functional_check",
    "mos_current",
    "nmos_square_law",
    "small_signal_gain",
    "transient",
    "waveform_value",
]
