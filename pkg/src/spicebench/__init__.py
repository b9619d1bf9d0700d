"""spicebench: SPICE netlist tooling and an LLM circuit-generation benchmark.

The package splits into:

* :mod:`spicebench.netlist` -- netlist IR, parser, canonical serializer,
  subcircuit flattening, and extraction of netlists from model replies;
* :mod:`spicebench.lint` -- electrical/structural rule checks producing
  diagnostics and repair feedback;
* :mod:`spicebench.metrics` -- circuit statistics and difficulty tiers;
* :mod:`spicebench.sim` -- DC/transient simulation with a square-law MOSFET
  model, functional checks, and an external engine adapter;
* :mod:`spicebench.harness` -- prompt rendering, LLM providers, the
  generate/validate/repair loop, dataset curation, and Pass@k scoring;
* :mod:`spicebench.cli` -- the ``spicebench`` command.
"""

__version__ = "0.1.0"

from .errors import DomainError, SpicebenchError
from .netlist import (
    Netlist,
    NoNetlistFound,
    ParseError,
    RecursionDetected,
    UnknownSubckt,
    extract_netlist,
    flatten,
    parse_netlist,
    parse_value,
    serialize,
)

__all__ = [
    "DomainError",
    "SpicebenchError",
    "Netlist",
    "NoNetlistFound",
    "ParseError",
    "RecursionDetected",
    "UnknownSubckt",
    "extract_netlist",
    "flatten",
    "parse_netlist",
    "parse_value",
    "serialize",
    "__version__",
]
