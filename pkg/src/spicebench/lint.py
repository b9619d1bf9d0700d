"""Electrical and structural rule checks over a parsed netlist.

Rules fall into five groups: structural soundness, P/N width-ratio
convention, analysis-directive completeness, source configuration, and
temperature configuration. Each produces Diagnostic records; a LintReport is
Valid exactly when no Error-severity diagnostic is present. render_feedback
turns an invalid report into a deterministic numbered repair message suitable
for prompting a model.

The registry below is closed and stable: rule ids never change meaning, and
machine consumers may rely on the JSON shape produced by
``LintReport.to_dict``.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .netlist import (
    ANALYSIS_KINDS,
    Bjt,
    Dc,
    ISource,
    Mosfet,
    Netlist,
    Pulse,
    Temp,
    Tran,
    DcSweep,
    Ac,
    Resistor,
    VSource,
    canonical_node,
    is_ground,
    waveform_violations,
)

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Rule:
    rule_id: str
    severity: str
    description: str
    hint: str


# Closed rule registry, in report order. RANGE is emitted by the benchmark
# judge (transistor count outside the task's expected range) but lives here
# so the registry stays the one authoritative table.
RULE_REGISTRY: tuple[Rule, ...] = (
    Rule("NO_GROUND", ERROR, "no ground node (0/gnd) anywhere in the circuit",
         "tie the reference node of the circuit to node 0."),
    Rule("FLOATING_NODE", ERROR, "node with connection degree 1 (outputs exempt)",
         "connect the dangling node to the rest of the circuit or remove the stub."),
    Rule("DUP_NAME", ERROR, "duplicate element name after case-folding",
         "give every element card a unique name."),
    Rule("MISSING_MODEL", ERROR, "M/Q element references a model card that does not exist",
         "add a matching .model card or fix the model name."),
    Rule("MODEL_KIND_MISMATCH", ERROR, "element bound to a model card of the wrong device class",
         "bind MOSFETs to NMOS/PMOS cards and BJTs to NPN/PNP cards."),
    Rule("NO_END", WARNING, "netlist does not finish with .end",
         "terminate the netlist with a .end line."),
    Rule("WL_RATIO", WARNING, "PMOS/NMOS W/L ratio deviates from the 2:1 convention",
         "widen the PMOS devices to roughly twice the NMOS drive strength."),
    Rule("WL_DEGENERATE", ERROR, "device W/L outside the physically plausible range [0.1, 1000]",
         "use channel dimensions with a sane aspect ratio."),
    Rule("NO_ANALYSIS", ERROR, "netlist carries no analysis directive at all",
         "add the analysis directive the task calls for (.op/.dc/.tran/.ac)."),
    Rule("WRONG_ANALYSIS", ERROR, "a required analysis kind is missing",
         "add the named analysis directive with sensible parameters."),
    Rule("EXTRA_ANALYSIS", WARNING, "analysis directive present but not required",
         "drop analyses the task does not ask for."),
    Rule("BAD_ANALYSIS_PARAMS", ERROR, "analysis directive violates its parameter constraints",
         "fix the directive parameters (ordering, positivity, single .temp)."),
    Rule("UNDRIVEN_INPUT", ERROR, "declared input node is not driven by any source",
         "attach a voltage or current source (directly or through one series resistor)."),
    Rule("LEVEL_OUT_OF_RAILS", ERROR, "source level outside the supply window",
         "keep source levels between ground and the supply rail."),
    Rule("BAD_WAVEFORM", ERROR, "source waveform violates its timing/shape constraints",
         "repair the waveform parameters (positive edges, per >= tr+tf+pw, increasing PWL times)."),
    Rule("NO_SUPPLY", WARNING, "no DC source matches the declared supply rail within 1%",
         "add a DC supply source equal to the declared rail voltage."),
    Rule("NO_TEMP", WARNING, "task requires a pinned temperature but no .temp given; defaulting to 27 C",
         "add a .temp directive at the required operating temperature."),
    Rule("TEMP_RANGE", ERROR, ".temp outside the supported -55..150 C window",
         "choose an operating temperature between -55 C and 150 C."),
    Rule("RANGE", ERROR, "transistor count outside the task's expected range",
         "use a topology whose device count matches the requested circuit class."),
)

_RULES = {r.rule_id: r for r in RULE_REGISTRY}


@dataclass(frozen=True)
class TaskRequirements:
    """What the task demands of a candidate netlist."""

    required_analyses: frozenset[str] = frozenset()
    supply_rail: float = 5.0
    input_nodes: tuple[str, ...] = ()
    output_nodes: tuple[str, ...] = ()
    requires_temp: bool = False

    def __post_init__(self):
        if self.supply_rail <= 0:
            raise ValueError("supply_rail must be > 0")
        object.__setattr__(
            self, "required_analyses", frozenset(k.lower() for k in self.required_analyses)
        )
        unknown = self.required_analyses - set(ANALYSIS_KINDS)
        if unknown:
            raise ValueError(f"unknown analysis kinds: {sorted(unknown)}")
        object.__setattr__(
            self, "input_nodes", tuple(canonical_node(n) for n in self.input_nodes)
        )
        object.__setattr__(
            self, "output_nodes", tuple(canonical_node(n) for n in self.output_nodes)
        )
        if set(self.input_nodes) & set(self.output_nodes):
            raise ValueError("input and output node lists must be disjoint")


@dataclass(frozen=True)
class Diagnostic:
    rule_id: str
    severity: str
    message: str
    element: str | None = None
    node: str | None = None

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "severity": self.severity,
            "message": self.message,
            "element": self.element,
            "node": self.node,
        }


def make_diagnostic(
    rule_id: str, message: str, element: str | None = None, node: str | None = None
) -> Diagnostic:
    """Build a Diagnostic with the severity registered for ``rule_id``."""
    return Diagnostic(rule_id, _RULES[rule_id].severity, message, element, node)


_diag = make_diagnostic


@dataclass(frozen=True)
class LintReport:
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def valid(self) -> bool:
        return not any(d.severity == ERROR for d in self.diagnostics)

    @property
    def verdict(self) -> str:
        return "valid" if self.valid else "invalid"

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == ERROR]

    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == WARNING]

    def rule_ids(self) -> set[str]:
        return {d.rule_id for d in self.diagnostics}

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }


# --- structural rules --------------------------------------------------------


def _degree_map(netlist: Netlist) -> dict[str, int]:
    degrees: dict[str, int] = {}
    for e in netlist.elements:
        for n in e.nodes:
            degrees[n] = degrees.get(n, 0) + 1
    return degrees


def check_structure(netlist: Netlist, outputs: tuple[str, ...] = ()) -> list[Diagnostic]:
    """Structural soundness of a flattened netlist.

    ``outputs`` are the declared output nodes; they legitimately terminate at
    a probe and are exempt from the floating-node rule.
    """
    out: list[Diagnostic] = []
    degrees = _degree_map(netlist)

    if not any(is_ground(n) for n in degrees):
        out.append(_diag("NO_GROUND", "circuit has no ground node (0 or gnd)"))

    exempt = {canonical_node(n) for n in outputs}
    for node in sorted(degrees):
        if degrees[node] == 1 and not is_ground(node) and node not in exempt:
            out.append(
                _diag("FLOATING_NODE", f"node {node} has a single connection", node=node)
            )

    seen: dict[str, int] = {}
    for e in netlist.elements:
        seen[e.name] = seen.get(e.name, 0) + 1
    for name in sorted(n for n, c in seen.items() if c > 1):
        out.append(_diag("DUP_NAME", f"element name {name} used {seen[name]} times", element=name))

    for e in netlist.elements:
        if isinstance(e, Mosfet):
            model = netlist.models.get(e.params.model)
            if model is None:
                out.append(_diag(
                    "MISSING_MODEL",
                    f"{e.name} references missing model {e.params.model}",
                    element=e.name,
                ))
            elif not model.is_mos:
                out.append(_diag(
                    "MODEL_KIND_MISMATCH",
                    f"{e.name} is a MOSFET but model {model.name} is {model.kind}",
                    element=e.name,
                ))
        elif isinstance(e, Bjt):
            model = netlist.models.get(e.params.model)
            if model is None:
                out.append(_diag(
                    "MISSING_MODEL",
                    f"{e.name} references missing model {e.params.model}",
                    element=e.name,
                ))
            elif model.is_mos:
                out.append(_diag(
                    "MODEL_KIND_MISMATCH",
                    f"{e.name} is a BJT but model {model.name} is {model.kind}",
                    element=e.name,
                ))

    if not netlist.end_present:
        out.append(_diag("NO_END", "netlist does not finish with .end"))
    return out


# --- width-ratio rule --------------------------------------------------------


def check_wl_ratio(
    netlist: Netlist, target_ratio: float = 2.0, rel_tol: float = 0.25
) -> list[Diagnostic]:
    """Compare median W/L of the PMOS population against the NMOS population.

    Not applicable (returns []) unless both populations are non-empty.
    Degenerate per-device aspect ratios are errors; ratio deviation beyond
    ``rel_tol`` of ``target_ratio`` is a warning, since it breaks convention
    rather than correctness.
    """
    pmos: list[Mosfet] = []
    nmos: list[Mosfet] = []
    for e in netlist.elements:
        if not isinstance(e, Mosfet):
            continue
        model = netlist.models.get(e.params.model)
        if model is None or not model.is_mos:
            continue
        (pmos if model.kind == "PMOS" else nmos).append(e)
    if not pmos or not nmos:
        return []

    out: list[Diagnostic] = []
    ratio = statistics.median(m.w_over_l for m in pmos) / statistics.median(
        m.w_over_l for m in nmos
    )
    if abs(ratio - target_ratio) / target_ratio > rel_tol:
        out.append(_diag(
            "WL_RATIO",
            f"PMOS/NMOS median W/L ratio is {ratio:.2f}; convention is {target_ratio:g}:1",
        ))
    for m in pmos + nmos:
        wl = m.w_over_l
        if wl < 0.1 or wl > 1000.0:
            out.append(_diag(
                "WL_DEGENERATE", f"{m.name} has W/L = {wl:.3g}", element=m.name
            ))
    return out


# --- analysis rules ----------------------------------------------------------


def _directive_problems(d) -> str | None:
    if isinstance(d, DcSweep):
        if d.step <= 0:
            return ".dc step must be > 0"
    elif isinstance(d, Tran):
        if d.tstep <= 0:
            return ".tran tstep must be > 0"
        if d.tstop <= d.tstep:
            return ".tran tstop must be > tstep"
    elif isinstance(d, Ac):
        if d.npoints < 1:
            return ".ac npoints must be >= 1"
    return None


def check_analysis(netlist: Netlist, req: TaskRequirements) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    analyses = netlist.analyses()
    present = {d.kind for d in analyses}

    if not analyses:
        out.append(_diag("NO_ANALYSIS", "netlist requests no analysis at all"))
    for kind in sorted(req.required_analyses):
        if kind not in present:
            out.append(_diag("WRONG_ANALYSIS", f"required analysis .{kind} is missing"))
    for d in analyses:
        if d.kind not in req.required_analyses:
            out.append(_diag("EXTRA_ANALYSIS", f".{d.kind} present but not required"))
    for d in analyses:
        problem = _directive_problems(d)
        if problem:
            out.append(_diag("BAD_ANALYSIS_PARAMS", problem))
    temps = netlist.temp_directives()
    if len(temps) > 1:
        out.append(_diag("BAD_ANALYSIS_PARAMS", "more than one .temp directive"))
    return out


# --- source rules -------------------------------------------------------------


def _driven_nodes(netlist: Netlist) -> set[str]:
    """Nodes a source can reach directly or through one series resistor.

    Ground never acts as the intermediate node: a resistor to ground is a
    passive pulldown, not a drive.
    """
    direct: set[str] = set()
    for e in netlist.sources():
        direct.update(e.nodes)
    reached = set(direct)
    for e in netlist.elements:
        if isinstance(e, Resistor):
            a, b = e.nodes
            if a in direct and not is_ground(a):
                reached.add(b)
            if b in direct and not is_ground(b):
                reached.add(a)
    return reached


def check_sources(netlist: Netlist, req: TaskRequirements) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    rail = req.supply_rail

    driven = _driven_nodes(netlist)
    for node in req.input_nodes:
        if node not in driven:
            out.append(_diag(
                "UNDRIVEN_INPUT", f"input node {node} is not driven by any source", node=node
            ))

    lo, hi = -0.1 * rail, 1.1 * rail
    for e in netlist.sources():
        if not isinstance(e, VSource):
            continue
        levels: list[float] = []
        if isinstance(e.waveform, Dc):
            levels = [e.waveform.v]
        elif isinstance(e.waveform, Pulse):
            levels = [e.waveform.v1, e.waveform.v2]
        for level in levels:
            if level < lo or level > hi:
                out.append(_diag(
                    "LEVEL_OUT_OF_RAILS",
                    f"{e.name} level {level:g} V outside [{lo:g}, {hi:g}] V",
                    element=e.name,
                ))

    for e in netlist.sources():
        for problem in waveform_violations(e.waveform):
            out.append(_diag("BAD_WAVEFORM", f"{e.name}: {problem}", element=e.name))

    has_supply = any(
        isinstance(e, VSource)
        and isinstance(e.waveform, Dc)
        and abs(abs(e.waveform.v) - rail) <= 0.01 * rail
        for e in netlist.sources()
    )
    if not has_supply:
        out.append(_diag(
            "NO_SUPPLY", f"no DC source within 1% of the {rail:g} V supply rail"
        ))
    return out


# --- temperature rules ---------------------------------------------------------


def check_temperature(netlist: Netlist, req: TaskRequirements) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    temps = netlist.temp_directives()
    if req.requires_temp and not temps:
        out.append(_diag(
            "NO_TEMP", "task requires a pinned temperature; defaulting to 27 C"
        ))
    for t in temps:
        if t.celsius < -55.0 or t.celsius > 150.0:
            out.append(_diag(
                "TEMP_RANGE", f".temp {t.celsius:g} outside [-55, 150] C"
            ))
    return out


# --- aggregation ---------------------------------------------------------------


def lint(netlist: Netlist, req: TaskRequirements) -> LintReport:
    """Run every rule group in registry order. Flatten the netlist first;
    structure checks see only top-level elements."""
    diagnostics: list[Diagnostic] = []
    diagnostics += check_structure(netlist, req.output_nodes)
    diagnostics += check_wl_ratio(netlist)
    diagnostics += check_analysis(netlist, req)
    diagnostics += check_sources(netlist, req)
    diagnostics += check_temperature(netlist, req)
    return LintReport(tuple(diagnostics))


def structure_report(netlist: Netlist, outputs: tuple[str, ...] = ()) -> LintReport:
    """Requirement-free subset of lint used when no task context exists
    (e.g. re-validating stored dataset records)."""
    diagnostics: list[Diagnostic] = []
    diagnostics += check_structure(netlist, outputs)
    diagnostics += check_wl_ratio(netlist)
    for e in netlist.elements:
        if isinstance(e, (VSource, ISource)):
            for problem in waveform_violations(e.waveform):
                diagnostics.append(_diag("BAD_WAVEFORM", f"{e.name}: {problem}", element=e.name))
    return LintReport(tuple(diagnostics))


def render_feedback(report: LintReport) -> str:
    """Numbered repair message for an invalid report, one line per diagnostic.

    Identical reports render to identical text, so repair-loop transcripts are
    reproducible.
    """
    if report.valid:
        raise ValueError("render_feedback expects an invalid report")
    lines = []
    for i, d in enumerate(report.diagnostics, start=1):
        where = ""
        if d.element:
            where = f" [{d.element}]"
        elif d.node:
            where = f" [node {d.node}]"
        lines.append(f"{i}. {d.rule_id}{where}: {d.message} (fix: {_RULES[d.rule_id].hint})")
    return "\n".join(lines)


def hint_for(rule_id: str) -> str:
    return _RULES[rule_id].hint
