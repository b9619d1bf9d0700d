"""Guideline-bearing prompt templates and frequency-based guideline mining.

The prompt a task renders to has three parts: a numbered guidelines section,
the task description, and a requirements summary with an explicit
output-format instruction. Guidelines are data, not code: the default set
encodes the design conventions the linter enforces, and
:func:`suggest_guidelines` proposes additions mined from recurring
diagnostics. Candidates never mutate an active template; adopting one is an
explicit caller decision.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import SpicebenchError
from ..lint import LintReport, TaskRequirements, hint_for
from .tasks import Task


class TemplateError(SpicebenchError):
    """Prompt template is missing a required placeholder."""


@dataclass(frozen=True)
class GuidelineEntry:
    id: str
    text: str
    origin: str = "manual"  # manual | auto


DEFAULT_GUIDELINES: tuple[GuidelineEntry, ...] = (
    GuidelineEntry(
        "wl_ratio",
        "Size complementary pairs with roughly a 2:1 PMOS to NMOS width ratio "
        "unless the task says otherwise.",
    ),
    GuidelineEntry(
        "analysis",
        "Include exactly the analysis directives the task asks for "
        "(.op, .dc, .tran, or .ac) with sensible parameters.",
    ),
    GuidelineEntry(
        "drive_inputs",
        "Drive every declared input node with a voltage or current source and "
        "keep all source levels inside the supply rails.",
    ),
    GuidelineEntry(
        "temperature",
        "Add a .temp directive when the task requires a pinned operating "
        "temperature.",
    ),
    GuidelineEntry(
        "output_format",
        "Reply with exactly one fenced code block containing only the SPICE "
        "netlist, ending with .end.",
    ),
)

DEFAULT_TASK_TEMPLATE = (
    "Design task:\n"
    "{description}\n"
    "\n"
    "Requirements:\n"
    "{requirements}\n"
    "\n"
    "Reply with exactly one fenced code block containing a SPICE netlist "
    "that ends with .end.\n"
)


@dataclass(frozen=True)
class PromptTemplate:
    guidelines: tuple[GuidelineEntry, ...]
    task_template: str = DEFAULT_TASK_TEMPLATE

    def __post_init__(self):
        ids = [g.id for g in self.guidelines]
        if len(ids) != len(set(ids)):
            raise SpicebenchError("guideline ids must be unique")


def default_prompt_template() -> PromptTemplate:
    return PromptTemplate(guidelines=DEFAULT_GUIDELINES)


def requirements_summary(req: TaskRequirements) -> str:
    analyses = ", ".join(sorted(req.required_analyses)) or "none"
    inputs = ", ".join(req.input_nodes) or "none"
    outputs = ", ".join(req.output_nodes) or "none"
    lines = [
        f"- supply rail: {req.supply_rail:g} V",
        f"- required analyses: {analyses}",
        f"- input nodes to drive: {inputs}",
        f"- output nodes to observe: {outputs}",
        f"- explicit .temp directive required: {'yes' if req.requires_temp else 'no'}",
    ]
    return "\n".join(lines)


def render_prompt(task: Task, template: PromptTemplate) -> str:
    """Deterministic prompt text for one task. Placeholder substitution uses
    plain string replacement, so task descriptions may contain braces."""
    body = template.task_template
    for placeholder in ("{description}", "{requirements}"):
        if placeholder not in body:
            raise TemplateError(f"task template lacks {placeholder}")
    header = "Guidelines:\n"
    for i, g in enumerate(template.guidelines, start=1):
        header += f"{i}. {g.text}\n"
    body = body.replace("{description}", task.description)
    body = body.replace("{requirements}", requirements_summary(task.requirements))
    return header + "\n" + body


def suggest_guidelines(
    reports: list[LintReport], threshold: float = 0.30
) -> list[GuidelineEntry]:
    """Mine candidate guidelines from diagnostics that recur across failing
    reports.

    A rule that appears in at least ``threshold`` of the invalid reports
    yields one auto-tagged candidate built from the rule's repair hint.
    Valid reports are ignored; no reports, no candidates.
    """
    failing = [r for r in reports if not r.valid]
    if not failing:
        return []
    counts: Counter[str] = Counter()
    for report in failing:
        for rule_id in report.rule_ids():
            counts[rule_id] += 1
    candidates = []
    for rule_id, count in counts.items():
        if count / len(failing) >= threshold:
            candidates.append(
                GuidelineEntry(
                    id=f"auto_{rule_id.lower()}",
                    text=hint_for(rule_id).capitalize(),
                    origin="auto",
                )
            )
    candidates.sort(key=lambda g: (-counts[g.id.removeprefix("auto_").upper()], g.id))
    return candidates
