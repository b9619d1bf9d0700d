"""Staged judging of model output and the iterative repair loop.

A reply moves through extract -> parse -> flatten -> lint -> metrics-range ->
functional check; the first failing stage fixes the verdict class, so a
netlist that does not parse can never be reported as a functional failure.
The repair loop feeds each failure back to the provider as an extended
prompt (previous prompt + previous reply + feedback + revision request)
until a full pass or the iteration budget runs out; exhausting the budget
keeps the last failure class as the verdict, while provider failures abort
the attempt as FailBudget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..lint import LintReport, make_diagnostic, lint, render_feedback
from ..metrics import CircuitMetrics, compute_metrics
from ..netlist import (
    Netlist,
    NoNetlistFound,
    ParseError,
    RecursionDetected,
    SubcktArityError,
    UnknownSubckt,
    extract_netlist,
    flatten,
    parse_netlist,
)
from ..sim import FunctionalResult, SimOptions, functional_check
from .prompt import PromptTemplate, render_prompt
from .provider import Provider, ProviderError, ReplayMiss
from .tasks import Task


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL_PARSE = "FailParse"
    FAIL_LINT = "FailLint"
    FAIL_SIM = "FailSim"
    FAIL_FUNCTIONAL = "FailFunctional"
    FAIL_BUDGET = "FailBudget"


@dataclass
class JudgeOutcome:
    verdict: Verdict
    detail: str = ""
    extracted: str | None = None
    netlist: Netlist | None = None
    lint_report: LintReport | None = None
    metrics: CircuitMetrics | None = None
    functional: FunctionalResult | None = None


def judge(task: Task, raw_text: str, options: SimOptions | None = None) -> JudgeOutcome:
    """Run the full verification chain over one model reply."""
    options = options or SimOptions()
    try:
        extracted = extract_netlist(raw_text)
    except NoNetlistFound as err:
        return JudgeOutcome(Verdict.FAIL_PARSE, detail=f"no netlist found: {err}")

    try:
        netlist = parse_netlist(extracted)
    except ParseError as err:
        return JudgeOutcome(Verdict.FAIL_PARSE, detail=f"parse error: {err}", extracted=extracted)

    try:
        flat = flatten(netlist)
    except (UnknownSubckt, RecursionDetected, SubcktArityError) as err:
        return JudgeOutcome(
            Verdict.FAIL_PARSE, detail=f"hierarchy error: {err}", extracted=extracted
        )

    report = lint(flat, task.requirements)
    metrics = compute_metrics(flat)
    lo, hi = task.expected_transistor_range
    if not lo <= metrics.transistor_count <= hi:
        range_diag = make_diagnostic(
            "RANGE",
            f"{metrics.transistor_count} transistors, expected between {lo} and {hi}",
        )
        report = LintReport(report.diagnostics + (range_diag,))
    if not report.valid:
        return JudgeOutcome(
            Verdict.FAIL_LINT,
            detail=render_feedback(report),
            extracted=extracted,
            netlist=netlist,
            lint_report=report,
            metrics=metrics,
        )

    functional = None
    if task.functional_spec is not None:
        functional = functional_check(flat, task.functional_spec, options)
        if not functional.passed:
            verdict = Verdict.FAIL_SIM if functional.unsimulatable else Verdict.FAIL_FUNCTIONAL
            return JudgeOutcome(
                verdict,
                detail=functional.reason or "functional check failed",
                extracted=extracted,
                netlist=netlist,
                lint_report=report,
                metrics=metrics,
                functional=functional,
            )

    return JudgeOutcome(
        Verdict.PASS,
        detail="",
        extracted=extracted,
        netlist=netlist,
        lint_report=report,
        metrics=metrics,
        functional=functional,
    )


@dataclass
class IterationRecord:
    prompt: str
    response: str | None
    verdict: Verdict
    detail: str
    extracted: str | None = None
    lint: dict | None = None
    metrics: dict | None = None
    functional: dict | None = None

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "response": self.response,
            "verdict": self.verdict.value,
            "detail": self.detail,
            "extracted": self.extracted,
            "lint": self.lint,
            "metrics": self.metrics,
            "functional": self.functional,
        }


@dataclass
class Attempt:
    task_id: int
    iterations: list[IterationRecord] = field(default_factory=list)
    final_verdict: Verdict = Verdict.FAIL_BUDGET
    iterations_used: int = 0

    @property
    def passed(self) -> bool:
        return self.final_verdict is Verdict.PASS

    def final_netlist_text(self) -> str | None:
        for record in reversed(self.iterations):
            if record.extracted is not None:
                return record.extracted
        return None

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "final_verdict": self.final_verdict.value,
            "iterations_used": self.iterations_used,
            "iterations": [r.to_dict() for r in self.iterations],
        }


def _compose_followup(prompt: str, response: str, feedback: str) -> str:
    return (
        prompt
        + "\n--- previous reply ---\n"
        + response
        + "\n--- validation feedback ---\n"
        + feedback
        + "\nRevise the netlist and reply with exactly one fenced SPICE netlist "
        "ending with .end.\n"
    )


def _iteration_record(prompt: str, response: str, outcome: JudgeOutcome) -> IterationRecord:
    return IterationRecord(
        prompt=prompt,
        response=response,
        verdict=outcome.verdict,
        detail=outcome.detail,
        extracted=outcome.extracted,
        lint=outcome.lint_report.to_dict() if outcome.lint_report else None,
        metrics=outcome.metrics.to_dict() if outcome.metrics else None,
        functional=outcome.functional.to_dict() if outcome.functional else None,
    )


def repair_loop(
    provider: Provider,
    task: Task,
    template: PromptTemplate,
    max_iters: int,
    options: SimOptions | None = None,
) -> Attempt:
    """One independent attempt: up to ``max_iters`` generate/validate rounds
    within a single growing conversation."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    options = options or SimOptions()
    attempt = Attempt(task_id=task.id)
    prompt = render_prompt(task, template)

    for iteration in range(1, max_iters + 1):
        try:
            response = provider.generate(prompt)
        except (ProviderError, ReplayMiss) as err:
            attempt.iterations.append(
                IterationRecord(
                    prompt=prompt,
                    response=None,
                    verdict=Verdict.FAIL_BUDGET,
                    detail=f"provider failure: {err}",
                )
            )
            attempt.final_verdict = Verdict.FAIL_BUDGET
            attempt.iterations_used = iteration
            return attempt

        outcome = judge(task, response, options)
        attempt.iterations.append(_iteration_record(prompt, response, outcome))
        attempt.final_verdict = outcome.verdict
        attempt.iterations_used = iteration
        if outcome.verdict is Verdict.PASS:
            return attempt
        prompt = _compose_followup(prompt, response, outcome.detail)

    return attempt
