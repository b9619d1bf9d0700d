"""Benchmark harness: prompt rendering, LLM providers, the
generate/validate/repair loop, dataset curation, and Pass@k scoring."""

from .dataset import AlreadyPresent, DatasetRecord, DatasetStore, InvalidRecord
from .loop import Attempt, IterationRecord, JudgeOutcome, Verdict, judge, repair_loop
from .prompt import (
    DEFAULT_GUIDELINES,
    GuidelineEntry,
    PromptTemplate,
    TemplateError,
    default_prompt_template,
    render_prompt,
    requirements_summary,
    suggest_guidelines,
)
from .provider import (
    HttpProvider,
    Provider,
    ProviderError,
    ReplayMiss,
    ReplayProvider,
    prompt_hash,
    record_response,
)
from .runner import RunRecord, load_run_records, run_benchmark
from .scoring import ScoreTable, pass_at_k, score
from .tasks import Task, default_suite_path, load_tasks

__all__ = [
    "AlreadyPresent",
    "Attempt",
    "DEFAULT_GUIDELINES",
    "DatasetRecord",
    "DatasetStore",
    "GuidelineEntry",
    "HttpProvider",
    "InvalidRecord",
    "IterationRecord",
    "JudgeOutcome",
    "PromptTemplate",
    "Provider",
    "ProviderError",
    "ReplayMiss",
    "ReplayProvider",
    "RunRecord",
    "ScoreTable",
    "Task",
    "TemplateError",
    "Verdict",
    "default_prompt_template",
    "default_suite_path",
    "judge",
    "load_run_records",
    "load_tasks",
    "pass_at_k",
    "prompt_hash",
    "record_response",
    "render_prompt",
    "repair_loop",
    "requirements_summary",
    "run_benchmark",
    "score",
    "suggest_guidelines",
]
