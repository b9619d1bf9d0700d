"""Pass@k and score-table aggregation.

pass_at_k(n, c, k) = 1 - C(n-c, k) / C(n, k): the probability that at least
one of k attempts drawn (without replacement) from n generated attempts, c of
them correct, is correct. Computed with exact integer binomials; C(a, b) is
zero when b > a.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from ..errors import DomainError
from ..metrics import Difficulty

_TIER_LABELS = {
    Difficulty.EASY: "Easy",
    Difficulty.MEDIUM: "Medium",
    Difficulty.HARD: "Hard",
    Difficulty.EXTREME: "Extreme",
}


def pass_at_k(n: int, c: int, k: int) -> float:
    if not 0 <= c <= n:
        raise DomainError(f"need 0 <= c <= n, got c={c}, n={n}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return 1.0 - comb(n - c, k) / comb(n, k)


@dataclass(frozen=True)
class ScoreRow:
    label: str
    task_count: int
    values: tuple[float, ...]  # percentages, one per k


@dataclass(frozen=True)
class ScoreTable:
    ks: tuple[int, ...]
    tiers: tuple[ScoreRow, ...]
    average: ScoreRow
    solved: int
    task_count: int

    def render_text(self) -> str:
        """Aligned plain-text table: tier rows, an Avg row, a # Solved row.
        Tiers with no tasks are omitted."""
        header = ["Task Level"] + [f"Pass@{k}" for k in self.ks]
        rows = [header]
        for row in self.tiers:
            rows.append([f"{row.label} ({row.task_count})"] + [f"{v:.1f}" for v in row.values])
        rows.append(["Avg"] + [f"{v:.1f}" for v in self.average.values])
        rows.append(["# Solved"] + [str(self.solved)] * len(self.ks))

        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = []
        for r in rows:
            cells = [r[0].ljust(widths[0])] + [
                r[i].rjust(widths[i]) for i in range(1, len(header))
            ]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        lines = ["task_level," + ",".join(f"pass@{k}" for k in self.ks)]
        for row in self.tiers:
            lines.append(row.label + "," + ",".join(f"{v:.4f}" for v in row.values))
        lines.append("Avg," + ",".join(f"{v:.4f}" for v in self.average.values))
        lines.append("Solved," + ",".join(str(self.solved) for _ in self.ks))
        return "\n".join(lines) + "\n"


def score(records, ks: list[int], tasks) -> ScoreTable:
    """Aggregate run records into per-tier mean Pass@k percentages.

    ``records`` supply (task_id, n, c); ``tasks`` provide the difficulty
    tier. Every record must have n >= max(ks). The average row is the mean
    over all tasks (not the mean of tier means), and solved counts tasks with
    at least one passing attempt.
    """
    if not ks:
        raise DomainError("at least one k is required")
    ks = sorted(set(int(k) for k in ks))
    if any(k < 1 for k in ks):
        raise DomainError("k values must be >= 1")
    if not records:
        raise DomainError("no run records to score")

    task_map = {t.id: t for t in tasks}
    per_tier: dict[Difficulty, list[tuple[float, ...]]] = {}
    all_rows: list[tuple[float, ...]] = []
    solved = 0
    for record in records:
        task = task_map.get(record.task_id)
        if task is None:
            raise DomainError(f"record references unknown task id {record.task_id}")
        n, c = record.n, record.c
        if n < max(ks):
            raise DomainError(f"task {record.task_id}: n={n} smaller than max k={max(ks)}")
        values = tuple(pass_at_k(n, c, k) for k in ks)
        per_tier.setdefault(task.difficulty, []).append(values)
        all_rows.append(values)
        if c >= 1:
            solved += 1

    def mean_percent(rows: list[tuple[float, ...]]) -> tuple[float, ...]:
        return tuple(
            100.0 * sum(r[i] for r in rows) / len(rows) for i in range(len(ks))
        )

    tier_rows = []
    for tier in (Difficulty.EASY, Difficulty.MEDIUM, Difficulty.HARD, Difficulty.EXTREME):
        rows = per_tier.get(tier)
        if not rows:
            continue  # empty tiers are omitted, never rendered as zero
        tier_rows.append(ScoreRow(_TIER_LABELS[tier], len(rows), mean_percent(rows)))

    average = ScoreRow("Avg", len(all_rows), mean_percent(all_rows))
    return ScoreTable(
        ks=tuple(ks),
        tiers=tuple(tier_rows),
        average=average,
        solved=solved,
        task_count=len(all_rows),
    )
