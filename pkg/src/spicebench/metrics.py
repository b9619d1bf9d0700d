"""Circuit statistics and transistor-count difficulty tiers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .netlist import Bjt, Mosfet, Netlist, is_ground


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"
    EXTREME = "extreme"

    @property
    def order(self) -> int:
        return _TIER_ORDER[self]


_TIER_ORDER = {
    Difficulty.EASY: 0,
    Difficulty.MEDIUM: 1,
    Difficulty.HARD: 2,
    Difficulty.EXTREME: 3,
}


def classify_difficulty(transistor_count: int) -> Difficulty:
    """Tier thresholds: <=10 easy, 11-25 medium, 26-45 hard, >45 extreme."""
    if transistor_count < 0:
        raise ValueError("transistor count must be >= 0")
    if transistor_count <= 10:
        return Difficulty.EASY
    if transistor_count <= 25:
        return Difficulty.MEDIUM
    if transistor_count <= 45:
        return Difficulty.HARD
    return Difficulty.EXTREME


@dataclass(frozen=True)
class CircuitMetrics:
    transistor_count: int
    node_count: int
    element_counts: dict[str, int]
    difficulty: Difficulty

    def to_dict(self) -> dict:
        return {
            "transistors": self.transistor_count,
            "nodes": self.node_count,
            "elements": dict(sorted(self.element_counts.items())),
            "difficulty": self.difficulty.value,
        }


def compute_metrics(netlist: Netlist) -> CircuitMetrics:
    """Count devices and nodes. Expects a flattened netlist; BJTs count as
    transistors alongside MOSFETs, and the multiplicity parameter counts as
    that many parallel devices."""
    transistors = 0
    counts: dict[str, int] = {}
    nodes: set[str] = set()
    for e in netlist.elements:
        counts[e.letter] = counts.get(e.letter, 0) + 1
        nodes.update(n for n in e.nodes if not is_ground(n))
        if isinstance(e, Mosfet):
            transistors += e.params.m
        elif isinstance(e, Bjt):
            transistors += e.params.m
    return CircuitMetrics(
        transistor_count=transistors,
        node_count=len(nodes),
        element_counts=counts,
        difficulty=classify_difficulty(transistors),
    )
