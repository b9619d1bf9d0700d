import random

import pytest

from spicebench.metrics import CircuitMetrics, Difficulty, classify_difficulty, compute_metrics
from spicebench.netlist import Netlist, flatten, parse_netlist

from conftest import corpus_text


@pytest.mark.parametrize(
    "count,tier",
    [
        (8, Difficulty.EASY),      # cross-coupled NOR latch
        (20, Difficulty.MEDIUM),   # 4:1 transmission-gate mux
        (30, Difficulty.HARD),     # common-source op-amp
        (60, Difficulty.EXTREME),  # delta-sigma modulator
        (0, Difficulty.EASY),
        (10, Difficulty.EASY),
        (11, Difficulty.MEDIUM),
        (25, Difficulty.MEDIUM),
        (26, Difficulty.HARD),
        (45, Difficulty.HARD),
        (46, Difficulty.EXTREME),
        (88, Difficulty.EXTREME),
    ],
)
def test_classify(count, tier):
    assert classify_difficulty(count) is tier


def test_classify_rejects_negative():
    with pytest.raises(ValueError):
        classify_difficulty(-1)


def test_classify_monotone():
    tiers = [classify_difficulty(n).order for n in range(0, 200)]
    assert tiers == sorted(tiers)


def test_sr_latch_counts():
    m = compute_metrics(flatten(parse_netlist(corpus_text("sr_latch.sp"))))
    assert m.transistor_count == 8
    assert m.difficulty is Difficulty.EASY


def test_empty_netlist():
    m = compute_metrics(Netlist())
    assert m.transistor_count == 0
    assert m.node_count == 0
    assert m.element_counts == {}
    assert m.difficulty is Difficulty.EASY


def test_three_inverter_chain_counts_six():
    text = (
        ".model NMOD NMOS (VTO=1)\n.model PMOD PMOS (VTO=-1)\n"
        ".subckt INV a y vdd\n"
        "MP y a vdd vdd PMOD W=2u L=1u\n"
        "MN y a 0 0 NMOD W=1u L=1u\n"
        ".ends\n"
        "X1 a b vdd INV\nX2 b c vdd INV\nX3 c d vdd INV\n"
        "VDD vdd 0 DC 5\nVA a 0 DC 0\n.op\n.end\n"
    )
    # brute force on the hand-flattened form: 3 instances x 2 MOSFETs
    m = compute_metrics(flatten(parse_netlist(text)))
    assert m.transistor_count == 6
    assert m.element_counts["M"] == 6


def test_multiplicity_counts():
    m = compute_metrics(flatten(parse_netlist(corpus_text("mos_mult.sp"))))
    assert m.transistor_count == 4
    q = compute_metrics(flatten(parse_netlist(corpus_text("q_mult.sp"))))
    assert q.transistor_count == 2


def test_bjt_counts_as_transistor():
    m = compute_metrics(flatten(parse_netlist(corpus_text("bjt_stage.sp"))))
    assert m.transistor_count == 1


def test_node_count_excludes_ground():
    m = compute_metrics(parse_netlist("V1 a 0 DC 1\nR1 a b 1k\nR2 b 0 1k\n.end"))
    assert m.node_count == 2


def test_invariant_under_reorder_and_rename():
    rng = random.Random(3)
    base = parse_netlist(corpus_text("nand2.sp"))
    reordered = Netlist(
        title=base.title,
        elements=rng.sample(base.elements, k=len(base.elements)),
        models=base.models,
        directives=base.directives,
        end_present=base.end_present,
    )
    renamed_text = corpus_text("nand2.sp").replace(" out ", " y9 ").replace(" mid ", " n42 ")
    renamed = parse_netlist(renamed_text)
    counts = {
        compute_metrics(n).transistor_count for n in (base, reordered, renamed)
    }
    assert counts == {4}


def test_json_shape():
    m = compute_metrics(flatten(parse_netlist(corpus_text("inverter.sp"))))
    blob = m.to_dict()
    assert blob == {
        "transistors": 2,
        "nodes": 3,
        "elements": {"C": 1, "M": 2, "V": 2},
        "difficulty": "easy",
    }
