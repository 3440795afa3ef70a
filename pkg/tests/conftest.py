import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from loopdist.loopgraph import LabeledDigraph
from loopdist.semigroup import close_generators

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def transformation_gens(draw, max_points=4, max_gens=3):
    n = draw(st.integers(1, max_points))
    k = draw(st.integers(1, max_gens))
    maps = [tuple(draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))) for _ in range(k)]
    return [(chr(ord("a") + i), m) for i, m in enumerate(maps)]


@st.composite
def semigroups(draw, max_points=4, max_gens=3):
    return close_generators(draw(transformation_gens(max_points, max_gens)))


@st.composite
def prob_vectors(draw, labels):
    ws = [draw(st.integers(1, 12)) for _ in labels]
    tot = sum(ws)
    return {lab: Fraction(w, tot) for lab, w in zip(labels, ws)}


def random_semigroup(rng: random.Random, max_points=4, max_gens=3):
    n = rng.randint(1, max_points)
    k = rng.randint(1, max_gens)
    gens = [(chr(ord("a") + i), tuple(rng.randrange(n) for _ in range(n))) for i in range(k)]
    return close_generators(gens)


def random_probs(rng: random.Random, labels):
    ws = [rng.randint(1, 12) for _ in labels]
    return {lab: Fraction(w, sum(ws)) for lab, w in zip(labels, ws)}


def nested_loop_graph():
    """Loop graph with spine a b c x and the loop b (a|c)* d a at vertex 1."""
    names = ("𝟙", "1", "2", "3", "4", "1′", "2′")
    edges = (
        (0, "a", 1), (1, "b", 2), (2, "c", 3), (3, "x", 4),
        (1, "b", 5), (5, "a", 5), (5, "c", 5), (5, "d", 6), (6, "a", 1),
    )
    return LabeledDigraph(names=names, edges=edges)


def branching_usp_graph():
    """Five-vertex USP graph with path a b c and side edges 2-d->4-a->1, 2-a->2."""
    names = ("𝟙", "1", "2", "3", "4")
    edges = ((0, "a", 1), (1, "b", 2), (2, "c", 3), (2, "d", 4), (4, "a", 1), (2, "a", 2))
    return LabeledDigraph(names=names, edges=edges)


@pytest.fixture
def nested_loops():
    return nested_loop_graph()


@pytest.fixture
def branching_usp():
    return branching_usp_graph()


# one summary line per acceptance criterion
_criteria: dict = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        n = int(name.split("_")[2])
        ok = report.outcome == "passed" and _criteria.get(n, (True,))[0]
        notes = [v for k, v in report.user_properties if k == "note"]
        _criteria[n] = (ok, " ".join(name.split("_")[3:]), notes)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, title, notes = _criteria[n]
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if notes:
            line += "  (" + "; ".join(notes) + ")"
        terminalreporter.write_line(line)
