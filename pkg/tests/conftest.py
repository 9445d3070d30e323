import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dicosat.cotree import Cotree, Inner, Leaf
from dicosat.relations import ForbiddenSet, Instance, PartialHomologySet, parse_relations

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"

FIG1_TEXT = """\
V 1 2 3 4 5
R1 1 2
R1 2 3
R1 3 4
RX 3 1
RX 2 5
F0 2 4
F1 1 5
F1 4 5
"""

# the full set stated for the Fig. 1 example
FIG1_FULL = PartialHomologySet.from_pairs(
    r0=[],
    r1=[("1", "2"), ("2", "3"), ("3", "4"), ("1", "4"), ("2", "4")],
    rx=[("3", "1"), ("1", "5"), ("2", "5"), ("3", "5"), ("4", "5")],
)


@pytest.fixture
def fig1() -> Instance:
    return parse_relations(FIG1_TEXT)


def names(n: int) -> list[str]:
    return [f"v{i}" for i in range(n)]


def random_cotree(n: int, rng: np.random.Generator, labels="01X") -> Cotree:
    """Random ordered cotree by repeatedly merging random groups of current subtrees."""
    nodes: list = [Leaf(v) for v in names(n)]
    rng.shuffle(nodes)
    while len(nodes) > 1:
        k = int(rng.integers(2, min(4, len(nodes)) + 1))
        idx = sorted(rng.choice(len(nodes), size=k, replace=False).tolist())
        kids = [nodes[i] for i in idx]
        rng.shuffle(kids)
        for i in reversed(idx):
            nodes.pop(i)
        nodes.append(Inner(labels[int(rng.integers(len(labels)))], tuple(kids)))
    return Cotree(nodes[0])


@st.composite
def cotrees(draw, min_leaves=1, max_leaves=8):
    n = draw(st.integers(min_leaves, max_leaves))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_cotree(n, np.random.default_rng(seed))


@st.composite
def instances(draw, min_n=1, max_n=6, forbid=True):
    """Valid instances: each pair unassigned or in one of the four options; forbidden pairs only on unassigned pairs."""
    n = draw(st.integers(min_n, max_n))
    vs = names(n)
    r0, r1, rx, f0, f1, fx = [], [], [], [], [], []
    for i, j in itertools.combinations(range(n), 2):
        x, y = vs[i], vs[j]
        c = draw(st.integers(0, 4))
        if c == 1:
            r0.append((x, y))
        elif c == 2:
            r1.append((x, y))
        elif c == 3:
            rx.append((x, y))
        elif c == 4:
            rx.append((y, x))
        elif forbid:
            mask = draw(st.integers(0, 7))
            if mask & 1:
                f0.append((x, y))
            if mask & 2:
                f1.append((x, y))
            if mask & 4:
                fx.append((x, y) if draw(st.booleans()) else (y, x))
    return Instance(tuple(vs), PartialHomologySet.from_pairs(r0, r1, rx), ForbiddenSet.from_pairs(f0, f1, fx))


# acceptance criteria append "PASS ..." / "FAIL ..." lines here; they are repeated at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
