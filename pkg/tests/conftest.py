import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from boundkey.dist import Diagram, JointDistribution3  # noqa: E402

ACCEPTANCE_LINES = []


def random_diagram(rng, d_A, d_B, d_E):
    """Random diagonal cliques: each Eve symbol gets a partial matching of rows to columns."""
    free = {(a, b) for a in range(d_A) for b in range(d_B)}
    cliques = []
    for _ in range(d_E):
        size = int(rng.integers(1, min(d_A, d_B) + 1))
        rows = rng.permutation(d_A)[:size]
        cols = rng.permutation(d_B)[:size]
        clique = [(int(a), int(b)) for a, b in zip(rows, cols) if (int(a), int(b)) in free]
        if not clique:
            continue
        free -= set(clique)
        cliques.append(clique)
    return Diagram(d_A, d_B, tuple(cliques))


def random_unambiguous(rng, d_A, d_B, d_E):
    d = random_diagram(rng, d_A, d_B, d_E)
    p = np.zeros((d_A, d_B, d_E))
    for e, clique in enumerate(d.cliques):
        for a, b in clique:
            p[a, b, e] = rng.uniform(0.05, 1.0)
    return JointDistribution3(p / p.sum())


def correlated(d):
    p = np.zeros((d, d, 1))
    p[np.arange(d), np.arange(d), 0] = 1.0 / d
    return JointDistribution3(p)


def point_mass(shape=(1, 1, 1)):
    p = np.zeros(shape)
    p[0, 0, 0] = 1.0
    return JointDistribution3(p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
