"""The five published private bound-entangled examples.

P_AB and Q(x|a) are kept as the printed decimal strings and converted on
load.  Printed P_AB matrices may total 1 +- 2e-6 and are renormalized.  The
diagrams are not printed in machine-readable form; ``data/diagrams.json``
caches the output of :func:`infer_fixture_diagram`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from importlib import resources

import numpy as np

from boundkey.diagrams import infer_diagram
from boundkey.dist import FIXTURE_TOL, Diagram, JointDistribution3, MarginalDistribution, NoisyChannel, from_diagram
from boundkey.io import diagram_from_json
from boundkey.keyrate import noisy_bound

FIXTURE_NAMES = ("3x3", "4x4", "4x5", "5x6", "6x5")


def _data(name: str) -> str:
    return resources.files("boundkey").joinpath("data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _raw() -> dict:
    return json.loads(_data("fixtures.json"))


@lru_cache(maxsize=None)
def _cached_diagrams() -> dict:
    return json.loads(_data("diagrams.json"))


@dataclass(frozen=True)
class Fixture:
    name: str
    pab_text: tuple[tuple[str, ...], ...]
    q_text: tuple[tuple[str, ...], ...]
    d_E: int
    diagram: Diagram

    @property
    def P_AB(self) -> MarginalDistribution:
        return MarginalDistribution("AB", np.array([[float(Decimal(x)) for x in row] for row in self.pab_text]))

    @property
    def channel(self) -> NoisyChannel:
        return NoisyChannel(np.array([[float(Decimal(x)) for x in row] for row in self.q_text]))

    @property
    def dims(self) -> tuple[int, int]:
        return len(self.pab_text), len(self.pab_text[0])

    def distribution(self) -> JointDistribution3:
        return from_diagram(self.diagram, self.P_AB)


def infer_fixture_diagram(name: str, tol: float = FIXTURE_TOL) -> Diagram:
    """Infer the fixture's diagram from its printed P_AB and d_E.

    When several diagrams fit, the one on which the printed channel gives the
    highest rate is kept: the printed P_AB and Q are optimal for the diagram
    that was actually used.
    """
    raw = _raw()[name]
    pab = np.array([[float(Decimal(x)) for x in row] for row in raw["P_AB"]])
    pab = pab / pab.sum()
    ch = NoisyChannel(np.array([[float(Decimal(x)) for x in row] for row in raw["Q"]]))
    candidates = infer_diagram(pab, raw["dE"], tol)
    return max(candidates, key=lambda d: noisy_bound(from_diagram(d, pab), ch))


def load_fixture(name: str, reinfer: bool = False) -> Fixture:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    raw = _raw()[name]
    if reinfer:
        diagram = infer_fixture_diagram(name)
    else:
        diagram = diagram_from_json(_cached_diagrams()[name])
    return Fixture(
        name,
        tuple(tuple(r) for r in raw["P_AB"]),
        tuple(tuple(r) for r in raw["Q"]),
        int(raw["dE"]),
        diagram,
    )


def all_fixtures(reinfer: bool = False) -> list[Fixture]:
    return [load_fixture(n, reinfer) for n in FIXTURE_NAMES]


def fixture_distribution_json(fx: Fixture) -> dict:
    """Distribution file content keeping the printed decimals as strings."""
    lab = fx.diagram.labels()
    entries = []
    for a, row in enumerate(fx.pab_text):
        for b, text in enumerate(row):
            if Decimal(text) != 0:
                entries.append([a, b, int(lab[a, b]), text])
    d_A, d_B = fx.dims
    return {"dA": d_A, "dB": d_B, "dE": fx.d_E, "entries": entries}


def fixture_channel_json(fx: Fixture) -> dict:
    return {"dX": len(fx.q_text), "dA": len(fx.q_text[0]), "q": [list(r) for r in fx.q_text]}
