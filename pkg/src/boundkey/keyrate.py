"""Key-rate functionals: advantage, the noisy-processing lower bound, and the
closed form for the structured 4x5 family."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from boundkey.dist import (
    Diagram,
    JointDistribution3,
    NoisyChannel,
    apply_channel,
    entropy_of,
)
from boundkey.errors import DimensionMismatch, DomainError

H_ZERO = 1e-15


@dataclass(frozen=True)
class KeyRateReport:
    advantage_AB_vs_E: float
    noisy_bound: float
    channel_used: NoisyChannel | None
    direction: str = "A->B"

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "advantage": self.advantage_AB_vs_E,
            "noisy_bound": self.noisy_bound,
            "channel": None if self.channel_used is None else self.channel_used.q.tolist(),
        }

    def csv_row(self, name: str = "") -> list:
        return [name, self.direction, f"{self.advantage_AB_vs_E:.10f}", f"{self.noisy_bound:.10f}"]


CSV_HEADER = ["name", "direction", "advantage_bits", "noisy_bound_bits"]


def _swap_AB(P: JointDistribution3) -> JointDistribution3:
    return JointDistribution3(P.p.transpose(1, 0, 2))


def advantage_array(p: np.ndarray) -> float:
    """I(F;G) - I(F;E) for an array indexed (f, g, e) with F the sender.

    Written as H(G) - H(FG) - H(E) + H(FE); H(F) cancels.
    """
    return (
        entropy_of(p.sum(axis=(0, 2)))
        - entropy_of(p.sum(axis=2))
        - entropy_of(p.sum(axis=(0, 1)))
        + entropy_of(p.sum(axis=1))
    )


def advantage(P: JointDistribution3, from_party: str = "A") -> float:
    """One-way rate I(F;G) - I(F;E) with F the sending party, in bits."""
    from_party = from_party.upper()
    if from_party not in ("A", "B"):
        raise ValueError(f"from_party must be 'A' or 'B', got {from_party!r}")
    p = P.p if from_party == "A" else P.p.transpose(1, 0, 2)
    return advantage_array(p)


def noisy_bound(P: JointDistribution3, ch: NoisyChannel, from_party: str = "A") -> float:
    """I(X;G) - I(X;E) where X is the sender's variable passed through ``ch``."""
    from_party = from_party.upper()
    if from_party == "B":
        P = _swap_AB(P)
    if ch.d_A != P.d_A:
        raise DimensionMismatch(f"channel input size {ch.d_A} != sender alphabet {P.d_A}")
    return advantage(apply_channel(P, ch), "A")


def keyrate_report(P: JointDistribution3, ch: NoisyChannel | None = None, from_party: str = "A") -> KeyRateReport:
    adv = advantage(P, from_party)
    bound = adv if ch is None else noisy_bound(P, ch, from_party)
    direction = "A->B" if from_party.upper() == "A" else "B->A"
    return KeyRateReport(adv, bound, ch, direction)


def h(p: float) -> float:
    """-p log2 p with h(0) = 0."""
    return 0.0 if p < H_ZERO else -p * math.log2(p)


def f_structured(a: float, b: float, c: float, d: float, e: float) -> float:
    """Closed-form key rate of the structured 4x5 family (requires a*b = d*e for PT-invariance)."""
    xs = (a, b, c, d, e)
    if any(x < 0 for x in xs):
        raise DomainError(f"parameters must be nonnegative, got {xs}")
    if abs(sum(xs) - 1.0) > 1e-9:
        raise DomainError(f"parameters must sum to 1, got {sum(xs)!r}")
    return (
        -a - c - e
        + h(a) - h(d) + h(e)
        - h(a + b) + h(b + d) + h(c + d) - h(c + d + e)
    )


# Four 2-cliques carrying (a, b)/4 and four 3-cliques carrying (c, d, e)/4; the
# only cross determinants that are not identically zero are ab - de.
STRUCTURED_4X5 = Diagram(
    4,
    5,
    (
        ((0, 0), (3, 3)),
        ((0, 1), (3, 4)),
        ((0, 2), (1, 3), (2, 4)),
        ((0, 3), (1, 2), (3, 0)),
        ((0, 4), (2, 2), (3, 1)),
        ((1, 0), (2, 1), (3, 2)),
        ((1, 1), (2, 0)),
        ((1, 4), (2, 3)),
    ),
)

STRUCTURED_4X5_CHANNEL = NoisyChannel(np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]]))


def structured_pab(a: float, b: float, c: float, d: float, e: float) -> np.ndarray:
    """The 4x5 P_AB of the structured family."""
    return np.array(
        [
            [a, b, c, d, e],
            [e, b, c, d, a],
            [a, d, c, b, e],
            [e, d, c, b, a],
        ],
        dtype=float,
    ) / 4.0
