"""Finite tripartite distributions, diagrams and classical information functionals.

Alice, Bob and Eve are the parties ``"A"``, ``"B"`` and ``"E"``; a joint
distribution is stored as a dense array indexed ``p[a, b, e]``.  All
entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from boundkey.errors import (
    AmbiguousEve,
    DimensionMismatch,
    InvalidDiagram,
    LoadError,
    SupportMismatch,
)

PARTIES = "ABE"

# probabilities at or below this are treated as structural zeros
ZERO_TOL = 1e-12
# printed fixtures carry 6 decimals
FIXTURE_TOL = 5e-6
# inputs whose total is off by more than this are rejected rather than renormalized
LOAD_TOL = 5e-6

Cell = tuple[int, int]


class _Yuzz:
    """Eve's symbol for a pair (a, b) that never occurs."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "YUZZ"

    def __reduce__(self):
        return (_Yuzz, ())


YUZZ = _Yuzz()


def _as_pmf(p, ndim: int, what: str) -> np.ndarray:
    arr = np.array(p, dtype=float)
    if arr.ndim != ndim:
        raise LoadError(f"{what}: expected a {ndim}-dimensional array, got shape {arr.shape}")
    if arr.size == 0 or min(arr.shape) < 1:
        raise LoadError(f"{what}: empty alphabet")
    if not np.all(np.isfinite(arr)):
        raise LoadError(f"{what}: non-finite entries")
    if np.any(arr < 0):
        raise LoadError(f"{what}: negative probability {arr.min()!r}")
    total = arr.sum()
    if abs(total - 1.0) > LOAD_TOL:
        raise LoadError(f"{what}: total probability {total!r} is not 1")
    if total != 1.0:
        arr = arr / total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointDistribution3:
    """Probability mass function p(a, b, e) over finite alphabets."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _as_pmf(self.p, 3, "joint distribution"))

    @property
    def d_A(self) -> int:
        return self.p.shape[0]

    @property
    def d_B(self) -> int:
        return self.p.shape[1]

    @property
    def d_E(self) -> int:
        return self.p.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.p.shape

    @classmethod
    def from_entries(cls, d_A: int, d_B: int, d_E: int, entries: Iterable[Sequence]) -> "JointDistribution3":
        p = np.zeros((d_A, d_B, d_E))
        for a, b, e, prob in entries:
            if not (0 <= a < d_A and 0 <= b < d_B and 0 <= e < d_E):
                raise LoadError(f"entry index {(a, b, e)} out of range")
            p[a, b, e] += float(prob)
        return cls(p)

    def entries(self, tol: float = 0.0) -> list[tuple[int, int, int, float]]:
        idx = np.argwhere(self.p > tol)
        return [(int(a), int(b), int(e), float(self.p[a, b, e])) for a, b, e in idx]

    def __eq__(self, other):
        if not isinstance(other, JointDistribution3):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.p, other.p)

    def __repr__(self) -> str:
        return f"JointDistribution3(d_A={self.d_A}, d_B={self.d_B}, d_E={self.d_E})"


@dataclass(frozen=True, eq=False)
class MarginalDistribution:
    """Distribution over a subset of the parties, axes in ``parties`` order."""

    parties: str
    p: np.ndarray

    def __post_init__(self):
        arr = _as_pmf(self.p, len(self.parties), f"marginal over {self.parties}")
        object.__setattr__(self, "p", arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.p.shape

    def __eq__(self, other):
        if not isinstance(other, MarginalDistribution):
            return NotImplemented
        return self.parties == other.parties and np.array_equal(self.p, other.p)


@dataclass(frozen=True, eq=False)
class NoisyChannel:
    """Column-stochastic map ``q[x, a] = Q(x|a)``."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or min(q.shape) < 1:
            raise LoadError(f"channel must be a nonempty 2-d array, got shape {q.shape}")
        if not np.all(np.isfinite(q)) or np.any(q < 0):
            raise LoadError("channel entries must be finite and nonnegative")
        cols = q.sum(axis=0)
        if np.any(np.abs(cols - 1.0) > LOAD_TOL):
            raise LoadError(f"channel columns must sum to 1, got {cols}")
        if np.any(cols != 1.0):
            q = q / cols
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def d_X(self) -> int:
        return self.q.shape[0]

    @property
    def d_A(self) -> int:
        return self.q.shape[1]

    @classmethod
    def identity(cls, d: int) -> "NoisyChannel":
        return cls(np.eye(d))

    @classmethod
    def constant(cls, d_A: int, d_X: int = 1) -> "NoisyChannel":
        q = np.zeros((d_X, d_A))
        q[0] = 1.0
        return cls(q)

    def __eq__(self, other):
        if not isinstance(other, NoisyChannel):
            return NotImplemented
        return np.array_equal(self.q, other.q)


def _canonical_cliques(cliques) -> tuple[tuple[Cell, ...], ...]:
    out = []
    for clique in cliques:
        cells = tuple(sorted((int(a), int(b)) for a, b in clique))
        if not cells:
            raise InvalidDiagram("empty clique")
        out.append(cells)
    return tuple(sorted(out))


@dataclass(frozen=True)
class Diagram:
    """Cells of a d_A x d_B grid grouped into diagonal cliques, one per Eve symbol.

    Cliques are stored sorted by their smallest cell, so clique ``e`` is Eve's
    symbol ``e``.
    """

    d_A: int
    d_B: int
    cliques: tuple[tuple[Cell, ...], ...] = field(default=())

    def __post_init__(self):
        if self.d_A < 1 or self.d_B < 1:
            raise InvalidDiagram("grid dimensions must be positive")
        cliques = _canonical_cliques(self.cliques)
        seen: set[Cell] = set()
        for clique in cliques:
            rows = {a for a, _ in clique}
            cols = {b for _, b in clique}
            if len(rows) != len(clique) or len(cols) != len(clique):
                raise InvalidDiagram(f"clique {clique} is not diagonal")
            for a, b in clique:
                if not (0 <= a < self.d_A and 0 <= b < self.d_B):
                    raise InvalidDiagram(f"cell {(a, b)} outside {self.d_A}x{self.d_B} grid")
                if (a, b) in seen:
                    raise InvalidDiagram(f"cell {(a, b)} belongs to two cliques")
                seen.add((a, b))
        object.__setattr__(self, "cliques", cliques)

    @property
    def d_E(self) -> int:
        return len(self.cliques)

    @property
    def cells(self) -> list[Cell]:
        return sorted(c for clique in self.cliques for c in clique)

    def labels(self) -> np.ndarray:
        """Grid of clique indices, -1 for cells outside the diagram."""
        lab = np.full((self.d_A, self.d_B), -1, dtype=int)
        for e, clique in enumerate(self.cliques):
            for a, b in clique:
                lab[a, b] = e
        return lab

    @classmethod
    def from_labels(cls, labels) -> "Diagram":
        lab = np.asarray(labels, dtype=int)
        groups: dict[int, list[Cell]] = {}
        for (a, b), e in np.ndenumerate(lab):
            if e >= 0:
                groups.setdefault(int(e), []).append((a, b))
        return cls(lab.shape[0], lab.shape[1], tuple(groups.values()))

    def edges(self) -> list[tuple[Cell, Cell]]:
        out = []
        for clique in self.cliques:
            for i, x in enumerate(clique):
                for y in clique[i + 1:]:
                    out.append((x, y))
        return out

    def crosses(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Row pairs and column pairs ``((a, a'), (b, b'))`` spanned by a cross."""
        lab = self.labels()
        found = set()
        for (a, b), (a2, b2) in self.edges():
            e1, e2 = lab[a, b2], lab[a2, b]
            if e1 >= 0 and e1 == e2:
                found.add((tuple(sorted((a, a2))), tuple(sorted((b, b2)))))
        return sorted(found)

    def is_cross_closed(self) -> bool:
        """Every edge (a,b)-(a',b') has its partner edge (a,b')-(a',b)."""
        lab = self.labels()
        for (a, b), (a2, b2) in self.edges():
            e1, e2 = lab[a, b2], lab[a2, b]
            if e1 < 0 or e1 != e2:
                return False
        return True

    def is_union_of_crosses(self) -> bool:
        """Cross-closed, nonempty, and with every cell on at least one edge."""
        if not self.cliques or any(len(c) < 2 for c in self.cliques):
            return False
        return self.is_cross_closed()

    def to_json(self) -> dict:
        return {
            "dA": self.d_A,
            "dB": self.d_B,
            "cliques": [[list(c) for c in clique] for clique in self.cliques],
        }


@dataclass(frozen=True)
class UnambiguityReport:
    flag_A: bool
    flag_B: bool
    flag_E: bool
    # (condition, i, j): condition "A" lists (b, e), "B" lists (a, e), "E" lists (a, b)
    violations: tuple[tuple[str, int, int], ...] = ()

    @property
    def ok(self) -> bool:
        return self.flag_A and self.flag_B and self.flag_E

    def to_json(self) -> dict:
        return {
            "flag_A": self.flag_A,
            "flag_B": self.flag_B,
            "flag_E": self.flag_E,
            "unambiguous": self.ok,
            "violations": [list(v) for v in self.violations],
        }


def validate_unambiguous(P: JointDistribution3, tol: float = ZERO_TOL) -> UnambiguityReport:
    """Check that any two parties' values determine the third's."""
    nz = P.p > tol
    bad_A = np.argwhere(nz.sum(axis=0) > 1)
    bad_B = np.argwhere(nz.sum(axis=1) > 1)
    bad_E = np.argwhere(nz.sum(axis=2) > 1)
    violations = (
        [("A", int(i), int(j)) for i, j in bad_A]
        + [("B", int(i), int(j)) for i, j in bad_B]
        + [("E", int(i), int(j)) for i, j in bad_E]
    )
    return UnambiguityReport(len(bad_A) == 0, len(bad_B) == 0, len(bad_E) == 0, tuple(violations))


def eve_symbol(P: JointDistribution3, a: int, b: int, tol: float = ZERO_TOL):
    """The unique e with p(a, b, e) nonzero, or YUZZ if there is none."""
    es = np.flatnonzero(P.p[a, b] > tol)
    if len(es) > 1:
        raise AmbiguousEve(f"cell {(a, b)} has Eve symbols {es.tolist()}")
    return int(es[0]) if len(es) else YUZZ


def eve_labels(P: JointDistribution3, tol: float = ZERO_TOL) -> np.ndarray:
    """Grid of Eve symbols e(a, b), with -1 standing for YUZZ."""
    nz = P.p > tol
    if np.any(nz.sum(axis=2) > 1):
        a, b = np.argwhere(nz.sum(axis=2) > 1)[0]
        raise AmbiguousEve(f"cell {(int(a), int(b))} has several Eve symbols")
    lab = np.where(nz.any(axis=2), nz.argmax(axis=2), -1)
    return lab


def diagram_of(P: JointDistribution3, tol: float = ZERO_TOL) -> Diagram:
    """Diagram read off an unambiguous distribution (Eve symbols become cliques)."""
    return Diagram.from_labels(eve_labels(P, tol))


def _pab_array(P_AB) -> np.ndarray:
    if isinstance(P_AB, MarginalDistribution):
        if P_AB.parties != "AB":
            raise DimensionMismatch(f"expected a marginal over AB, got {P_AB.parties}")
        return P_AB.p
    return np.asarray(P_AB, dtype=float)


def from_diagram(diagram: Diagram, P_AB, tol: float = ZERO_TOL) -> JointDistribution3:
    """Place P_AB(a, b) at Eve symbol e = clique index of (a, b)."""
    pab = _pab_array(P_AB)
    if pab.shape != (diagram.d_A, diagram.d_B):
        raise DimensionMismatch(f"P_AB shape {pab.shape} does not match {diagram.d_A}x{diagram.d_B} diagram")
    lab = diagram.labels()
    outside = (lab < 0) & (pab > tol)
    if outside.any():
        a, b = np.argwhere(outside)[0]
        raise SupportMismatch(f"P_AB is nonzero at {(int(a), int(b))}, which is not in the diagram")
    p = np.zeros((diagram.d_A, diagram.d_B, max(diagram.d_E, 1)))
    a, b = np.nonzero(lab >= 0)
    p[a, b, lab[a, b]] = pab[a, b]
    return JointDistribution3(p)


def marginal(P: JointDistribution3, keep: str) -> MarginalDistribution:
    """Sum out every party not named in ``keep``."""
    keep = "".join(c for c in PARTIES if c in keep.upper())
    if not keep:
        raise ValueError("keep must name at least one party")
    drop = tuple(i for i, c in enumerate(PARTIES) if c not in keep)
    return MarginalDistribution(keep, P.p.sum(axis=drop) if drop else P.p)


def entropy_of(p) -> float:
    """Shannon entropy in bits of a (possibly multi-dimensional) pmf array."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def entropy(M) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    if isinstance(M, MarginalDistribution):
        M = M.p
    return entropy_of(M)


def joint_entropy(P: JointDistribution3, parties: str) -> float:
    return entropy(marginal(P, parties))


def mutual_information(P: JointDistribution3, X: str, Y: str) -> float:
    """I(X;Y) = H(X) + H(Y) - H(XY) for two distinct single parties."""
    X, Y = X.upper(), Y.upper()
    if X == Y or X not in PARTIES or Y not in PARTIES:
        raise ValueError(f"need two distinct parties from {PARTIES}, got {X!r}, {Y!r}")
    return joint_entropy(P, X) + joint_entropy(P, Y) - joint_entropy(P, X + Y)


def conditional_entropy(P: JointDistribution3, X: str, given: str) -> float:
    return joint_entropy(P, X + given) - joint_entropy(P, given)


def apply_channel(P: JointDistribution3, ch: NoisyChannel) -> JointDistribution3:
    """Process Alice's variable: P_XBE(x,b,e) = sum_a Q(x|a) P_ABE(a,b,e)."""
    if ch.d_A != P.d_A:
        raise DimensionMismatch(f"channel input size {ch.d_A} != d_A {P.d_A}")
    out = np.einsum("xa,abe->xbe", ch.q, P.p)
    return JointDistribution3(out)


def relabel(P: JointDistribution3, perm_A=None, perm_B=None, perm_E=None) -> JointDistribution3:
    """Permute alphabets; ``perm_X[i]`` is the new position of symbol i."""
    p = P.p
    for axis, perm in enumerate((perm_A, perm_B, perm_E)):
        if perm is None:
            continue
        inv = np.argsort(np.asarray(perm))
        p = np.take(p, inv, axis=axis)
    return JointDistribution3(p)


def canonical_eve_order(P: JointDistribution3, tol: float = ZERO_TOL) -> JointDistribution3:
    """Relabel E so that symbols appear in order of their first nonzero (a, b) cell.

    Eve symbols that never occur are moved to the end.
    """
    first = []
    flat = P.p.reshape(-1, P.d_E) > tol
    for e in range(P.d_E):
        hits = np.flatnonzero(flat[:, e])
        first.append(hits[0] if len(hits) else flat.shape[0] + e)
    order = np.argsort(first, kind="stable")
    return JointDistribution3(P.p[:, :, order])


def equal_up_to_eve_relabeling(P: JointDistribution3, Q: JointDistribution3, atol: float = 1e-12) -> bool:
    if P.d_A != Q.d_A or P.d_B != Q.d_B:
        return False
    cp, cq = canonical_eve_order(P).p, canonical_eve_order(Q).p
    d = max(cp.shape[2], cq.shape[2])
    cp = np.pad(cp, ((0, 0), (0, 0), (0, d - cp.shape[2])))
    cq = np.pad(cq, ((0, 0), (0, 0), (0, d - cq.shape[2])))
    return bool(np.allclose(cp, cq, rtol=0.0, atol=atol))
