"""Quantum lift of unambiguous distributions, partial transpose and PPT checks.

Every state here comes from square roots of probabilities, so all matrices are
real and symmetric.  A bipartite index (a, b) is flattened to ``a * d_B + b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from boundkey.dist import (
    ZERO_TOL,
    JointDistribution3,
    eve_labels,
    marginal,
    validate_unambiguous,
)
from boundkey.errors import LoadError, NotUnambiguous
from boundkey.linalg import eigvalsh

# eigenvalues in [-CLAMP_TOL, 0) are rounding noise and count as zero
CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureState3:
    """Real amplitudes psi[a, b, e] of a tripartite pure state."""

    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=float)
        if psi.ndim != 3:
            raise LoadError(f"amplitudes must be 3-dimensional, got shape {psi.shape}")
        norm = np.sum(psi * psi)
        if abs(norm - 1.0) > 1e-10:
            raise LoadError(f"state is not normalized: squared norm {norm!r}")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @property
    def shape(self):
        return self.amplitudes.shape

    def reduced(self, keep: str) -> np.ndarray:
        """Reduced density matrix on one party ("A", "B" or "E")."""
        psi = self.amplitudes
        axis = "ABE".index(keep)
        m = np.moveaxis(psi, axis, 0).reshape(psi.shape[axis], -1)
        return m @ m.T


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    d_A: int
    d_B: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        n = self.d_A * self.d_B
        if m.shape != (n, n):
            raise LoadError(f"expected a {n}x{n} matrix, got {m.shape}")
        if np.max(np.abs(m - m.T), initial=0.0) > 1e-12:
            raise LoadError("density matrix is not symmetric")
        if abs(np.trace(m) - 1.0) > 1e-10:
            raise LoadError(f"density matrix trace {np.trace(m)!r} is not 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh(self.matrix)

    def to_json(self) -> dict:
        return {"dA": self.d_A, "dB": self.d_B, "matrix": self.matrix.ravel().tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "DensityMatrix":
        d_A, d_B = int(obj["dA"]), int(obj["dB"])
        n = d_A * d_B
        return cls(d_A, d_B, np.asarray(obj["matrix"], dtype=float).reshape(n, n))


@dataclass(frozen=True)
class PTReport:
    is_pt_invariant: bool
    max_abs_deviation: float
    min_eig_pt: float
    is_ppt: bool

    def to_json(self) -> dict:
        return {
            "is_pt_invariant": self.is_pt_invariant,
            "max_abs_deviation": self.max_abs_deviation,
            "min_eig_pt": self.min_eig_pt,
            "is_ppt": self.is_ppt,
        }


def lift_state(P: JointDistribution3) -> PureState3:
    """|psi> = sum sqrt(p(a,b,e)) |a>|b>|e>."""
    return PureState3(np.sqrt(P.p))


def reduce_to_AB(psi: PureState3) -> DensityMatrix:
    """Trace out Eve: rho[(a,b),(a',b')] = sum_e psi(a,b,e) psi(a',b',e)."""
    d_A, d_B, d_E = psi.shape
    m = psi.amplitudes.reshape(d_A * d_B, d_E)
    rho = m @ m.T
    rho = (rho + rho.T) / 2
    return DensityMatrix(d_A, d_B, rho)


def pt_matrix(m: np.ndarray, d_A: int, d_B: int) -> np.ndarray:
    """Partial transpose on Bob of a (d_A d_B)-square array."""
    t = np.asarray(m).reshape(d_A, d_B, d_A, d_B)
    return t.transpose(0, 3, 2, 1).reshape(d_A * d_B, d_A * d_B)


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """rho^Gamma[(a,b),(a',b')] = rho[(a,b'),(a',b)]; symmetric, not necessarily PSD."""
    return pt_matrix(rho.matrix, rho.d_A, rho.d_B)


def pt_report(rho: DensityMatrix, tol: float = 1e-9) -> PTReport:
    pt = partial_transpose(rho)
    dev = float(np.max(np.abs(pt - rho.matrix)))
    min_eig = float(eigvalsh(pt)[0])
    return PTReport(dev <= tol, dev, min_eig, min_eig >= -tol)


@dataclass(frozen=True)
class CombinatorialPTResult:
    ok: bool
    # (a, a', b, b', reason) with reason "cross" (condition 1) or "det" (condition 2)
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def pt_invariance_combinatorial(
    P: JointDistribution3, tol: float = 1e-9, zero_tol: float = ZERO_TOL
) -> CombinatorialPTResult:
    """PT-invariance of the lifted state, decided on P_AB and Eve's labels alone.

    For every a != a', b != b' with e(a,b) = e(a',b') a real symbol, the
    pair (a,b'), (a',b) must also share a real symbol and the 2x2 determinant
    of P_AB on those rows and columns must vanish to within ``tol``.
    """
    if not validate_unambiguous(P, zero_tol).ok:
        raise NotUnambiguous("PT-invariance test needs an unambiguous distribution")
    lab = eve_labels(P, zero_tol)
    pab = marginal(P, "AB").p
    d_A, d_B = lab.shape
    bad = []
    for a in range(d_A):
        for a2 in range(d_A):
            if a2 == a:
                continue
            for b in range(d_B):
                e = lab[a, b]
                if e < 0:
                    continue
                for b2 in range(d_B):
                    if b2 == b or lab[a2, b2] != e:
                        continue
                    if lab[a, b2] < 0 or lab[a, b2] != lab[a2, b]:
                        bad.append((a, a2, b, b2, "cross"))
                    elif abs(pab[a, b] * pab[a2, b2] - pab[a, b2] * pab[a2, b]) > tol:
                        bad.append((a, a2, b, b2, "det"))
    return CombinatorialPTResult(not bad, tuple(bad))


def von_neumann_entropy(m) -> float:
    """S(rho) in bits from Jacobi eigenvalues; tiny negative eigenvalues clamp to 0."""
    w = eigvalsh(m)
    w = np.where((w < 0) & (w >= -CLAMP_TOL), 0.0, w)
    if np.any(w < 0):
        raise ValueError(f"matrix has a negative eigenvalue {w.min()!r}")
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def coherent_information(psi: PureState3) -> float:
    """I(A>B) = S(B) - S(E) of the tripartite pure state, in bits."""
    return von_neumann_entropy(psi.reduced("B")) - von_neumann_entropy(psi.reduced("E"))
