"""Cyclic Jacobi eigensolver for small real symmetric matrices."""
from __future__ import annotations

import numpy as np

from boundkey.errors import EigenFailure

OFF_TOL = 1e-13
MAX_SWEEPS = 100


def _off_norm(a: np.ndarray) -> float:
    # direct sum; ||a||^2 - ||diag||^2 cancels badly near convergence
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(m, off_tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix.

    Sweeps rotate every off-diagonal pair in row order until the off-diagonal
    Frobenius norm drops to ``off_tol`` times the matrix norm (absolute
    ``off_tol`` for matrices of norm below 1).
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2
    v = np.eye(n)
    scale = max(1.0, np.linalg.norm(a))
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= off_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    # theta**2 would overflow; t -> 1/(2 theta)
                    t = 0.5 / theta
                elif theta != 0:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = _off_norm(a)
        if off > off_tol * scale:
            raise EigenFailure(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m, **kw) -> np.ndarray:
    return jacobi_eigh(m, **kw)[0]
