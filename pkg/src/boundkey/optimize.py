"""Multi-start optimization of the noisy-processing key rate on a fixed diagram.

P_AB on the diagram's cells and each column of Q(x|a) are softmax images of
free logits, so normalization holds by construction.  The objective is the
key rate minus ``weight * sum(det**2)`` over the cross determinants, with the
weight raised stage by stage and each stage re-polishing the incumbent.

A cross determinant vanishes exactly when z11 + z22 - z12 - z21 = 0 for the
logits z of its four cells, a linear condition.  The default ``"nullspace"``
method therefore searches only logit vectors in the null space of those
conditions, which keeps every iterate feasible and leaves the penalty acting
on rounding noise.  ``"penalty"`` searches all logits and relies on the
penalty alone, finishing with a Gauss-Newton projection onto the constraints.

Start ``i`` draws from PCG64 seeded with ``SeedSequence(seed, spawn_key=(i,))``,
so a start's stream does not depend on how many starts are run or in which
order; results merge by (highest rate, then lexicographically smallest P_AB).
Q starts near a random hard partition of A's alphabet.
"""
from __future__ import annotations

import concurrent.futures
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from boundkey.dist import Diagram, JointDistribution3, MarginalDistribution, NoisyChannel, _pab_array, from_diagram
from boundkey.errors import InvalidDiagram, NoFeasiblePoint
from boundkey.keyrate import noisy_bound
from boundkey.neldermead import nelder_mead

log = logging.getLogger(__name__)

FEASIBLE_TOL = 1e-8


@dataclass(frozen=True)
class OptConfig:
    starts: int = 50
    seed: int = 0
    penalty_schedule: tuple[float, ...] = (1e2, 1e4, 1e6, 1e8)
    simplex_tol: float = 1e-10
    max_evals: int = 200000
    d_X: int = 2
    workers: int = 1
    method: str = "nullspace"

    def __post_init__(self):
        if self.method not in ("nullspace", "penalty"):
            raise ValueError(f"unknown method {self.method!r}")
        sched = tuple(float(w) for w in self.penalty_schedule)
        object.__setattr__(self, "penalty_schedule", sched)
        if self.starts < 1 or self.d_X < 1 or self.max_evals < 1 or self.workers < 1:
            raise ValueError("starts, d_X, max_evals and workers must be positive")
        if self.simplex_tol <= 0 or not sched or any(w <= 0 for w in sched):
            raise ValueError("tolerance and penalty weights must be positive")
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValueError("penalty weights must be strictly increasing")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True, eq=False)
class OptResult:
    best_rate: float
    P_AB: MarginalDistribution
    Q: NoisyChannel
    constraint_residual: float
    evaluations: int
    start_index: int
    diagram: Diagram = field(default=None)

    @property
    def feasible(self) -> bool:
        return self.constraint_residual <= FEASIBLE_TOL

    def distribution(self) -> JointDistribution3:
        return from_diagram(self.diagram, self.P_AB)

    def to_json(self) -> dict:
        return {
            "best_rate": self.best_rate,
            "feasible": self.feasible,
            "constraint_residual": self.constraint_residual,
            "evaluations": self.evaluations,
            "start_index": self.start_index,
            "P_AB": self.P_AB.p.tolist(),
            "Q": self.Q.q.tolist(),
            "diagram": None if self.diagram is None else self.diagram.to_json(),
        }


def diagram_crosses(diagram: Diagram) -> list[tuple[int, int, int, int]]:
    """(a, a', b, b') for every 2x2 block spanned by a cross of the diagram."""
    return [(a, a2, b, b2) for (a, a2), (b, b2) in diagram.crosses()]


def constraint_residuals(P_AB, diagram: Diagram) -> tuple[float, list[float]]:
    """|sum P_AB - 1| and |det| of P_AB restricted to each cross of the diagram."""
    pab = _pab_array(P_AB)
    norm = abs(float(pab.sum()) - 1.0)
    dets = [abs(float(pab[a, b] * pab[a2, b2] - pab[a, b2] * pab[a2, b])) for a, a2, b, b2 in diagram_crosses(diagram)]
    return norm, dets


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=-1, keepdims=True)


def _xlogx_sum(v: np.ndarray) -> float:
    v = v[v > 0]
    return float(np.dot(v, np.log2(v)))


class _Problem:
    """Precomputed index structure for fast objective evaluation on one diagram."""

    def __init__(self, diagram: Diagram, d_X: int, method: str = "nullspace"):
        if not diagram.cliques:
            raise InvalidDiagram("diagram has no cells")
        self.diagram = diagram
        self.d_X = d_X
        cells = diagram.cells
        lab = diagram.labels()
        self.n = len(cells)
        self.a = np.array([c[0] for c in cells])
        self.b = np.array([c[1] for c in cells])
        self.e = np.array([lab[c] for c in cells])
        index = {c: i for i, c in enumerate(cells)}
        self.ind_b = np.zeros((self.n, diagram.d_B))
        self.ind_b[np.arange(self.n), self.b] = 1.0
        self.ind_e = np.zeros((self.n, diagram.d_E))
        self.ind_e[np.arange(self.n), self.e] = 1.0
        crosses = diagram_crosses(diagram)
        self.c11 = np.array([index[(a, b)] for a, a2, b, b2 in crosses], dtype=int)
        self.c22 = np.array([index[(a2, b2)] for a, a2, b, b2 in crosses], dtype=int)
        self.c12 = np.array([index[(a, b2)] for a, a2, b, b2 in crosses], dtype=int)
        self.c21 = np.array([index[(a2, b)] for a, a2, b, b2 in crosses], dtype=int)
        self.d_A = diagram.d_A
        if method == "nullspace":
            cons = np.zeros((len(crosses) + 1, self.n))
            k = np.arange(len(crosses))
            np.add.at(cons, (k, self.c11), 1.0)
            np.add.at(cons, (k, self.c22), 1.0)
            np.add.at(cons, (k, self.c12), -1.0)
            np.add.at(cons, (k, self.c21), -1.0)
            cons[-1] = 1.0  # softmax is shift invariant; drop that direction too
            self.basis = null_space(cons)
        else:
            # pin the last logit to 0
            self.basis = np.eye(self.n)[:, :-1]
        self.n_p = self.basis.shape[1]
        self.n_q = self.d_A * (d_X - 1)
        self.dim = self.n_p + self.n_q

    def unpack(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p = _softmax_rows(self.basis @ theta[: self.n_p])
        zq = np.zeros((self.d_A, self.d_X))
        zq[:, : self.d_X - 1] = theta[self.n_p:].reshape(self.d_A, self.d_X - 1)
        q = _softmax_rows(zq).T  # (d_X, d_A)
        return p, q

    def dets(self, p: np.ndarray) -> np.ndarray:
        return p[self.c11] * p[self.c22] - p[self.c12] * p[self.c21]

    def rate(self, p: np.ndarray, q: np.ndarray) -> float:
        w = q[:, self.a] * p  # (d_X, n) mass of (x, cell)
        xb = w @ self.ind_b
        xe = w @ self.ind_e
        pb = p @ self.ind_b
        pe = p @ self.ind_e
        # H(B) - H(E) - H(XB) + H(XE)
        return -_xlogx_sum(pb) + _xlogx_sum(pe) + _xlogx_sum(xb.ravel()) - _xlogx_sum(xe.ravel())

    def objective(self, theta: np.ndarray, weight: float) -> float:
        p, q = self.unpack(theta)
        d = self.dets(p)
        return -self.rate(p, q) + weight * float(np.dot(d, d))

    def project(self, p: np.ndarray, iters: int = 30) -> np.ndarray:
        """Gauss-Newton projection onto {dets = 0, sum = 1} keeping the support positive."""
        if len(self.c11) == 0:
            return p / p.sum()
        x = p.copy()
        for _ in range(iters):
            g = np.concatenate([self.dets(x), [x.sum() - 1.0]])
            if np.max(np.abs(g)) <= 1e-17:
                break
            jac = np.zeros((len(g), self.n))
            k = np.arange(len(self.c11))
            np.add.at(jac, (k, self.c11), x[self.c22])
            np.add.at(jac, (k, self.c22), x[self.c11])
            np.add.at(jac, (k, self.c12), -x[self.c21])
            np.add.at(jac, (k, self.c21), -x[self.c12])
            jac[-1] = 1.0
            step = np.linalg.lstsq(jac, -g, rcond=None)[0]
            t = 1.0
            while np.any(x + t * step <= 0) and t > 1e-6:
                t /= 2
            if np.any(x + t * step <= 0):
                return p
            x = x + t * step
        return x

    def residual(self, p: np.ndarray) -> float:
        d = self.dets(p)
        return max(abs(float(p.sum()) - 1.0), float(np.max(np.abs(d))) if len(d) else 0.0)


def _pab_grid(prob: _Problem, p: np.ndarray) -> np.ndarray:
    grid = np.zeros((prob.diagram.d_A, prob.diagram.d_B))
    grid[prob.a, prob.b] = p
    return grid


def start_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _partition_logits(rng: np.random.Generator, d_A: int, d_X: int) -> np.ndarray:
    """Q logits near a random non-constant deterministic map a -> x.

    A near-uniform Q sits on the rate-0 plateau (X independent of everything),
    which Nelder-Mead rarely leaves; a hard partition starts off it.
    """
    if d_X == 1:
        return np.zeros(0)
    x = rng.integers(0, d_X, size=d_A)
    if d_A > 1 and np.all(x == x[0]):
        x[rng.integers(0, d_A)] = (x[0] + 1 + rng.integers(0, d_X - 1)) % d_X
    z = np.zeros((d_A, d_X))
    z[np.arange(d_A), x] = 3.0
    z += rng.normal(scale=0.5, size=z.shape)
    # the last class is the reference with logit 0
    return (z[:, :-1] - z[:, -1:]).ravel()


def _run_start(diagram: Diagram, cfg: OptConfig, index: int) -> OptResult:
    prob = _Problem(diagram, cfg.d_X, cfg.method)
    rng = start_rng(cfg.seed, index)
    theta = rng.normal(scale=1.5, size=prob.dim)
    theta[prob.n_p:] = _partition_logits(rng, prob.d_A, cfg.d_X)
    evals = 0
    budget = cfg.max_evals
    for stage, weight in enumerate(cfg.penalty_schedule):
        remaining = budget - evals
        if remaining <= prob.dim + 1:
            break
        res = nelder_mead(
            lambda t: prob.objective(t, weight),
            theta,
            step=1.0 if stage == 0 else 0.1,
            ftol=cfg.simplex_tol,
            max_evals=remaining,
            max_restarts=10,
        )
        theta = res.x
        evals += res.evaluations
    p, q = prob.unpack(theta)
    p = prob.project(p)
    pab = _pab_grid(prob, p)
    P_AB = MarginalDistribution("AB", pab)
    Q = NoisyChannel(q)
    rate = noisy_bound(from_diagram(diagram, P_AB), Q)
    return OptResult(rate, P_AB, Q, prob.residual(p), evals, index, diagram)


def _better(x: OptResult, y: OptResult) -> OptResult:
    """Associative, commutative merge: higher rate wins, ties go to the smaller P_AB."""
    kx = (-x.best_rate, tuple(x.P_AB.p.ravel()), x.start_index)
    ky = (-y.best_rate, tuple(y.P_AB.p.ravel()), y.start_index)
    return x if kx <= ky else y


def run_starts(diagram: Diagram, cfg: OptConfig, indices) -> list[OptResult]:
    indices = list(indices)
    if cfg.workers > 1 and len(indices) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futs = [pool.submit(_run_start, diagram, cfg, i) for i in indices]
            return [f.result() for f in futs]
    out = []
    for i in indices:
        r = _run_start(diagram, cfg, i)
        log.debug("start %d: rate %.8f residual %.2e evals %d", i, r.best_rate, r.constraint_residual, r.evaluations)
        out.append(r)
    return out


def merge_results(results) -> OptResult:
    feasible = [r for r in results if r.feasible]
    if not feasible:
        raise NoFeasiblePoint(f"all {len(results)} starts ended with constraint residual above {FEASIBLE_TOL}")
    best = feasible[0]
    for r in feasible[1:]:
        best = _better(best, r)
    return best


def maximize_keyrate(diagram: Diagram, cfg: OptConfig | None = None) -> OptResult:
    """Best feasible noisy-processing rate found over ``cfg.starts`` random starts."""
    cfg = cfg or OptConfig()
    results = run_starts(diagram, cfg, range(cfg.starts))
    best = merge_results(results)
    total = sum(r.evaluations for r in results)
    return OptResult(best.best_rate, best.P_AB, best.Q, best.constraint_residual, total, best.start_index, diagram)


def snap_to_constraints(P_AB, diagram: Diagram) -> MarginalDistribution:
    """Nearest point (Gauss-Newton) with every cross determinant exactly zero.

    Used to separate rounding in printed data from genuine constraint
    violations; the support is unchanged.
    """
    pab = _pab_array(P_AB)
    prob = _Problem(diagram, 2, "penalty")
    p = prob.project(pab[prob.a, prob.b] / pab.sum())
    return MarginalDistribution("AB", _pab_grid(prob, p))
