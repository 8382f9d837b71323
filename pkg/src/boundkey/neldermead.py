"""Nelder-Mead simplex minimization with restarts.

Uses the dimension-adaptive coefficients of Gao and Han (2012), which behave
better than the classic (1, 2, 1/2, 1/2) choice beyond ~10 dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class NMResult:
    x: np.ndarray
    fun: float
    evaluations: int
    restarts: int
    converged: bool


def _simplex(x0: np.ndarray, step: float) -> np.ndarray:
    n = len(x0)
    sim = np.tile(x0, (n + 1, 1))
    sim[1:] += step * np.eye(n)
    return sim


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0,
    step: float = 0.5,
    ftol: float = 1e-10,
    xtol: float = 1e-7,
    max_evals: int = 20000,
    max_restarts: int = 5,
) -> NMResult:
    """Minimize ``f`` from ``x0``.

    Converges when the spread of simplex values is at most ``ftol`` and every
    vertex lies within ``xtol`` of the best one.  After convergence the
    simplex is rebuilt around the best point and the search resumes, until a
    restart fails to improve the value by more than ``ftol`` or the budget
    runs out.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    alpha, beta = 1.0, 1.0 + 2.0 / n
    gamma, delta = 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n

    evals = 0

    def fe(x):
        nonlocal evals
        evals += 1
        v = f(x)
        return v if np.isfinite(v) else np.inf

    best_x, best_f = x0.copy(), fe(x0)
    restarts = 0
    converged = False
    cur_step = step
    while True:
        sim = _simplex(best_x, cur_step)
        fs = np.empty(n + 1)
        fs[0] = best_f
        for i in range(1, n + 1):
            fs[i] = fe(sim[i])
        converged = False
        while evals < max_evals:
            order = np.argsort(fs, kind="stable")
            sim, fs = sim[order], fs[order]
            if fs[-1] - fs[0] <= ftol and np.max(np.abs(sim[1:] - sim[0])) <= xtol:
                converged = True
                break
            centroid = sim[:-1].mean(axis=0)
            xr = centroid + alpha * (centroid - sim[-1])
            fr = fe(xr)
            if fr < fs[0]:
                xe = centroid + beta * (xr - centroid)
                fe_ = fe(xe)
                if fe_ < fr:
                    sim[-1], fs[-1] = xe, fe_
                else:
                    sim[-1], fs[-1] = xr, fr
                continue
            if fr < fs[-2]:
                sim[-1], fs[-1] = xr, fr
                continue
            if fr < fs[-1]:
                xc = centroid + gamma * (xr - centroid)
                fc = fe(xc)
                if fc <= fr:
                    sim[-1], fs[-1] = xc, fc
                    continue
            else:
                xc = centroid - gamma * (centroid - sim[-1])
                fc = fe(xc)
                if fc < fs[-1]:
                    sim[-1], fs[-1] = xc, fc
                    continue
            # shrink towards the best vertex
            sim[1:] = sim[0] + delta * (sim[1:] - sim[0])
            for i in range(1, n + 1):
                fs[i] = fe(sim[i])
        i = int(np.argmin(fs))
        improved = best_f - fs[i]
        if fs[i] <= best_f:
            best_x, best_f = sim[i].copy(), fs[i]
        if not converged or evals >= max_evals or restarts >= max_restarts:
            break
        if restarts > 0 and improved <= ftol:
            break
        restarts += 1
        cur_step = max(10 * float(np.max(np.abs(sim - best_x))), 1e-3)
    return NMResult(best_x, float(best_f), evals, restarts, converged)
