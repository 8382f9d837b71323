"""Search over diagrams: enumeration of admissible diagrams and inference from P_AB.

Both searches walk the grid cells in row-major order and assign each cell to an
existing clique, a new clique, or (for enumeration) leave it out.  A partial
assignment is abandoned as soon as a clique stops being diagonal or an edge
whose four cross cells are all decided lacks its partner edge.
"""
from __future__ import annotations

import itertools
from typing import Callable

import numpy as np

from boundkey.dist import Diagram, MarginalDistribution, _pab_array
from boundkey.errors import NoneFound, SizeGuard

MAX_GRID = 6


def _search(
    d_A: int,
    d_B: int,
    candidates: list[tuple[int, int]],
    optional: bool,
    min_cliques: int,
    max_cliques: int,
    pair_ok: Callable[[tuple[int, int], tuple[int, int]], bool],
):
    """Yield label grids (-1 = absent) for every cross-closed clique assignment."""
    lab = np.full((d_A, d_B), -2, dtype=int)  # -2 undecided, -1 absent
    for a in range(d_A):
        for b in range(d_B):
            if (a, b) not in candidates:
                lab[a, b] = -1
    members: list[list[tuple[int, int]]] = []

    def consistent(x) -> bool:
        a, b = x
        e = lab[a, b]
        if e >= 0:
            # x joined clique e: check the partner edge of each new edge x-y
            for a2, b2 in members[e]:
                if (a2, b2) == x:
                    continue
                u, v = lab[a, b2], lab[a2, b]
                if u == -1 or v == -1:
                    return False
                if u >= 0 and v >= 0 and u != v:
                    return False
        # x as a corner of the partner edge of an existing edge y-z
        for b2 in range(d_B):
            if b2 == b:
                continue
            ey = lab[a, b2]
            if ey < 0:
                continue
            for a2 in range(d_A):
                if a2 == a or lab[a2, b] != ey:
                    continue
                # edge (a,b2)-(a2,b) exists; its partner is x=(a,b)-(a2,b2)
                w = lab[a2, b2]
                if e == -1 or w == -1:
                    return False
                if w >= 0 and w != e:
                    return False
        return True

    order = candidates

    def rec(k: int):
        if k == len(order):
            if len(members) >= min_cliques:
                yield lab.copy()
            return
        if len(members) + len(order) - k < min_cliques:
            return
        x = order[k]
        a, b = x
        for e in range(len(members)):
            if any(a == a2 or b == b2 or not pair_ok(x, (a2, b2)) for a2, b2 in members[e]):
                continue
            lab[a, b] = e
            members[e].append(x)
            if consistent(x):
                yield from rec(k + 1)
            members[e].pop()
        if len(members) < max_cliques:
            lab[a, b] = len(members)
            members.append([x])
            if consistent(x):
                yield from rec(k + 1)
            members.pop()
        if optional:
            lab[a, b] = -1
            if consistent(x):
                yield from rec(k + 1)
        lab[a, b] = -2

    yield from rec(0)


def _same_clique_matrix(labels: np.ndarray) -> np.ndarray:
    flat = labels.ravel()
    s = (flat[:, None] == flat[None, :]) & (flat[:, None] >= 0)
    return s


def canonical_key(diagram: Diagram) -> bytes:
    """Byte string identical for diagrams related by row and column permutations.

    The key is the lexicographically smallest packed "same clique" relation on
    cells over all row and column permutations; it does not depend on how the
    cliques are numbered.
    """
    d_A, d_B = diagram.d_A, diagram.d_B
    if d_A > MAX_GRID or d_B > MAX_GRID:
        raise SizeGuard(f"canonical form limited to {MAX_GRID}x{MAX_GRID} grids")
    s = _same_clique_matrix(diagram.labels())
    rows = np.array(list(itertools.permutations(range(d_A))))
    cols = np.array(list(itertools.permutations(range(d_B))))
    best = None
    for r in rows:
        cellperm = (r[:, None] * d_B + cols[:, None, :]).reshape(len(cols), -1)
        sp = s[cellperm[:, :, None], cellperm[:, None, :]].reshape(len(cols), -1)
        packed = np.packbits(sp, axis=1)
        # lexicographic minimum over rows of a uint8 matrix
        idx = np.lexsort(packed.T[::-1])[0]
        cand = packed[idx].tobytes()
        if best is None or cand < best:
            best = cand
    return best


def canonical_diagram(diagram: Diagram) -> Diagram:
    """The representative of the diagram's row/column-permutation class."""
    d_A, d_B = diagram.d_A, diagram.d_B
    key = canonical_key(diagram)
    n = d_A * d_B
    s = np.unpackbits(np.frombuffer(key, dtype=np.uint8))[: n * n].reshape(n, n).astype(bool)
    lab = np.full(n, -1, dtype=int)
    nxt = 0
    for i in range(n):
        if s[i, i] and lab[i] < 0:
            lab[s[i]] = nxt
            nxt += 1
    return Diagram.from_labels(lab.reshape(d_A, d_B))


def uses_all_lines(diagram: Diagram) -> bool:
    lab = diagram.labels()
    return bool((lab >= 0).any(axis=1).all() and (lab >= 0).any(axis=0).all())


def enumerate_diagrams(d_A: int, d_B: int, max_cliques: int | None = None) -> list[Diagram]:
    """All admissible diagrams on a d_A x d_B grid, one per permutation class.

    Admissible: disjoint diagonal cliques of size >= 2 whose edges close up into
    crosses, occupying every row and column, with at most ``max_cliques``
    cliques.  Results are sorted by canonical key.
    """
    if not (1 <= d_A <= MAX_GRID and 1 <= d_B <= MAX_GRID):
        raise SizeGuard(f"grid must be at most {MAX_GRID}x{MAX_GRID}, got {d_A}x{d_B}")
    if max_cliques is None:
        max_cliques = d_A * d_B // 2
    cells = [(a, b) for a in range(d_A) for b in range(d_B)]
    found: dict[bytes, Diagram] = {}
    for lab in _search(d_A, d_B, cells, True, 1, max_cliques, lambda x, y: True):
        if not ((lab >= 0).any(axis=1).all() and (lab >= 0).any(axis=0).all()):
            continue
        d = Diagram.from_labels(lab)
        if not d.is_union_of_crosses():
            continue
        key = canonical_key(d)
        if key not in found:
            found[key] = canonical_diagram(d)
    return [found[k] for k in sorted(found)]


def cross_determinant(pab: np.ndarray, a: int, a2: int, b: int, b2: int) -> float:
    return float(pab[a, b] * pab[a2, b2] - pab[a, b2] * pab[a2, b])


def infer_diagram(
    P_AB: MarginalDistribution | np.ndarray,
    d_E: int,
    tol: float = 5e-6,
    zero_tol: float = 1e-12,
    limit: int | None = None,
) -> list[Diagram]:
    """Every diagram with exactly ``d_E`` cliques consistent with ``P_AB``.

    The diagram must cover the support of ``P_AB`` exactly and be
    cross-closed, and each cross must have a 2x2 determinant of magnitude at
    most ``tol``.  Single-cell cliques are allowed here: they impose nothing.
    """
    pab = _pab_array(P_AB)
    d_A, d_B = pab.shape
    support = [(a, b) for a in range(d_A) for b in range(d_B) if pab[a, b] > zero_tol]
    sup = set(support)

    def pair_ok(x, y):
        (a, b), (a2, b2) = x, y
        if (a, b2) not in sup or (a2, b) not in sup:
            return False
        return abs(cross_determinant(pab, a, a2, b, b2)) <= tol

    out = []
    for lab in _search(d_A, d_B, support, False, d_E, d_E, pair_ok):
        d = Diagram.from_labels(lab)
        if d.is_cross_closed():
            out.append(d)
            if limit is not None and len(out) >= limit:
                break
    if not out:
        raise NoneFound(f"no {d_E}-clique diagram is consistent with this P_AB at tol {tol}")
    return sorted(out, key=lambda d: d.cliques)
