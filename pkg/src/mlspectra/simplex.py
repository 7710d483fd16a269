"""Dense two-phase tableau simplex with Bland's rule.

Small standard-form problems ``min c @ x  s.t.  A @ x == b, x >= 0``; used
to find convex weights over the vertices of a feasibility polytope.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

PIVOT_TOL = 1e-12
FEAS_TOL = 1e-10


class LPInfeasible(ValueError):
    pass


class LPUnbounded(ValueError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    fun: float
    basis: tuple[int, ...]
    iterations: int


def _bland(tab: np.ndarray, basis: list[int], ncols: int, max_iter: int) -> int:
    """Run simplex iterations on ``tab`` (last row = reduced costs)."""
    m = tab.shape[0] - 1
    it = 0
    while True:
        costs = tab[-1, :ncols]
        entering = np.flatnonzero(costs < -PIVOT_TOL)
        if entering.size == 0:
            return it
        col = int(entering[0])
        column = tab[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            raise LPUnbounded(f"column {col} is unbounded")
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        kernels.pivot(tab, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex exceeded its iteration limit")


def linprog_eq(c, A, b, *, max_iter: int = 10_000) -> LPResult:
    """Minimise ``c @ x`` subject to ``A @ x == b`` and ``x >= 0``.

    Raises :class:`LPInfeasible` or :class:`LPUnbounded`.
    """
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float).ravel()
    c = np.array(c, dtype=float).ravel()
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase 1: artificial basis, minimise the sum of artificials
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[-1, :n] = -A.sum(axis=0)
    tab[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    it = _bland(tab, basis, n + m, max_iter)
    if -tab[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
        raise LPInfeasible(f"phase 1 optimum {-tab[-1, -1]:.3e} > 0")

    # drive zero-level artificials out, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(tab[r, :n]) > PIVOT_TOL)
            if cand.size == 0:
                continue
            kernels.pivot(tab, r, int(cand[0]))
            basis[r] = int(cand[0])
        keep.append(r)
    tab = np.vstack([tab[keep][:, list(range(n)) + [-1]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]

    # phase 2
    tab[-1, :n] = c
    for r, j in enumerate(basis):
        tab[-1] -= c[j] * tab[r]
    it += _bland(tab, basis, n, max_iter)

    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = tab[r, -1]
    x[np.abs(x) < PIVOT_TOL] = 0.0
    return LPResult(x, float(c @ x), tuple(basis), it)


def convex_weights(points: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Nonnegative weights summing to one with ``weights @ points == target``.

    ``points`` has one vertex per row.  The first feasible basis found by
    Bland's rule is returned; weights are not unique in general.
    """
    P = np.asarray(points, dtype=float)
    t = np.asarray(target, dtype=float).ravel()
    if P.ndim != 2 or P.shape[1] != t.size:
        raise ValueError("points and target have inconsistent dimensions")
    A = np.vstack([P.T, np.ones(P.shape[0])])
    b = np.concatenate([t, [1.0]])
    res = linprog_eq(np.zeros(P.shape[0]), A, b)
    w = np.clip(res.x, 0.0, None)
    return w / w.sum()
