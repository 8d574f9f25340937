"""Dense two-phase simplex method with Bland's anti-cycling rule.

Small and deterministic by design: the LPs it serves have a handful of
rows and at most a few hundred columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nsgap.errors import NonConvergence, ValidationError

_EPS = 1e-11


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    for r in range(t.shape[0]):
        if r != row and t[r, col] != 0.0:
            t[r] -= t[r, col] * t[row]


def _run(t: np.ndarray, basis: list[int], allowed: int, max_iter: int) -> tuple[str, int]:
    """Minimize the objective stored in the last row of tableau ``t``.

    The last row holds reduced costs in columns [0, allowed) and minus the
    current objective value in the last column.
    """
    m = t.shape[0] - 1
    for it in range(max_iter):
        cost = t[-1, :allowed]
        entering = np.flatnonzero(cost < -_EPS)
        if entering.size == 0:
            return "optimal", it
        col = int(entering[0])
        column = t[:m, col]
        pos = column > _EPS
        if not pos.any():
            return "unbounded", it
        ratios = np.full(m, np.inf)
        ratios[pos] = t[:m, -1][pos] / column[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + _EPS * max(1.0, abs(best)))
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
    raise NonConvergence(f"simplex did not terminate within {max_iter} pivots")


def simplex_standard(c, a_eq, b_eq, max_iter: int = 50_000) -> LPResult:
    """min c.x subject to a_eq x = b_eq, x >= 0."""
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float, ndmin=2)
    b = np.array(b_eq, dtype=float).ravel()
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValidationError("inconsistent LP dimensions")
    flip = b < 0
    a[flip] *= -1
    b[flip] *= -1
    # phase 1 tableau: original columns, one artificial per row, rhs
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[-1, :n] = -a.sum(axis=0)
    t[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    status, it1 = _run(t, basis, n + m, max_iter)
    if status != "optimal" or -t[-1, -1] > 1e-9 * max(1.0, np.abs(b).max(initial=0.0)):
        return LPResult("infeasible", None, None, it1)
    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(t[r, :n]) > 1e-9)
            if cand.size:
                _pivot(t, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    t2 = np.zeros((len(keep) + 1, n + 1))
    t2[:-1, :n] = t[keep, :n]
    t2[:-1, -1] = t[keep, -1]
    basis = [basis[r] for r in keep]
    t2[-1, :n] = c
    for r, bv in enumerate(basis):
        if t2[-1, bv] != 0.0:
            t2[-1] -= t2[-1, bv] * t2[r]
    status, it2 = _run(t2, basis, n, max_iter)
    if status != "optimal":
        return LPResult(status, None, None, it1 + it2)
    x = np.zeros(n)
    for r, bv in enumerate(basis):
        x[bv] = t2[r, -1]
    x = np.maximum(x, 0.0)
    return LPResult("optimal", x, float(c @ x), it1 + it2)


def linprog(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, max_iter: int = 50_000) -> LPResult:
    """min c.x over x >= 0 with optional <= and = constraints."""
    c = np.asarray(c, dtype=float)
    n = c.size
    blocks, rhs = [], []
    n_slack = 0
    if a_ub is not None:
        a_ub = np.array(a_ub, dtype=float, ndmin=2)
        n_slack = a_ub.shape[0]
        blocks.append(np.hstack([a_ub, np.eye(n_slack)]))
        rhs.append(np.asarray(b_ub, dtype=float).ravel())
    if a_eq is not None:
        a_eq = np.array(a_eq, dtype=float, ndmin=2)
        blocks.append(np.hstack([a_eq, np.zeros((a_eq.shape[0], n_slack))]))
        rhs.append(np.asarray(b_eq, dtype=float).ravel())
    if not blocks:
        raise ValidationError("LP has no constraints")
    res = simplex_standard(np.concatenate([c, np.zeros(n_slack)]), np.vstack(blocks),
                           np.concatenate(rhs), max_iter)
    if res.x is None:
        return res
    return LPResult(res.status, res.x[:n], res.fun, res.iterations)
