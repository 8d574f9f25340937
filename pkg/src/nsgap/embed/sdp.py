"""The Euclidean spread SDP.

    maximize    sum_{i,j} (G_ii + G_jj - 2 G_ij)
    subject to  G_ii + G_jj - 2 G_ij <= d_ij^2   (all i < j)
                G positive semidefinite

solved by ADMM on the splitting X = G (PSD cone) and L(X) = y (box
y <= d^2), where L maps a symmetric matrix to its squared pair distances.
Each iteration is one fixed linear solve, one eigendecomposition and one
clip; rho is rebalanced when the primal and dual residuals drift apart.
The final iterate is factored into points and scaled down so every
constraint holds exactly, which makes the reported objective a certified
lower bound on the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nsgap.embed.witness import EmbeddingWitness, make_witness
from nsgap.errors import ValidationError
from nsgap.metric import FiniteMetric, lp_distances


@dataclass(frozen=True, eq=False)
class GramState:
    gram: np.ndarray
    objective: float
    min_eigenvalue: float
    max_violation: float  # max_ij (G_ii + G_jj - 2G_ij - d_ij^2), <= 0 when feasible

    def to_dict(self) -> dict:
        return {"gram": self.gram.tolist(), "objective": self.objective,
                "minEigenvalue": self.min_eigenvalue, "maxViolation": self.max_violation}


@dataclass(frozen=True, eq=False)
class SpreadResult:
    gram: GramState
    av_estimate: float
    witness: EmbeddingWitness
    iterations: int
    converged: bool
    relaxed_objective: float  # objective of the unscaled ADMM iterate

    def __iter__(self):
        yield self.gram
        yield self.av_estimate

    def to_dict(self) -> dict:
        return {"avEstimate": self.av_estimate, "objective": self.gram.objective,
                "relaxedObjective": self.relaxed_objective, "iterations": self.iterations,
                "converged": self.converged, "minEigenvalue": self.gram.min_eigenvalue,
                "maxViolation": self.gram.max_violation}


def _operators(n: int):
    iu, ju = np.triu_indices(n)  # variable layout: upper triangle incl. diagonal
    index = np.zeros((n, n), dtype=np.int64)
    index[iu, ju] = np.arange(iu.size)
    index[ju, iu] = index[iu, ju]
    pi, pj = np.triu_indices(n, 1)
    lmat = np.zeros((pi.size, iu.size))
    rows = np.arange(pi.size)
    lmat[rows, index[pi, pi]] += 1.0
    lmat[rows, index[pj, pj]] += 1.0
    lmat[rows, index[pi, pj]] -= 2.0
    weight = np.where(iu == ju, 1.0, 2.0)  # Frobenius weights of the packed entries
    return iu, ju, index, (pi, pj), lmat, weight


def _unpack(v: np.ndarray, n: int, index: np.ndarray) -> np.ndarray:
    return v[index]


def _psd_project(m: np.ndarray) -> np.ndarray:
    w, vec = np.linalg.eigh((m + m.T) / 2.0)
    w = np.maximum(w, 0.0)
    return (vec * w) @ vec.T


def spread_sdp(x: FiniteMetric, iterations: int = 50_000, tolerance: float = 1e-6,
               rho: float = 1.0) -> SpreadResult:
    n = x.size
    if n < 2:
        raise ValidationError("spread SDP needs at least two points")
    scale = x.diameter()
    if scale == 0:
        raise ValidationError("all points coincide")
    d2 = (x.dist / scale) ** 2
    iu, ju, index, (pi, pj), lmat, weight = _operators(n)
    cap = d2[pi, pj]
    c = 2.0 * lmat.sum(axis=0)  # objective = c . v
    system = np.diag(weight) + lmat.T @ lmat
    solve = np.linalg.inv(system)

    g = np.zeros(iu.size)
    u = np.zeros(iu.size)
    y = np.zeros(pi.size)
    w = np.zeros(pi.size)
    converged = False
    it = 0
    for it in range(1, iterations + 1):
        v = solve @ (c / rho + weight * (g - u) + lmat.T @ (y - w))
        lv = lmat @ v
        gm = _psd_project(_unpack(v + u, n, index))
        g_new = gm[iu, ju]
        y_new = np.minimum(lv + w, cap)
        u += v - g_new
        w += lv - y_new
        r_primal = max(np.max(np.abs(v - g_new)), np.max(np.abs(lv - y_new)))
        r_dual = rho * max(np.max(np.abs(g_new - g)), np.max(np.abs(y_new - y)))
        g, y = g_new, y_new
        if r_primal < tolerance and r_dual < tolerance:
            converged = True
            break
        # residual balancing; the linear system does not depend on rho
        if it % 50 == 0 and (r_primal > 10 * r_dual or r_dual > 10 * r_primal):
            factor = 2.0 if r_primal > r_dual else 0.5
            rho *= factor
            u /= factor
            w /= factor

    gm = _unpack(g, n, index)
    relaxed = float(c @ g) * scale**2
    # factor and scale into exact feasibility
    evals, evecs = np.linalg.eigh(gm)
    pts = evecs * np.sqrt(np.maximum(evals, 0.0))
    img = lp_distances(pts, 2.0)
    off = ~np.eye(n, dtype=bool)
    src = x.dist / scale
    with np.errstate(divide="ignore", invalid="ignore"):
        worst = np.max(np.where(off & (img > 0), img / np.where(src > 0, src, 1.0), 0.0))
    shrink = 1.0 / worst if worst > 1.0 else 1.0
    pts = pts * shrink * scale
    img = lp_distances(pts, 2.0)
    gram = pts @ pts.T
    objective = float(np.sum(img**2))
    lhs = np.diag(gram)[:, None] + np.diag(gram)[None, :] - 2.0 * gram
    violation = float(np.max((lhs - x.dist**2)[off]))
    state = GramState(gram, objective, float(np.linalg.eigvalsh(gram).min()), violation)
    av = math.inf if objective == 0 else math.sqrt(float(np.sum(x.dist**2)) / objective)
    witness = make_witness(x, pts, "spread_sdp", p=2.0, target_p=2.0, image_dist=img)
    return SpreadResult(state, av, witness, it, converged, relaxed)
