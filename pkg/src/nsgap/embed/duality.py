"""LP certificates for linear comparisons of nonlinear spectral gaps.

For an n-point metric X, a target metric Y, an exponent p and a factor K,
either the matrix T = (K + 2 eps) d_X^p lies in the convex hull of the
normalized Y-configuration matrices plus nonnegative off-diagonal
matrices, and then a mixture of Y-configurations gives an average
distortion map into l_p^m(Y), or a separating functional exists and
becomes a symmetric stochastic A with gamma(A, d_X^p) > K gamma(A, d_Y^p).

Both outcomes come out of a small zero-sum game between mixtures of
configurations and weightings of the pairs, solved as two LPs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nsgap.config import get_tolerances
from nsgap.embed.simplex import linprog
from nsgap.errors import BudgetExceeded, DegenerateConfiguration, NonConvergence, ValidationError
from nsgap.gamma import gamma_exact
from nsgap.metric import FiniteMetric
from nsgap.spectral import StochasticMatrix, stochastic_matrix

DEFAULT_EPS = 1e-3
MAX_Q = 10**6


@dataclass(frozen=True, eq=False)
class MixtureEmbedding:
    """Feasible outcome: weights on Y-configurations and the integer map they define."""

    configs: np.ndarray  # (N, n) Y-indices per selected configuration
    weights: np.ndarray  # mu_k
    multiplicities: np.ndarray  # q_k
    denominator: int  # Q
    lipschitz: float
    lhs: float  # sum_{ij} d(f_i, f_j)^p
    rhs: float  # Lip^p / D * sum_{ij} d_X^p
    distortion_bound: float  # D = (1 + eps)(K + 2 eps)
    value: float  # game value, <= 0 here

    @property
    def feasible(self) -> bool:
        return True

    @property
    def verified(self) -> bool:
        return self.lhs >= self.rhs * (1 - 1e-12)

    def images(self) -> np.ndarray:
        """f(x_i) as a length-m vector of Y-indices, blocks of q_k copies of config k."""
        return np.repeat(self.configs.T, self.multiplicities, axis=1)

    def to_dict(self) -> dict:
        return {"feasible": True, "verified": self.verified, "configs": self.configs.tolist(),
                "weights": self.weights.tolist(), "multiplicities": self.multiplicities.tolist(),
                "Q": self.denominator, "m": int(self.multiplicities.sum()),
                "lipschitz": self.lipschitz, "lhs": self.lhs, "rhs": self.rhs,
                "D": self.distortion_bound, "gameValue": float(self.value)}


@dataclass(frozen=True, eq=False)
class SeparatingMatrix:
    """Infeasible outcome: the separating pair weights and the stochastic matrix built from them."""

    h: np.ndarray  # symmetric, zero diagonal, nonnegative, entries sum to 1 over i < j
    matrix: StochasticMatrix
    delta: float
    gamma_x: float
    gamma_y: float
    k: float
    value: float  # game value, > 0 here

    @property
    def feasible(self) -> bool:
        return False

    @property
    def verified(self) -> bool:
        return self.gamma_x > self.k * self.gamma_y

    def to_dict(self) -> dict:
        return {"feasible": False, "verified": self.verified, "h": self.h.tolist(),
                "A": self.matrix.entries.tolist(), "delta": self.delta,
                "gammaX": self.gamma_x, "gammaY": self.gamma_y, "K": self.k,
                "gameValue": float(self.value)}


@dataclass(frozen=True)
class _Game:
    columns: np.ndarray  # (E, N) normalized configuration matrices over pairs i < j
    configs: np.ndarray  # (N, n)
    target: np.ndarray  # (E,)
    ratios: np.ndarray  # sum d_X^p / sum d_Y(y)^p per configuration
    pairs: tuple[np.ndarray, np.ndarray]
    sum_x: float = field(default=0.0)


def _build_game(x: FiniteMetric, y: FiniteMetric, p: float, k: float, eps: float,
                budget: int | None) -> _Game:
    n = x.size
    size = y.size
    budget = get_tolerances().evaluation_budget if budget is None else budget
    if size**n * n * n > budget:
        raise BudgetExceeded(f"{size}^{n} target configurations exceed the evaluation budget")
    if x.dist.max() == 0:
        raise DegenerateConfiguration("all points of X coincide")
    idx = np.arange(size**n, dtype=np.int64)
    powers = size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    cfg = (idx[:, None] // powers[None, :]) % size
    cfg = cfg[np.ptp(cfg, axis=1) > 0]
    pi, pj = np.triu_indices(n, 1)
    ky = y.dist**p
    kx = x.dist**p
    sum_x = float(kx.sum())
    vals = ky[cfg[:, pi], cfg[:, pj]]  # (N, E)
    sums = 2.0 * vals.sum(axis=1)
    ratios = sum_x / sums
    columns = (vals * ratios[:, None]).T
    target = (k + 2 * eps) * kx[pi, pj]
    return _Game(columns, cfg, target, ratios, (pi, pj), sum_x)


def _solve_mixture(game: _Game) -> tuple[float, np.ndarray]:
    """min over mixtures mu of max_e (C mu - t)_e."""
    e, m = game.columns.shape
    shift = float(np.abs(game.columns).max() + np.abs(game.target).max() + 1.0)
    # variables: mu (m), v' = v + shift >= 0
    a_ub = np.hstack([game.columns, -np.ones((e, 1))])
    b_ub = game.target - shift
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    c = np.zeros(m + 1)
    c[-1] = 1.0
    res = linprog(c, a_ub, b_ub, a_eq, [1.0])
    if res.status != "optimal":
        raise NonConvergence(f"mixture LP ended with status {res.status}")
    return res.x[-1] - shift, res.x[:m]


def _solve_weights(game: _Game) -> tuple[float, np.ndarray]:
    """max over pair weightings h of min_k <h, C^k - t>."""
    e, m = game.columns.shape
    gap = game.columns - game.target[:, None]
    shift = float(np.abs(gap).max() + 1.0)
    # variables: h (e), w' = w + shift >= 0; constraint w' - <h, gap_k> <= shift
    a_ub = np.hstack([-gap.T, np.ones((m, 1))])
    b_ub = np.full(m, shift)
    a_eq = np.hstack([np.ones((1, e)), np.zeros((1, 1))])
    c = np.zeros(e + 1)
    c[-1] = -1.0
    res = linprog(c, a_ub, b_ub, a_eq, [1.0])
    if res.status != "optimal":
        raise NonConvergence(f"separation LP ended with status {res.status}")
    return res.x[-1] - shift, res.x[:e]


def _rationalize(a: np.ndarray, eps: float) -> tuple[np.ndarray, int]:
    """Integers q_k, Q with q_k/Q <= a_k <= (1 + eps) q_k/Q for every positive a_k."""
    positive = a > 0
    q_needed = math.ceil((1 + eps) / (eps * a[positive].min()))
    q_big = max(1, min(q_needed, MAX_Q))
    q = np.floor(q_big * a).astype(np.int64)
    return q, q_big


def _mixture_outcome(x, y, p, k, eps, game, value, mu) -> MixtureEmbedding:
    keep = mu > 1e-12
    configs = game.configs[keep]
    weights = mu[keep] / mu[keep].sum()
    q, q_big = _rationalize(weights * game.ratios[keep], eps)
    nonzero = q > 0
    configs, weights, q = configs[nonzero], weights[nonzero], q[nonzero]
    ky = y.dist**p
    # d(f_i, f_j)^p = sum_k q_k d_Y(y_i^k, y_j^k)^p, summed exactly over the blocks
    img = np.einsum("k,kij->ij", q.astype(float), ky[configs[:, :, None], configs[:, None, :]])
    off = ~np.eye(x.size, dtype=bool)
    kx = x.dist**p
    if np.any((kx[off] == 0) & (img[off] > 0)):
        lip_p = math.inf
    else:
        pos = off & (kx > 0)
        lip_p = float(np.max(img[pos] / kx[pos]))
    d_bound = (1 + eps) * (k + 2 * eps)
    lhs = float(img.sum())
    rhs = lip_p / d_bound * float(kx.sum())
    return MixtureEmbedding(configs, weights, q, q_big, lip_p ** (1.0 / p), lhs, rhs, d_bound, value)


def _separating_outcome(x, y, p, k, eps, game, value, h_pairs, budget) -> SeparatingMatrix:
    n = x.size
    pi, pj = game.pairs
    h = np.zeros((n, n))
    h[pi, pj] = h_pairs
    h[pj, pi] = h_pairs
    delta = 0.5
    last = None
    for _ in range(40):
        off = h + delta
        np.fill_diagonal(off, 0.0)
        sigma = off.sum(axis=1).max()
        a = off / (2 * sigma)
        np.fill_diagonal(a, 1.0 - a.sum(axis=1))
        mat = stochastic_matrix(a)
        gx = gamma_exact(mat, x, p, budget=budget).value
        gy = gamma_exact(mat, y, p, budget=budget).value
        last = SeparatingMatrix(h, mat, delta, gx, gy, k, value)
        if last.verified:
            return last
        delta /= 2
    return last


def duality_certificate(x: FiniteMetric, y: FiniteMetric, p: float, k: float,
                        eps: float = DEFAULT_EPS, budget: int | None = None):
    """Return a verified MixtureEmbedding or SeparatingMatrix for (X, Y, p, K)."""
    if not (p >= 1 and k >= 1):
        raise ValidationError(f"need p >= 1 and K >= 1, got p={p}, K={k}")
    if x.size < 2:
        raise ValidationError("X needs at least two points")
    if y.size < 2:
        raise ValidationError("Y needs at least two points")
    game = _build_game(x, y, p, k, eps, budget)
    value, mu = _solve_mixture(game)
    if value <= 0:
        return _mixture_outcome(x, y, p, k, eps, game, value, mu)
    w_value, h_pairs = _solve_weights(game)
    return _separating_outcome(x, y, p, k, eps, game, w_value, h_pairs, budget)


def duality_threshold(x: FiniteMetric, y: FiniteMetric, p: float, eps: float = DEFAULT_EPS,
                      tol: float = 1e-3, k_max: float = 1e6) -> dict:
    """Bracket the smallest K for which the mixture LP is feasible."""
    lo, hi = 1.0, 1.0
    game_feasible = lambda kk: _solve_mixture(_build_game(x, y, p, kk, eps, None))[0] <= 0
    if game_feasible(lo):
        return {"lower": 1.0, "upper": 1.0}
    while not game_feasible(hi):
        lo, hi = hi, hi * 2
        if hi > k_max:
            raise NonConvergence("no feasible K found below k_max")
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        if game_feasible(mid):
            hi = mid
        else:
            lo = mid
    return {"lower": lo, "upper": hi}
