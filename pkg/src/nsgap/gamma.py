"""Poincare ratios and exact or sampled nonlinear spectral gaps.

For a symmetric stochastic ``A``, a kernel ``K = d^p`` and points
``x_1..x_n`` the Poincare ratio is

    mean_{i,j} K(x_i, x_j) / ((1/n) sum_{i,j} a_ij K(x_i, x_j)),

and ``gamma(A, d^p)`` is its supremum over configurations. ``gamma_plus``
uses two configurations ``x, y`` and the cross kernel ``K(x_i, y_j)``.
On a finite space both suprema are maxima over finitely many
configurations, which :func:`gamma_exact` and :func:`gamma_plus_exact`
enumerate in mixed-radix order (coordinate 0 most significant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nsgap.config import get_tolerances
from nsgap.errors import BudgetExceeded, DegenerateConfiguration, ValidationError
from nsgap.metric import FiniteMetric, Kernel, power_kernel
from nsgap.spectral import StochasticMatrix, eigen_decompose

_CHUNK_LOOKUPS = 2_000_000


@dataclass(frozen=True)
class GammaEstimate:
    value: float  # math.inf when some configuration has zero A-weighted energy
    witness: tuple
    method: str  # "exact" | "sampled" | "eigen"
    witness2: tuple | None = None
    evaluations: int = 0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        d = {
            "value": "inf" if self.is_infinite else float(self.value),
            "infinite": self.is_infinite,
            "method": self.method,
            "witness": [_plain(v) for v in self.witness],
            "evaluations": int(self.evaluations),
        }
        if self.witness2 is not None:
            d["witness2"] = [_plain(v) for v in self.witness2]
        return d


def _plain(v):
    return int(v) if isinstance(v, (int, np.integer)) else float(v)


def _kernel(x, p: float | None) -> np.ndarray:
    if isinstance(x, Kernel):
        return x.values
    if isinstance(x, FiniteMetric):
        if p is None:
            raise ValidationError("an exponent p is required with a metric")
        return power_kernel(x, p).values
    return np.asarray(x, dtype=float)


def _ratios(a: np.ndarray, k: np.ndarray, cfg: np.ndarray, plus: bool) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators of the Poincare ratio for a batch of configurations."""
    n = a.shape[0]
    x = cfg[:, :n]
    y = cfg[:, n:] if plus else x
    kk = k[x[:, :, None], y[:, None, :]]
    num = kk.sum(axis=(1, 2)) / (n * n)
    den = np.einsum("ij,bij->b", a, kk) / n
    return num, den


def _safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num/den with +inf for c/0 (c > 0) and nan for 0/0."""
    out = np.full(num.shape, np.nan)
    pos = den > 0
    out[pos] = num[pos] / den[pos]
    out[(~pos) & (num > 0)] = np.inf
    return out


def poincare_ratio(a: StochasticMatrix, kernel: Kernel | np.ndarray, config, config_y=None) -> float:
    """Gamma value demanded by one configuration (two for the absolute gap)."""
    k = _kernel(kernel, None)
    c = np.asarray(config, dtype=np.int64)
    n = a.n
    if c.shape != (n,):
        raise ValidationError(f"configuration length {c.shape} does not match n={n}")
    if c.min() < 0 or c.max() >= k.shape[0]:
        raise ValidationError("configuration index out of range")
    plus = config_y is not None
    if plus:
        cy = np.asarray(config_y, dtype=np.int64)
        if cy.shape != (n,):
            raise ValidationError("second configuration has the wrong length")
        c = np.concatenate([c, cy])
    num, den = _ratios(a.entries, k, c[None, :], plus)
    if num[0] == 0 and den[0] == 0:
        raise DegenerateConfiguration("0/0 ratio: the configuration is constant in the kernel")
    return float(_safe_divide(num, den)[0])


def _digits(idx: np.ndarray, base: int, length: int) -> np.ndarray:
    powers = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % base


def _enumerate_max(a: StochasticMatrix, k: np.ndarray, length: int, plus: bool, budget: int | None):
    n = a.n
    size = k.shape[0]
    total = size**length
    lookups = total * n * n
    budget = get_tolerances().evaluation_budget if budget is None else budget
    if lookups > budget:
        raise BudgetExceeded(
            f"exhaustive search needs {lookups} kernel lookups (> budget {budget}); "
            "use gamma_sampled for a lower bound"
        )
    chunk = max(1, _CHUNK_LOOKUPS // (n * n))
    best = -1.0
    best_idx = -1
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cfg = _digits(idx, size, length)
        num, den = _ratios(a.entries, k, cfg, plus)
        r = _safe_divide(num, den)
        r = np.where(np.isnan(r), -1.0, r)
        j = int(np.argmax(r))
        if r[j] > best:
            best = float(r[j])
            best_idx = int(idx[j])
    if best < 0:
        raise DegenerateConfiguration("every configuration is 0/0 (kernel vanishes identically)")
    witness = tuple(int(v) for v in _digits(np.array([best_idx]), size, length)[0])
    return best, witness, lookups


def gamma_exact(a: StochasticMatrix, x: FiniteMetric | Kernel, p: float | None = None,
                budget: int | None = None) -> GammaEstimate:
    """gamma(A, d_X^p) by exhaustive search over X^n."""
    k = _kernel(x, p)
    value, witness, evals = _enumerate_max(a, k, a.n, False, budget)
    return GammaEstimate(value, witness, "exact", evaluations=evals)


def gamma_plus_exact(a: StochasticMatrix, x: FiniteMetric | Kernel, p: float | None = None,
                     budget: int | None = None) -> GammaEstimate:
    """gamma_+(A, d_X^p) by exhaustive search over pairs of configurations."""
    k = _kernel(x, p)
    n = a.n
    value, witness, evals = _enumerate_max(a, k, 2 * n, True, budget)
    return GammaEstimate(value, witness[:n], "exact", witness2=witness[n:], evaluations=evals)


def gamma_sampled(a: StochasticMatrix, x: FiniteMetric | Kernel, p: float | None = None,
                  trials: int = 100, rng: np.random.Generator | int | None = None,
                  plus: bool = False) -> GammaEstimate:
    """Lower bound on gamma from random starts refined by coordinate hill climbing.

    Every returned value is attained by the returned witness, so it is a
    certified lower bound.
    """
    if trials < 1:
        raise ValidationError("gamma_sampled needs at least one trial")
    rng = np.random.default_rng(rng)
    k = _kernel(x, p)
    n, size = a.n, k.shape[0]
    length = 2 * n if plus else n
    best, best_cfg, evals = -1.0, None, 0

    def score(cfgs):
        num, den = _ratios(a.entries, k, cfgs, plus)
        r = _safe_divide(num, den)
        return np.where(np.isnan(r), -1.0, r)

    for _ in range(trials):
        cfg = rng.integers(size, size=length)
        current = score(cfg[None, :])[0]
        evals += n * n
        improved = True
        while improved and not math.isinf(current):
            improved = False
            for i in range(length):
                cand = np.repeat(cfg[None, :], size, axis=0)
                cand[:, i] = np.arange(size)
                r = score(cand)
                evals += size * n * n
                j = int(np.argmax(r))
                if r[j] > current * (1 + 1e-12) + 1e-300:
                    current, cfg = r[j], cand[j].copy()
                    improved = True
        if current > best:
            best, best_cfg = float(current), cfg.copy()
    if best < 0:
        raise DegenerateConfiguration("all sampled configurations were 0/0")
    w = tuple(int(v) for v in best_cfg)
    if plus:
        return GammaEstimate(best, w[:n], "sampled", witness2=w[n:], evaluations=evals)
    return GammaEstimate(best, w, "sampled", evaluations=evals)


def gamma_real_line(a: StochasticMatrix) -> GammaEstimate:
    """gamma(A, d_R^2) = 1/(1 - lambda_2(A)) with the lambda_2 eigenvector as witness."""
    s = eigen_decompose(a)
    lam2 = s.lambda2
    value = math.inf if lam2 >= 1 - get_tolerances().eigen else 1.0 / (1.0 - lam2)
    return GammaEstimate(value, tuple(float(v) for v in s.eigenvectors[:, 1]), "eigen")


def real_poincare_ratio(a: StochasticMatrix, x, p: float = 2.0) -> float:
    """Poincare ratio of a real-valued configuration under |x - y|^p."""
    x = np.asarray(x, dtype=float)
    n = a.n
    k = np.abs(x[:, None] - x[None, :]) ** p
    num = k.sum() / (n * n)
    den = (a.entries * k).sum() / n
    if num == 0 and den == 0:
        raise DegenerateConfiguration("0/0 ratio: constant configuration")
    if den == 0:
        return math.inf
    return float(num / den)


def _subset_quadratic_forms(a: np.ndarray) -> np.ndarray:
    """q[mask] = 1_S^T A 1_S for every subset S encoded as a bitmask."""
    n = a.shape[0]
    q = np.zeros(2**n)
    for v in range(n):
        size = 1 << v
        t = np.zeros(size)
        for u in range(v):
            t[1 << u: 1 << (u + 1)] = t[: 1 << u] + a[u, v]
        q[size: 2 * size] = q[:size] + 2.0 * t + a[v, v]
    return q


def cut_bound(a: StochasticMatrix, exact_max_n: int = 24) -> float:
    """Max over cuts S of |S|(n-|S|) / (n * sum_{S x S^c} a_ij).

    Two-valued configurations show this is a lower bound on gamma(A, d_X^p)
    for every X with at least two points. Exact subset enumeration up to
    ``exact_max_n`` vertices, otherwise a sweep over prefixes of the
    lambda_2-eigenvector order (still a valid lower bound).
    """
    n = a.n
    if n < 2:
        raise ValidationError("cut bound needs n >= 2")
    m = a.entries
    if n <= exact_max_n:
        q = _subset_quadratic_forms(m)
        masks = np.arange(1, 2**n - 1, dtype=np.int64)
        sizes = np.zeros(len(masks), dtype=np.int64)
        for i in range(n):
            sizes += (masks >> i) & 1
        cut = sizes - q[masks]
        cut = np.where(np.abs(cut) < 1e-15, 0.0, cut)
        with np.errstate(divide="ignore"):
            vals = np.where(cut > 0, sizes * (n - sizes) / (n * np.maximum(cut, 1e-300)), np.inf)
        return float(vals.max())
    order = np.argsort(eigen_decompose(a).eigenvectors[:, 1], kind="stable")
    best = 0.0
    ins = np.zeros(n, dtype=bool)
    for s in range(1, n):
        ins[order[s - 1]] = True
        cut = m[np.ix_(ins, ~ins)].sum()
        if cut <= 0:
            return math.inf
        best = max(best, s * (n - s) / (n * cut))
    return best
