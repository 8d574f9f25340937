"""Markov-type ratios and instance checks of the related inequalities.

Everything here verifies inequalities on concrete instances; none of it
estimates a Markov type constant, which is a supremum over all chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nsgap.errors import DegenerateConfiguration, ValidationError
from nsgap.metric import FiniteMetric, Kernel, lp_distances
from nsgap.spectral import StochasticMatrix, eigen_decompose, matrix_power


@dataclass(frozen=True)
class MarkovRatio:
    m: int
    value: float
    numerator: float
    denominator: float

    def to_dict(self) -> dict:
        return {"m": self.m, "value": "inf" if math.isinf(self.value) else self.value,
                "numerator": self.numerator, "denominator": self.denominator}


def _config_kernel(kernel, config) -> np.ndarray:
    k = kernel.values if isinstance(kernel, Kernel) else np.asarray(kernel, dtype=float)
    if config is None:
        return k
    c = np.asarray(config, dtype=np.int64)
    if c.ndim != 1 or c.min() < 0 or c.max() >= k.shape[0]:
        raise ValidationError("configuration indices out of range")
    return k[np.ix_(c, c)]


def _ratio(num: float, den: float, m: int) -> MarkovRatio:
    if den == 0:
        if num == 0:
            raise DegenerateConfiguration("0/0 Markov ratio")
        return MarkovRatio(m, math.inf, num, den)
    return MarkovRatio(m, num / den, num, den)


def markov_ratio(a: StochasticMatrix, m: int, kernel: Kernel | np.ndarray, config=None) -> MarkovRatio:
    """sum (A^m)_ij K(c_i, c_j) / sum a_ij K(c_i, c_j).

    Without ``config`` the kernel is taken to be indexed by the rows of A.
    """
    kk = _config_kernel(kernel, config)
    if kk.shape != (a.n, a.n):
        raise ValidationError(f"kernel over the configuration has shape {kk.shape}, need {(a.n, a.n)}")
    am = matrix_power(a, m).entries
    return _ratio(float((am * kk).sum()), float((a.entries * kk).sum()), int(m))


def lp_square_kernel(points, p: float) -> np.ndarray:
    """||x_i - x_j||_p^2 for a configuration of points in l_p."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return lp_distances(pts, p) ** 2


@dataclass(frozen=True)
class GeometricCheck:
    ratio: float
    bound: float
    holds: bool
    equality: bool
    skipped: bool = False  # x is constant on every communicating class of A

    def to_dict(self) -> dict:
        return {"ratio": self.ratio, "bound": self.bound, "holds": self.holds,
                "equality": self.equality, "skipped": self.skipped}


def hilbert_geometric_check(a: StochasticMatrix, m: int, x, tol: float = 1e-9) -> GeometricCheck:
    """Markov ratio of a real configuration against sum_{t<m} lambda_2^t."""
    x = np.asarray(x, dtype=float)
    if x.shape != (a.n,):
        raise ValidationError(f"configuration must have length {a.n}")
    if np.ptp(x) == 0:
        raise DegenerateConfiguration("constant configuration")
    lam2 = a.lambda2
    bound = float(sum(lam2**t for t in range(int(m))))
    k = (x[:, None] - x[None, :]) ** 2
    den = float((a.entries * k).sum())
    if den <= 1e-14 * k.sum():
        return GeometricCheck(math.nan, bound, True, False, skipped=True)
    r = markov_ratio(a, m, k)
    holds = r.value <= bound + tol * max(1.0, abs(bound))
    return GeometricCheck(r.value, bound, holds, abs(r.value - bound) <= tol * max(1.0, abs(bound)))


def lambda2_vector(a: StochasticMatrix) -> np.ndarray:
    return eigen_decompose(a).eigenvectors[:, 1].copy()


@dataclass(frozen=True)
class MonotonicityReport:
    even_lhs: float
    odd_lhs: float
    rhs: float
    p: float
    even_holds: bool
    odd_holds: bool

    @property
    def holds(self) -> bool:
        return self.even_holds and self.odd_holds

    def to_dict(self) -> dict:
        return {"evenLhs": self.even_lhs, "oddLhs": self.odd_lhs, "rhs": self.rhs, "p": self.p,
                "evenHolds": self.even_holds, "oddHolds": self.odd_holds}


def monotonicity_check(a: StochasticMatrix, s: int, t: int, kernel, p: float,
                       config=None, rel_tol: float = 1e-10) -> MonotonicityReport:
    """sum(A^{2s})K <= 2^p sum(A^t)K and sum(A^{2s+1})K <= 3^p sum(A^t)K for t >= s >= 1."""
    if not (1 <= s <= t):
        raise ValidationError(f"need t >= s >= 1, got s={s}, t={t}")
    kk = _config_kernel(kernel, config)
    even = float((matrix_power(a, 2 * s).entries * kk).sum())
    odd = float((matrix_power(a, 2 * s + 1).entries * kk).sum())
    base = float((matrix_power(a, t).entries * kk).sum())
    scale = max(abs(base), kk.max(initial=0.0)) * rel_tol
    return MonotonicityReport(even, odd, base, p,
                              even <= 2.0**p * base + scale, odd <= 3.0**p * base + scale)


@dataclass(frozen=True)
class InfinityComparison:
    checked: int
    violations: int
    worst_slack: float  # min over configurations of (3^p gamma ΣAd^p - Σ(A^m)d^p), relative
    note: str = ""

    def to_dict(self) -> dict:
        return {"checked": self.checked, "violations": self.violations,
                "worstSlack": self.worst_slack, "note": self.note}


def compare_to_infinity(a: StochasticMatrix, m: int, x: FiniteMetric, p: float, gamma_value: float,
                        witnesses=(), random_configs: int = 100,
                        rng: np.random.Generator | int | None = None) -> InfinityComparison:
    """Check sum(A^m) d^p <= 3^p gamma sum A d^p on witnesses plus random configurations."""
    if math.isinf(gamma_value):
        return InfinityComparison(0, 0, math.inf, "A is not ergodic for this metric; skipped")
    rng = np.random.default_rng(rng)
    k = x.dist**p
    am = matrix_power(a, m).entries
    configs = [np.asarray(w, dtype=np.int64) for w in witnesses]
    configs += [rng.integers(x.size, size=a.n) for _ in range(random_configs)]
    checked = bad = 0
    worst = math.inf
    factor = 3.0**p * gamma_value
    for c in configs:
        kk = k[np.ix_(c, c)]
        lhs = float((am * kk).sum())
        rhs = factor * float((a.entries * kk).sum())
        if lhs == 0 and rhs == 0:
            continue
        checked += 1
        slack = (rhs - lhs) / max(rhs, 1e-300)
        worst = min(worst, slack)
        bad += lhs > rhs * (1 + 1e-10)
    return InfinityComparison(checked, bad, worst)
