"""Functionals of maps defined on the Hamming cube F_2^n.

Vertices and direction sets are integer bitmasks (bit i is coordinate i),
so ``z + e_I`` is ``z ^ I``. A :class:`CubeFunction` is stored through the
matrix of distances between its images, which is all the edge and diagonal
averages need; the raw images are kept alongside when they are known.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from nsgap.errors import DegenerateConfiguration, ValidationError
from nsgap.metric import FiniteMetric, lp_distances, popcount

MAX_N = 12
MAX_MP_N = 4


@dataclass(frozen=True, eq=False)
class CubeFunction:
    n: int
    dist: np.ndarray  # (2^n, 2^n) distances between images
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.dist.shape != (2**self.n, 2**self.n):
            raise ValidationError(f"expected a {2**self.n}x{2**self.n} image distance matrix, "
                                  f"got {self.dist.shape}")

    def to_dict(self) -> dict:
        d = {"n": self.n}
        if self.values is not None:
            d["values"] = self.values.tolist()
        else:
            d["dist"] = self.dist.tolist()
        return d


def _check_n(n: int, cap: int = MAX_N) -> None:
    if not 1 <= n <= cap:
        raise ValidationError(f"cube dimension must be in 1..{cap}, got {n}")


def from_points(n: int, points, p: float = 2.0) -> CubeFunction:
    """f(z) = points[z] in l_p (unnormalized norm)."""
    _check_n(n)
    pts = np.array(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] != 2**n:
        raise ValidationError(f"need {2**n} images, got {pts.shape[0]}")
    return CubeFunction(n, lp_distances(pts, p), pts)


def from_metric(n: int, labels, metric: FiniteMetric) -> CubeFunction:
    """f(z) = the point ``labels[z]`` of a finite metric."""
    _check_n(n)
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape != (2**n,):
        raise ValidationError(f"need {2**n} labels, got shape {lab.shape}")
    if lab.min() < 0 or lab.max() >= metric.size:
        raise ValidationError("label out of range for the target metric")
    return CubeFunction(n, metric.dist[np.ix_(lab, lab)], lab)


def subsets_of_size(n: int, k: int) -> np.ndarray:
    return np.array([sum(1 << i for i in c) for c in itertools.combinations(range(n), k)],
                    dtype=np.int64)


def ek(f: CubeFunction, k: int, q: float = 2.0) -> float:
    """E_k^{(q)}(f): q-mean of d(f(z + e_I), f(z)) over vertices z and k-sets I."""
    if not 1 <= k <= f.n:
        raise ValidationError(f"k must be in 1..{f.n}, got {k}")
    if not q >= 1:
        raise ValidationError(f"q must be >= 1, got {q}")
    z = np.arange(2**f.n, dtype=np.int64)
    sets = subsets_of_size(f.n, k)
    vals = f.dist[z[None, :] ^ sets[:, None], z[None, :]]
    return float(np.mean(vals**q) ** (1.0 / q))


def bmw_ratio(f: CubeFunction, p: float, q: float = 2.0) -> float:
    """E_n(f) / (n^{1/p} E_1(f)), the BMW constant this one function demands."""
    if not 0 < p <= 2:
        raise ValidationError(f"p must lie in (0, 2], got {p}")
    e1 = ek(f, 1, q)
    en = ek(f, f.n, q)
    if e1 == 0:
        if en == 0:
            raise DegenerateConfiguration("E_1 and E_n both vanish (constant on the cube)")
        return math.inf
    return en / (f.n ** (1.0 / p) * e1)


def lift(f: CubeFunction, n: int) -> CubeFunction:
    """Natural lifting to F_2^n: ignore coordinates m..n-1."""
    m = f.n
    if n < m:
        raise ValidationError(f"cannot lift from dimension {m} down to {n}")
    _check_n(n)
    z = np.arange(2**n, dtype=np.int64) & ((1 << m) - 1)
    values = None if f.values is None else f.values[z]
    return CubeFunction(n, f.dist[np.ix_(z, z)], values)


def lifting_identity_rhs(f: CubeFunction, n: int, k: int, q: float = 2.0) -> float:
    """E_k(lift(f, n)) predicted from the E_l(f): binomially weighted mixture."""
    m = f.n
    total = 0.0
    for ell in range(1, min(m, k) + 1):
        w = math.comb(n - m, k - ell) * math.comb(m, ell)
        if w:
            total += w * ek(f, ell, q) ** q
    return (total / math.comb(n, k)) ** (1.0 / q)


def partition_lemma_check(f: CubeFunction, ks, p: float, t_const: float, q: float = 2.0) -> dict:
    """Compare E_{sum k_j}(f) with T m^{1/p-1/2} (sum_j E_{k_j}(f)^2)^{1/2}."""
    ks = [int(k) for k in ks]
    total = sum(ks)
    if not ks or min(ks) < 1 or total > f.n:
        raise ValidationError(f"need positive k_j with sum <= {f.n}, got {ks}")
    lhs = ek(f, total, q)
    rhs = t_const * len(ks) ** (1.0 / p - 0.5) * math.sqrt(sum(ek(f, k, q) ** 2 for k in ks))
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs * (1 + 1e-12) + 1e-12}


def _permute_bits(x: np.ndarray, perm) -> np.ndarray:
    """pi(x) = sum_i x_{pi(i)} e_i on bitmasks."""
    out = np.zeros_like(x)
    for i, src in enumerate(perm):
        out |= ((x >> src) & 1) << i
    return out


def mp_lift_construction(f: CubeFunction) -> CubeFunction:
    """F(x)_{(z, pi)} = f(pi(x) + z) into the l_2 sum of 2^n n! copies of the target.

    The images of F are stored as arrays of domain vertices of ``f`` (one per
    coordinate (z, pi)); distances are sqrt(sum over coordinates of d_f^2).
    """
    n = f.n
    _check_n(n, MAX_MP_N)
    x = np.arange(2**n, dtype=np.int64)
    cols = []
    for perm in itertools.permutations(range(n)):
        px = _permute_bits(x, perm)
        cols.append(px[:, None] ^ x[None, :])  # column block indexed by z
    vals = np.concatenate(cols, axis=1)  # (2^n, 2^n * n!)
    d2 = (f.dist[vals[:, None, :], vals[None, :, :]] ** 2).sum(axis=2)
    return CubeFunction(n, np.sqrt(d2), vals)


def mp_level_deviation(f: CubeFunction, big_f: CubeFunction | None = None) -> float:
    """max |d(F(x), F(y)) - sqrt(2^n n!) E_{|x-y|}(f)| over all vertex pairs."""
    if big_f is None:
        big_f = mp_lift_construction(f)
    n = f.n
    scale = math.sqrt(2**n * math.factorial(n))
    levels = np.array([0.0] + [scale * ek(f, k, 2.0) for k in range(1, n + 1)])
    x = np.arange(2**n, dtype=np.int64)
    expected = levels[popcount(x[:, None] ^ x[None, :])]
    return float(np.max(np.abs(big_f.dist - expected)))


def quarter_root_values(n: int) -> np.ndarray:
    """phi(x) = sqrt(max(|x|_1 - n/2, 0)) on every vertex."""
    w = popcount(np.arange(2**n, dtype=np.int64))
    return np.sqrt(np.maximum(w - n / 2.0, 0.0))


def _lipschitz_by_weight(n: int) -> bool:
    """Exact integer test of |phi(a) - phi(b)| <= sqrt(|a - b|) over weight pairs.

    Two vertices of weights a, b are at Hamming distance >= |a - b| and phi
    depends only on the weight, so this covers all vertex pairs. With
    u, v the clipped excesses (integers when n is even), (sqrt u - sqrt v)^2
    <= d iff u + v - d <= 0 or (u + v - d)^2 <= 4uv.
    """
    half = n // 2
    for a in range(n + 1):
        for b in range(n + 1):
            u, v, d = max(a - half, 0), max(b - half, 0), abs(a - b)
            s = u + v - d
            if s > 0 and s * s > 4 * u * v:
                return False
    return True


@dataclass(frozen=True)
class QuarterRootResult:
    n: int
    function: CubeFunction | None
    rms: float  # ((1/4^n) sum_{x,y} |phi(x) - phi(y)|^2)^{1/2}
    lipschitz: bool

    @property
    def average_distortion(self) -> float:
        """Av ratio of phi against ||x - y||_2: sqrt(mean ||x - y||_2^2) / rms, with Lip(phi) = 1."""
        return math.sqrt(self.n / 2.0) / self.rms

    def to_dict(self) -> dict:
        return {"n": self.n, "ratio": self.rms, "averageDistortion": self.average_distortion,
                "lipschitz": self.lipschitz}


def quarter_root_witness(n: int, exhaustive_max_n: int = 8) -> QuarterRootResult:
    if n < 2 or n % 2 or n > 14:
        raise ValidationError(f"n must be even and in 2..14, got {n}")
    counts = np.array([math.comb(n, w) for w in range(n + 1)], dtype=float)
    phi_w = np.sqrt(np.maximum(np.arange(n + 1) - n / 2.0, 0.0))
    diff2 = (phi_w[:, None] - phi_w[None, :]) ** 2
    rms = math.sqrt(float(counts @ diff2 @ counts) / 4.0**n)
    ok = _lipschitz_by_weight(n)
    phi = quarter_root_values(n)
    if n <= exhaustive_max_n:
        x = np.arange(2**n, dtype=np.int64)
        ham = popcount(x[:, None] ^ x[None, :])
        gap = np.abs(phi[:, None] - phi[None, :])
        ok = ok and bool(np.all(gap**2 <= ham + 1e-12))
    # the dense image matrix is only materialized within the usual cube cap
    func = CubeFunction(n, np.abs(phi[:, None] - phi[None, :]), phi[:, None]) if n <= MAX_N else None
    return QuarterRootResult(n, func, rms, ok)
