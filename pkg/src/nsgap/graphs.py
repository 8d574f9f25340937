"""Regular graph families and spectral lower bounds on their distortion.

Two generators are provided: the pairing (configuration) model for random
d-regular graphs and random circulant Cayley graphs of Z_n. For both the
normalized adjacency matrix is a symmetric stochastic matrix, and
``distortion_lower_bound`` turns its absolute spectral gap into a lower
bound on the l_p distortion, with the universal constant set to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nsgap.errors import NonConvergence, ValidationError
from nsgap.metric import FiniteMetric, graph_metric
from nsgap.rng import as_generator
from nsgap.spectral import StochasticMatrix, eigen_decompose, stochastic_matrix

MAX_RETRIES = 10_000


@dataclass(frozen=True, eq=False)
class RegularGraph:
    n: int
    d: int
    edges: np.ndarray  # (E, 2), u < v, sorted lexicographically
    provenance: dict = field(default_factory=dict)
    connected: bool = True
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.edges[:, 0], self.edges[:, 1]] = 1.0
        a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def walk(self) -> StochasticMatrix:
        if "walk" not in self._cache:
            self._cache["walk"] = stochastic_matrix(self.adjacency() / self.d)
        return self._cache["walk"]

    def eigenvalues(self) -> np.ndarray:
        if "eig" not in self._cache:
            if self.provenance.get("generator") == "abelian_cayley":
                w = np.sort(circulant_eigenvalues(self.n, self.provenance["connectionSet"]))[::-1]
            else:
                w = eigen_decompose(self.walk(), vectors=False).eigenvalues
            self._cache["eig"] = np.asarray(w)
        return self._cache["eig"]

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues()[1])

    @property
    def lambda_abs(self) -> float:
        w = self.eigenvalues()
        return float(max(w[1], -w[-1]))

    def metric(self) -> FiniteMetric:
        if "metric" not in self._cache:
            self._cache["metric"] = graph_metric(self.n, self.edges.tolist())
        return self._cache["metric"]

    def rms_distance(self) -> float:
        return float(np.sqrt(np.mean(self.metric().dist ** 2)))

    def validate(self) -> None:
        e = self.edges
        if np.any(e[:, 0] == e[:, 1]):
            raise ValidationError("graph has a loop")
        if len(np.unique(e[:, 0] * self.n + e[:, 1])) != len(e):
            raise ValidationError("graph has a repeated edge")
        deg = self.degrees()
        if np.any(deg != self.d):
            v = int(np.flatnonzero(deg != self.d)[0])
            raise ValidationError(f"vertex {v} has degree {deg[v]}, expected {self.d}")
        if not _is_connected(self.n, e):
            raise ValidationError("graph is disconnected")


def _canonical(pairs: np.ndarray) -> np.ndarray:
    pairs = np.sort(pairs, axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def _is_connected(n: int, edges: np.ndarray) -> bool:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    g = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    return connected_components(g, directed=False)[0] == 1


def random_regular(n: int, d: int, seed=None) -> RegularGraph:
    """Pairing model with rejection of loops, repeated edges and disconnected graphs.

    Each attempt matches the n*d half-edges by a uniform random permutation.
    Accepted graphs are uniform over simple d-regular graphs; conditioning
    on connectivity keeps that property among connected ones.
    """
    if n < 1 or d < 1:
        raise ValidationError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if d >= n:
        raise ValidationError(f"degree {d} must be below the vertex count {n}")
    if (n * d) % 2:
        raise ValidationError(f"n*d = {n * d} must be even")
    rng = as_generator(seed)
    stubs = np.repeat(np.arange(n), d)
    for attempt in range(1, MAX_RETRIES + 1):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = _canonical(pairs)
        if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
            continue
        if not _is_connected(n, edges):
            continue
        prov = {"generator": "random_regular", "seed": _seed_echo(seed), "attempts": attempt}
        return RegularGraph(n, d, edges, prov, True)
    raise NonConvergence(f"no simple connected {d}-regular graph on {n} vertices after {MAX_RETRIES} pairings")


def _seed_echo(seed):
    return int(seed) if isinstance(seed, (int, np.integer)) else None


def alon_roichman_size(n: int, epsilon: float) -> int:
    return math.ceil(3.0 / epsilon**2 * math.log(n))


def circulant_eigenvalues(n: int, connection_set) -> np.ndarray:
    """Walk eigenvalues (1/|S|) sum_{s in S} cos(2 pi j s / n) for j = 0..n-1."""
    s = np.asarray(sorted(connection_set), dtype=float)
    j = np.arange(n, dtype=float)
    return np.cos(2.0 * np.pi * np.outer(j, s) / n).sum(axis=1) / len(s)


def abelian_cayley(n: int, epsilon: float = 0.5, seed=None, generators=None) -> RegularGraph:
    """Cayley graph of Z_n on {+g, -g} for k random generators g.

    ``generators`` overrides the random draw. Coinciding elements and
    g = -g collapse, so the realized degree is the size of the symmetric
    connection set. The result may be disconnected when the generators
    share a factor with n; ``connected`` records that.
    """
    if n < 3:
        raise ValidationError(f"group order must be at least 3, got {n}")
    if generators is None:
        if not epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {epsilon}")
        k = alon_roichman_size(n, epsilon)
        generators = as_generator(seed).integers(1, n, size=k)
    gens = [int(g) % n for g in generators]
    if not gens or any(g == 0 for g in gens):
        raise ValidationError("generators must be nonzero elements of Z_n")
    conn = sorted({g for g in gens} | {(-g) % n for g in gens})
    v = np.arange(n)
    pairs = np.concatenate([np.stack([v, (v + s) % n], axis=1) for s in conn])
    edges = np.unique(_canonical(pairs), axis=0)
    prov = {"generator": "abelian_cayley", "seed": _seed_echo(seed), "epsilon": epsilon,
            "generators": gens, "connectionSet": conn}
    g = RegularGraph(n, len(conn), edges, prov, _is_connected(n, edges))
    prov["lambda"] = g.lambda_abs
    prov["withinEpsilon"] = bool(g.lambda_abs <= epsilon)
    return g


def ramanujan_lambda(d: int) -> float:
    return 2.0 * math.sqrt(d - 1) / d


def distortion_lower_bound(g: RegularGraph, p: float, lam: float | None = None) -> float:
    """sqrt(1 - lambda^(2/p)) / sqrt(p) times the rms graph distance.

    ``lam`` replaces the measured absolute spectral gap, e.g. by
    ``ramanujan_lambda(g.d)`` for the formula-level Ramanujan comparison.
    """
    if not p >= 2:
        raise ValidationError(f"p must be >= 2, got {p}")
    if not g.connected:
        raise ValidationError("graph is disconnected")
    lam = g.lambda_abs if lam is None else float(lam)
    if lam >= 1.0 - 1e-12 or math.isinf(p):
        return 0.0
    lam = max(lam, 0.0)
    return math.sqrt(1.0 - lam ** (2.0 / p)) / math.sqrt(p) * g.rms_distance()


@dataclass(frozen=True)
class PIndex:
    value: float
    at_floor: bool  # the bound is already below the threshold at p = 2
    threshold: float

    def to_dict(self) -> dict:
        return {"value": self.value, "atFloor": self.at_floor, "threshold": self.threshold}


def p_index_estimate(g: RegularGraph, threshold: float = 10.0, tol: float = 1e-6) -> PIndex:
    """Smallest p >= 2 at which the spectral lower bound drops to ``threshold``.

    The bound is nonincreasing in p, so this is a bisection. Since only a
    lower bound on the distortion enters, the result lower-bounds the true
    index only up to the omitted universal constant.
    """
    if not g.connected:
        raise ValidationError("graph is disconnected")
    bound = lambda p: distortion_lower_bound(g, p)
    if bound(2.0) <= threshold:
        return PIndex(2.0, True, threshold)
    lo, hi = 2.0, 4.0
    while bound(hi) > threshold:
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            raise NonConvergence("bound stays above the threshold")
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        if bound(mid) > threshold:
            lo = mid
        else:
            hi = mid
    return PIndex(hi, False, threshold)


def graph_row(g: RegularGraph, p: float = 2.0, threshold: float = 10.0) -> dict:
    """One tidy record: n, d, seed, lambda2, lambda, rms, bound, proxy."""
    row = {"n": g.n, "d": g.d, "seed": g.provenance.get("seed"), "lambda2": g.lambda2,
           "lambda": g.lambda_abs, "rms": g.rms_distance(), "bound": distortion_lower_bound(g, p),
           "proxy": p_index_estimate(g, threshold).value}
    if g.provenance.get("generator") == "abelian_cayley":
        diam = g.metric().diameter()
        row["rmsBandOk"] = bool(diam / 2 ** 1.5 <= row["rms"] <= diam)
    return row
