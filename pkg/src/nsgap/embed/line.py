"""1-Lipschitz maps into the real line with large average spread.

The construction follows a two-case argument. With r the smallest
p-moment radius (attained at point k), either few pairs inside the
4r-ball around x_k are r/8-separated, and then the truncated distance
s_i = max(0, d(x_i, x_k) - 2r) already spreads the points, or many are,
and then a distance-to-random-zero-set map at scale r/8 does.
"""

from __future__ import annotations

import numpy as np

from nsgap.embed.partition import ckr_partition, zero_set_from_partition
from nsgap.embed.witness import EmbeddingWitness, average_distortion, lipschitz_constant
from nsgap.errors import DegenerateConfiguration, ValidationError
from nsgap.metric import FiniteMetric
from nsgap.rng import as_generator


def moment_centre(x: FiniteMetric, p: float) -> tuple[float, int]:
    """r = min_i (mean_j d_ij^p)^{1/p} and the lowest index attaining it."""
    radii = np.mean(x.dist**p, axis=1) ** (1.0 / p)
    k = int(np.argmin(radii))
    return float(radii[k]), k


def separated_pairs(x: FiniteMetric, r: float, k: int) -> int:
    """|M|: ordered pairs inside the 4r-ball around x_k at distance >= r/8."""
    ball = x.dist[k] <= 4 * r
    sub = x.dist[np.ix_(ball, ball)]
    return int(np.count_nonzero(sub >= r / 8))


def truncated_distance(x: FiniteMetric, r: float, k: int) -> np.ndarray:
    return np.maximum(0.0, x.dist[k] - 2 * r)


def si_floor(x: FiniteMetric, p: float) -> dict:
    """Both sides of the spreading estimate for the truncated distance map."""
    r, k = moment_centre(x, p)
    s = truncated_distance(x, r, k)
    lhs = float(np.sum(np.abs(s[:, None] - s[None, :]) ** p))
    n = x.size
    rhs_centre = 2.0 ** (-5 * p) * n * float(np.sum(x.dist[k] ** p))
    rhs_pairs = 2.0 ** (-5 * p) * float(np.sum(x.dist**p))
    return {"lhs": lhs, "rhsCentre": rhs_centre, "rhsPairs": rhs_pairs,
            "holdsCentre": lhs >= rhs_centre, "holdsPairs": lhs >= rhs_pairs}


def _spread(f: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(f[:, None] - f[None, :]) ** p))


def line_embed(x: FiniteMetric, p: float = 2.0, zero_set_trials: int = 64,
               rng: np.random.Generator | int | None = None) -> EmbeddingWitness:
    if x.size < 2:
        raise ValidationError("line embedding needs at least two points")
    if not p >= 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    if x.dist.max() == 0:
        raise DegenerateConfiguration("all points coincide")
    rng = as_generator(rng)
    n = x.size
    r, k = moment_centre(x, p)
    m_size = separated_pairs(x, r, k)
    threshold = n * n / 2.0 ** (7 * p)
    branch = "truncated" if m_size <= threshold else "zero_set"
    f = None
    if branch == "truncated":
        f = truncated_distance(x, r, k)
    else:
        best = 0.0
        for _ in range(zero_set_trials):
            z = zero_set_from_partition(ckr_partition(x, r / 8, rng), rng)
            if z.empty:
                continue
            cand = z.distances(x)
            sp = _spread(cand, p)
            if sp > best:
                best, f = sp, cand
    if f is None or np.ptp(f) == 0:
        # every sampled zero set was trivial: distance to the centre is still 1-Lipschitz
        branch += "+fallback"
        f = x.dist[k].copy()
    img = np.abs(f[:, None] - f[None, :])
    lip = lipschitz_constant(x.dist, img)
    av = average_distortion(x.dist, img, p, lip)
    return EmbeddingWitness(f[:, None], lip, av, "line", p,
                            {"branch": branch, "r": r, "centre": k, "separatedPairs": m_size,
                             "threshold": threshold})
