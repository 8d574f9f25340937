"""Bourgain-style Frechet embeddings into l_p."""

from __future__ import annotations

import math

import numpy as np

from nsgap.embed.witness import EmbeddingWitness, average_distortion
from nsgap.errors import ValidationError
from nsgap.metric import FiniteMetric, lp_distances
from nsgap.rng import as_generator


def _coordinates(x: FiniteMetric, rng: np.random.Generator, per_scale: int) -> np.ndarray:
    n = x.size
    cols = []
    for j in range(int(math.floor(math.log2(n))) + 1):
        size = min(n, 2**j)
        for _ in range(per_scale):
            s = rng.choice(n, size=size, replace=False)
            cols.append(x.dist[:, s].min(axis=1))
    return np.stack(cols, axis=1)


def distortion(source: np.ndarray, image: np.ndarray) -> tuple[float, float, float]:
    """(expansion, contraction, expansion * contraction) over pairs of distinct points."""
    off = ~np.eye(source.shape[0], dtype=bool)
    s, t = source[off], image[off]
    if np.any((t == 0) & (s > 0)):
        exp = float(np.max(t / s))
        return exp, math.inf, math.inf
    ratio = t / s
    exp = float(ratio.max())
    con = float((1.0 / ratio).max())
    return exp, con, exp * con


def bourgain_matousek_embed(x: FiniteMetric, p: float = 2.0, rng: np.random.Generator | int | None = None,
                            sets_per_scale: float = 2.0, max_rounds: int = 8) -> EmbeddingWitness:
    """Coordinates d(x, S) for random S of sizes 2^j, about c ln n sets per size.

    The coordinates are divided by (count)^{1/p}, which makes the map
    1-Lipschitz in l_p. If some pair collapses the set count doubles and
    the draw is repeated.
    """
    n = x.size
    if n < 2:
        raise ValidationError("need at least two points")
    if not p >= 1:
        raise ValidationError(f"p must be >= 1, got {p}")
    if np.any(x.dist[~np.eye(n, dtype=bool)] == 0):
        raise ValidationError("points must be distinct")
    rng = as_generator(rng)
    per_scale = max(1, math.ceil(sets_per_scale * math.log(n)))
    for _ in range(max_rounds):
        coords = _coordinates(x, rng, per_scale)
        coords /= coords.shape[1] ** (1.0 / p)
        img = lp_distances(coords, p)
        exp, con, dist = distortion(x.dist, img)
        if math.isfinite(dist):
            break
        per_scale *= 2
    av = average_distortion(x.dist, img, p, exp)
    return EmbeddingWitness(coords, exp, av, "bourgain", p,
                            {"expansion": exp, "contraction": con, "distortion": dist,
                             "dimension": int(coords.shape[1])})
