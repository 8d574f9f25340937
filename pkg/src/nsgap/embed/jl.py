"""Gaussian random projections."""

from __future__ import annotations

import math

import numpy as np

from nsgap.embed.bourgain import distortion
from nsgap.embed.witness import EmbeddingWitness, average_distortion
from nsgap.errors import ValidationError
from nsgap.metric import PointCloud, lp_distances


def jl_dimension(n: int, eps: float, c: float = 8.0) -> int:
    return max(1, math.ceil(c * math.log(max(n, 2)) / eps**2))


def jl_reduce(cloud: PointCloud, target_dim: int, rng: np.random.Generator | int | None = None) -> EmbeddingWitness:
    """Project onto target_dim Gaussian directions scaled by 1/sqrt(target_dim).

    Details record the bi-Lipschitz distortion and the single coordinate
    with the largest spread sum_{ij} |f_s(x_i) - f_s(x_j)|^2, which by
    pigeonhole carries at least a 1/k share of the total.
    """
    if cloud.p != 2:
        raise ValidationError("random projection is defined for Euclidean point clouds")
    if target_dim < 1:
        raise ValidationError(f"target dimension must be >= 1, got {target_dim}")
    rng = np.random.default_rng(rng)
    pts = cloud.points
    n, dim = pts.shape
    g = rng.normal(size=(dim, target_dim)) / math.sqrt(target_dim)
    img = pts @ g
    src = lp_distances(pts, 2.0)
    dst = lp_distances(img, 2.0)
    diff = img[:, None, :] - img[None, :, :]
    spread = (diff**2).sum(axis=(0, 1))  # per coordinate
    s = int(np.argmax(spread))
    if n < 2:
        return EmbeddingWitness(img, 0.0, 1.0, "jl", 2.0,
                                {"expansion": 1.0, "contraction": 1.0, "distortion": 1.0,
                                 "bestCoordinate": s, "bestSpread": 0.0, "totalSpread": 0.0})
    distinct = src[~np.eye(n, dtype=bool)] > 0
    if distinct.all():
        exp, con, dist = distortion(src, dst)
    else:
        exp = con = dist = math.nan
    lip = float(np.max(np.divide(dst, src, out=np.zeros_like(dst), where=src > 0)))
    return EmbeddingWitness(img, lip, average_distortion(src, dst, 2.0, lip), "jl", 2.0,
                            {"expansion": exp, "contraction": con, "distortion": dist,
                             "bestCoordinate": s, "bestSpread": float(spread[s]),
                             "totalSpread": float(spread.sum())})
