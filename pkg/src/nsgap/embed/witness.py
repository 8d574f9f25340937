from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nsgap.metric import FiniteMetric, lp_distances


@dataclass(frozen=True, eq=False)
class EmbeddingWitness:
    """Images of the input points with their measured Lipschitz data.

    ``average_distortion`` is Lip * (mean d_X^p)^{1/p} / (mean d_Y^p)^{1/p},
    which is at least 1 for every map.
    """

    images: np.ndarray  # (n, dim)
    lipschitz: float
    average_distortion: float
    method: str
    p: float = 2.0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "images": self.images.tolist(),
            "lipschitz": float(self.lipschitz),
            "averageDistortion": float(self.average_distortion),
            "p": self.p,
            **{k: _plain(v) for k, v in self.details.items()},
        }


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def lipschitz_constant(source: np.ndarray, image: np.ndarray) -> float:
    """max over pairs with positive source distance of image/source.

    Pairs at source distance 0 but positive image distance make the map
    non-Lipschitz and give +inf.
    """
    pos = source > 0
    if np.any(image[~pos] > 0):
        return np.inf
    if not pos.any():
        return 0.0
    return float(np.max(image[pos] / source[pos]))


def average_distortion(source: np.ndarray, image: np.ndarray, p: float, lip: float | None = None) -> float:
    if lip is None:
        lip = lipschitz_constant(source, image)
    num = np.mean(source**p) ** (1.0 / p)
    den = np.mean(image**p) ** (1.0 / p)
    if den == 0:
        return np.inf
    return float(lip * num / den)


def make_witness(x: FiniteMetric, images, method: str, p: float = 2.0, target_p: float = 2.0,
                 image_dist: np.ndarray | None = None, **details) -> EmbeddingWitness:
    """Measure a map given by its images (rows) into l_{target_p}."""
    imgs = np.asarray(images, dtype=float)
    if imgs.ndim == 1:
        imgs = imgs[:, None]
    if image_dist is None:
        image_dist = lp_distances(imgs, target_p)
    lip = lipschitz_constant(x.dist, image_dist)
    av = average_distortion(x.dist, image_dist, p, lip)
    return EmbeddingWitness(imgs, lip, av, method, p, dict(details))
