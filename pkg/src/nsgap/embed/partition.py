"""Ball-carving random partitions and the random zero sets built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nsgap.errors import ValidationError
from nsgap.metric import FiniteMetric


@dataclass(frozen=True, eq=False)
class PartitionSample:
    scale: float
    labels: np.ndarray  # labels[i] = cluster index of point i
    radius: float  # carving radius actually drawn, in [scale/4, scale/2]

    @property
    def clusters(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in np.flatnonzero(self.labels == c))
                for c in range(int(self.labels.max()) + 1)]

    def padded(self, x: FiniteMetric, pad_radius: float) -> np.ndarray:
        """Mask of points whose closed pad_radius-ball stays inside their own cluster."""
        near = x.dist <= pad_radius
        same = self.labels[:, None] == self.labels[None, :]
        return np.all(same | ~near, axis=1)

    def max_cluster_diameter(self, x: FiniteMetric) -> float:
        same = self.labels[:, None] == self.labels[None, :]
        return float(np.max(np.where(same, x.dist, 0.0)))

    def to_dict(self) -> dict:
        return {"scale": self.scale, "radius": self.radius, "clusters": [list(c) for c in self.clusters]}


def ckr_partition(x: FiniteMetric, delta: float, rng: np.random.Generator | int | None = None) -> PartitionSample:
    """Carve balls of one random radius R ~ U[delta/4, delta/2] around centres in random order.

    Each cluster lies in a ball of radius R, so its diameter is at most delta.
    """
    if not delta > 0:
        raise ValidationError(f"partition scale must be positive, got {delta}")
    rng = np.random.default_rng(rng)
    n = x.size
    radius = float(rng.uniform(delta / 4, delta / 2))
    labels = np.full(n, -1, dtype=np.int64)
    next_label = 0
    for c in rng.permutation(n):
        grab = (labels < 0) & (x.dist[c] <= radius)
        if grab.any():
            labels[grab] = next_label
            next_label += 1
    return PartitionSample(float(delta), labels, radius)


def padding_frequency(x: FiniteMetric, delta: float, pad_radius: float, trials: int,
                      rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Per-point empirical probability of being pad_radius-padded."""
    rng = np.random.default_rng(rng)
    hits = np.zeros(x.size)
    for _ in range(trials):
        hits += ckr_partition(x, delta, rng).padded(x, pad_radius)
    return hits / trials


@dataclass(frozen=True, eq=False)
class ZeroSet:
    scale: float
    members: np.ndarray  # sorted point indices; may be empty
    zeta: float = 8.0

    @property
    def empty(self) -> bool:
        return self.members.size == 0

    def distances(self, x: FiniteMetric) -> np.ndarray:
        """d(x_i, Z) for every point; +inf everywhere when Z is empty."""
        if self.empty:
            return np.full(x.size, np.inf)
        return x.dist[:, self.members].min(axis=1)

    def to_dict(self) -> dict:
        return {"scale": self.scale, "members": self.members.tolist(), "zeta": self.zeta}


def zero_set_from_partition(part: PartitionSample, rng: np.random.Generator | int | None = None,
                            zeta: float = 8.0) -> ZeroSet:
    """Keep each cluster independently with probability 1/2."""
    rng = np.random.default_rng(rng)
    k = int(part.labels.max()) + 1
    keep = rng.random(k) < 0.5
    members = np.flatnonzero(keep[part.labels])
    return ZeroSet(part.scale, members, zeta)


def zero_set_statistics(x: FiniteMetric, delta: float, trials: int, zeta: float = 8.0,
                        rng: np.random.Generator | int | None = None) -> dict:
    """Empirical separation probability of far pairs.

    A pair (i, j) with d(x_i, x_j) >= delta counts as separated by Z when
    x_i is in Z and d(x_j, Z) >= delta/zeta. Reports the minimum frequency
    over far pairs, an estimate of the zero-set probability delta.
    """
    rng = np.random.default_rng(rng)
    far = x.dist >= delta
    if not far.any():
        return {"pairs": 0, "minProbability": None, "meanProbability": None}
    hits = np.zeros_like(x.dist)
    for _ in range(trials):
        z = zero_set_from_partition(ckr_partition(x, delta, rng), rng, zeta)
        if z.empty:
            continue
        inz = np.zeros(x.size, dtype=bool)
        inz[z.members] = True
        dz = z.distances(x)
        hits += inz[:, None] & (dz[None, :] >= delta / zeta)
    freq = hits[far] / trials
    return {"pairs": int(far.sum()), "minProbability": float(freq.min()),
            "meanProbability": float(freq.mean())}
