"""Finite metric spaces, graph metrics, l_p point clouds and Hamming cubes."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from nsgap.config import get_tolerances
from nsgap.errors import ValidationError
from nsgap.spectral import StochasticMatrix, stochastic_matrix


@dataclass(frozen=True, eq=False)
class FiniteMetric:
    dist: np.ndarray

    @property
    def size(self) -> int:
        return self.dist.shape[0]

    def subset(self, idx) -> "FiniteMetric":
        idx = np.asarray(idx, dtype=int)
        return FiniteMetric(self.dist[np.ix_(idx, idx)])

    def diameter(self) -> float:
        return float(self.dist.max())

    def to_json(self) -> str:
        return json.dumps(self.dist.tolist())


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray  # (n, dim)
    p: float = 2.0  # math.inf allowed

    def __post_init__(self):
        if self.points.ndim != 2:
            raise ValidationError("point cloud must be a 2-d array of coordinates")
        if not self.p >= 1:
            raise ValidationError(f"norm exponent must be >= 1, got {self.p}")


@dataclass(frozen=True, eq=False)
class Kernel:
    values: np.ndarray
    p: float

    @property
    def size(self) -> int:
        return self.values.shape[0]


def validate_metric(d) -> FiniteMetric:
    """Check a distance matrix and wrap it.

    Errors name the first violated pair or triple in row-major order.
    """
    tol = get_tolerances().triangle
    arr = np.array(d, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"distance matrix must be square and nonempty, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("distance matrix has non-finite entries")
    diag = np.nonzero(arr.diagonal())[0]
    if diag.size:
        i = int(diag[0])
        raise ValidationError(f"nonzero diagonal at ({i},{i}): {arr[i, i]}")
    neg = np.argwhere(arr < 0)
    if neg.size:
        i, j = neg[0]
        raise ValidationError(f"negative distance at ({i},{j}): {arr[i, j]}")
    asym = np.argwhere(np.abs(arr - arr.T) > tol)
    if asym.size:
        i, j = asym[0]
        raise ValidationError(f"asymmetric distances at ({i},{j}): {arr[i, j]} != {arr[j, i]}")
    arr = (arr + arr.T) / 2.0
    n = arr.shape[0]
    # d[i,k] <= d[i,j] + d[j,k] for all triples, checked one middle point at a time
    for j in range(n):
        slack = arr[:, j][:, None] + arr[j, :][None, :] - arr
        bad = np.argwhere(slack < -tol)
        if bad.size:
            i, k = bad[0]
            raise ValidationError(
                f"triangle inequality violated at ({i},{j},{k}): "
                f"d({i},{k})={arr[i, k]} > d({i},{j})+d({j},{k})={arr[i, j] + arr[j, k]}"
            )
    arr.setflags(write=False)
    return FiniteMetric(arr)


def _adjacency_lists(n: int, edges) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u},{v}) out of range for {n} vertices")
        if u == v:
            continue
        adj[u].append(v)
        adj[v].append(u)
    return adj


def bfs_distances(n: int, edges) -> np.ndarray:
    """All-pairs unit-weight shortest paths by one BFS per source; -1 if unreachable."""
    adj = _adjacency_lists(n, edges)
    out = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        row = out[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if row[v] < 0:
                    row[v] = row[u] + 1
                    queue.append(v)
    return out


def _csgraph_distances(n: int, edges) -> np.ndarray:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import shortest_path

    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    e = e[e[:, 0] != e[:, 1]]
    if e.size and (e.min() < 0 or e.max() >= n):
        raise ValidationError(f"edge out of range for {n} vertices")
    g = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
    d = shortest_path(g, method="D", directed=False, unweighted=True)
    out = np.where(np.isinf(d), -1, d).astype(np.int64)
    return out


def graph_metric(n: int, edges, method: str = "auto") -> FiniteMetric:
    """Shortest-path metric of an unweighted connected graph on vertices 0..n-1.

    ``method="bfs"`` runs plain Python BFS; ``"csgraph"`` delegates to
    scipy's compiled BFS. ``"auto"`` uses scipy above 64 vertices.
    """
    if n < 1:
        raise ValidationError("graph needs at least one vertex")
    edges = list(edges)
    if method == "auto":
        method = "csgraph" if n > 64 else "bfs"
    d = bfs_distances(n, edges) if method == "bfs" else _csgraph_distances(n, edges)
    unreachable = np.argwhere(d < 0)
    if unreachable.size:
        u, v = unreachable[0]
        raise ValidationError(f"graph is disconnected: vertices {u} and {v} are unreachable")
    d = d.astype(float)
    d.setflags(write=False)
    return FiniteMetric(d)


def lp_distances(points: np.ndarray, p: float) -> np.ndarray:
    diff = np.abs(points[:, None, :] - points[None, :, :])
    if np.isinf(p):
        return diff.max(axis=2) if points.shape[1] else np.zeros((len(points),) * 2)
    if p == 1:
        return diff.sum(axis=2)
    if p == 2:
        return np.sqrt((diff * diff).sum(axis=2))
    return (diff**p).sum(axis=2) ** (1.0 / p)


def point_cloud(points, p: float = 2.0) -> PointCloud:
    arr = np.array(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return PointCloud(arr, float(p))


def lp_metric(cloud: PointCloud) -> FiniteMetric:
    d = lp_distances(cloud.points, cloud.p)
    np.fill_diagonal(d, 0.0)
    d = (d + d.T) / 2.0
    d.setflags(write=False)
    return FiniteMetric(d)


def cube_points(n: int) -> np.ndarray:
    """Vertices of F_2^n as 0/1 rows; row z has bit i of z in column i."""
    z = np.arange(2**n)
    return ((z[:, None] >> np.arange(n)[None, :]) & 1).astype(float)


def popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


def hamming_cube_edges(n: int) -> list[tuple[int, int]]:
    return [(z, z ^ (1 << i)) for z in range(2**n) for i in range(n) if z < z ^ (1 << i)]


def hamming_cube(n: int) -> tuple[PointCloud, FiniteMetric, StochasticMatrix]:
    """Cube vertices, their l_1 metric and the normalized adjacency matrix H_n."""
    cap = get_tolerances().cube_max_n
    if n < 1 or n > cap:
        raise ValidationError(f"cube dimension must be in 1..{cap}, got {n}")
    pts = cube_points(n)
    z = np.arange(2**n)
    dist = popcount(z[:, None] ^ z[None, :]).astype(float)
    dist.setflags(write=False)
    h = (dist == 1).astype(float) / n
    return PointCloud(pts, 1.0), FiniteMetric(dist), stochastic_matrix(h)


def power_kernel(m: FiniteMetric, p: float) -> Kernel:
    if not p >= 1 or np.isinf(p):
        raise ValidationError(f"kernel exponent must be a finite real >= 1, got {p}")
    vals = m.dist**p
    vals.setflags(write=False)
    return Kernel(vals, float(p))


def path_metric(points) -> FiniteMetric:
    """Metric of real numbers under |x - y|."""
    x = np.asarray(points, dtype=float)
    d = np.abs(x[:, None] - x[None, :])
    d.setflags(write=False)
    return FiniteMetric(d)


def cycle_edges(n: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % n) for i in range(n)]


def grid_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    e = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                e.append((v, v + 1))
            if r + 1 < rows:
                e.append((v, v + cols))
    return e


def random_metric(n: int, rng: np.random.Generator, style: str | None = None) -> FiniteMetric:
    """Random finite metric for property tests.

    Styles: ``"euclidean"`` (Gaussian points in the plane), ``"graph"``
    (shortest paths of a random weighted graph), ``"clustered"`` (a tight
    cluster plus far outliers), ``"discrete"`` (integer-valued).
    """
    if style is None:
        style = ("euclidean", "graph", "clustered", "discrete")[int(rng.integers(4))]
    if style == "euclidean":
        return lp_metric(PointCloud(rng.normal(size=(n, 2)), 2.0))
    if style == "clustered":
        k = max(1, n // 8)
        pts = rng.normal(scale=0.01, size=(n, 2))
        far = rng.choice(n, size=k, replace=False)
        pts[far] += rng.normal(scale=50.0, size=(k, 2))
        return lp_metric(PointCloud(pts, 2.0))
    w = rng.random((n, n)) + 0.05
    if style == "discrete":
        w = rng.integers(1, 4, size=(n, n)).astype(float)
    w = np.triu(w, 1)
    w = w + w.T
    from scipy.sparse.csgraph import shortest_path

    d = shortest_path(w, method="FW", directed=False)
    np.fill_diagonal(d, 0.0)
    return validate_metric(d)


def load_metric(path: str | Path) -> FiniteMetric:
    """Read a distance matrix (JSON array-of-arrays) or a point cloud ({"points": ..., "p": ...})."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        if "points" in data:
            return lp_metric(point_cloud(data["points"], data.get("p", 2.0)))
        data = data.get("dist", data.get("matrix"))
    return validate_metric(data)


def load_edge_list(path: str | Path) -> tuple[int, list[tuple[int, int]]]:
    """Parse "u v" lines; an optional first line with a single integer gives n."""
    n = None
    edges = []
    for line in Path(path).read_text().splitlines():
        parts = line.split("#", 1)[0].split()
        if not parts:
            continue
        if len(parts) == 1 and n is None and not edges:
            n = int(parts[0])
            continue
        if len(parts) != 2:
            raise ValidationError(f"bad edge line: {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max(max(e) for e in edges) if edges else 1
    return n, edges
