"""Symmetric stochastic matrices and their spectra."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from nsgap.config import get_tolerances
from nsgap.errors import ValidationError


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Symmetric, nonnegative, row-stochastic real matrix.

    Construct through :func:`stochastic_matrix` (or :meth:`from_array`),
    which validates and symmetrizes the input.
    """

    entries: np.ndarray
    _summary: list = field(default_factory=list, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_array(cls, a) -> "StochasticMatrix":
        return stochastic_matrix(a)

    def summary(self) -> "SpectralSummary":
        if not self._summary:
            self._summary.append(eigen_decompose(self))
        return self._summary[0]

    @property
    def lambda2(self) -> float:
        return self.summary().lambda2

    @property
    def lambda_abs(self) -> float:
        return self.summary().lambda_abs

    def to_json(self) -> str:
        return json.dumps(self.entries.tolist())


def stochastic_matrix(a) -> StochasticMatrix:
    tol = get_tolerances()
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"matrix must be square and nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix has non-finite entries")
    asym = np.max(np.abs(arr - arr.T))
    if asym > tol.symmetry_ingest:
        i, j = np.unravel_index(np.argmax(np.abs(arr - arr.T)), arr.shape)
        raise ValidationError(
            f"symmetry violated: |a[{i},{j}] - a[{j},{i}]| = {asym:.3e}"
        )
    arr = (arr + arr.T) / 2.0
    if np.min(arr) < 0:
        i, j = np.unravel_index(np.argmin(arr), arr.shape)
        raise ValidationError(f"nonnegativity violated: a[{i},{j}] = {arr[i, j]:.3e}")
    rows = arr.sum(axis=1)
    bad = np.abs(rows - 1.0) > tol.row_sum
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValidationError(f"row-stochasticity violated: row {i} sums to {rows[i]!r}")
    arr.setflags(write=False)
    return StochasticMatrix(arr)


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray  # descending
    lambda2: float
    lambda_abs: float
    eigenvectors: np.ndarray | None = None  # columns match ``eigenvalues``

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "lambda2": float(self.lambda2),
            "lambdaAbs": float(self.lambda_abs),
        }


def jacobi_eigh(a: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Rotations sweep the strict upper triangle row by row, which makes the
    result reproducible for a given input on a given platform. Returns
    unsorted eigenvalues and the matching eigenvector columns.
    """
    s = np.array(a, dtype=float, copy=True)
    n = s.shape[0]
    v = np.eye(n)
    if n == 1:
        return s.diagonal().copy(), v
    scale = max(np.abs(s).max(), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(s, 1) ** 2))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = s[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (s[q, q] - s[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                elif abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                sp = s[:, p].copy()
                sq = s[:, q].copy()
                s[:, p] = c * sp - sn * sq
                s[:, q] = sn * sp + c * sq
                rp = s[p, :].copy()
                rq = s[q, :].copy()
                s[p, :] = c * rp - sn * rq
                s[q, :] = sn * rp + c * rq
                s[p, q] = s[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    return s.diagonal().copy(), v


def symmetric_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs sorted by descending eigenvalue."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] <= get_tolerances().jacobi_max_n:
        w, v = jacobi_eigh(a)
    else:
        w, v = np.linalg.eigh(a)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigen_decompose(a: StochasticMatrix | np.ndarray, vectors: bool = True) -> SpectralSummary:
    if not isinstance(a, StochasticMatrix):
        a = stochastic_matrix(a)
    w, v = symmetric_eigh(a.entries)
    tol = get_tolerances().eigen
    # clip round-off just outside [-1, 1]
    w = np.clip(w, -1.0, 1.0) if np.all(np.abs(w) <= 1 + tol) else w
    n = len(w)
    lam2 = float(w[1]) if n > 1 else float("nan")
    lam_abs = float(max(w[1], -w[-1])) if n > 1 else float("nan")
    w.setflags(write=False)
    return SpectralSummary(w, lam2, lam_abs, v if vectors else None)


def lazy(a: StochasticMatrix) -> StochasticMatrix:
    """(I + A) / 2."""
    return stochastic_matrix((np.eye(a.n) + a.entries) / 2.0)


def matrix_power(a: StochasticMatrix, m: int) -> StochasticMatrix:
    if int(m) != m or m < 1:
        raise ValidationError(f"matrix power needs an integer m >= 1, got {m!r}")
    m = int(m)
    result = None
    base = a.entries
    while m:
        if m & 1:
            result = base.copy() if result is None else result @ base
        m >>= 1
        if m:
            base = base @ base
    # products of symmetric stochastic matrices drift by round-off only
    result = (result + result.T) / 2.0
    result = np.clip(result, 0.0, None)
    result /= result.sum(axis=1, keepdims=True)
    result = (result + result.T) / 2.0
    return stochastic_matrix(result)


def anti_diagonal(a: StochasticMatrix) -> StochasticMatrix:
    """The 2n x 2n block matrix [[0, A], [A, 0]]."""
    n = a.n
    b = np.zeros((2 * n, 2 * n))
    b[:n, n:] = a.entries
    b[n:, :n] = a.entries
    return stochastic_matrix(b)


def uniform_matrix(n: int) -> StochasticMatrix:
    return stochastic_matrix(np.full((n, n), 1.0 / n))


def random_stochastic(n: int, rng: np.random.Generator, style: str | None = None) -> StochasticMatrix:
    """Draw a random symmetric stochastic matrix.

    ``style`` selects the family: ``"weights"`` (random symmetric weights
    with a diagonal remainder), ``"birkhoff"`` (mixture of symmetrized
    permutation matrices, which can have eigenvalues near -1) or ``"sparse"``
    (random weights on a sparse support). ``None`` picks one at random.
    """
    if style is None:
        style = ("weights", "birkhoff", "sparse")[int(rng.integers(3))]
    if style == "birkhoff":
        k = int(rng.integers(1, 4))
        w = rng.dirichlet(np.ones(k))
        m = np.zeros((n, n))
        for wt in w:
            perm = rng.permutation(n)
            p = np.eye(n)[perm]
            m += wt * (p + p.T) / 2.0
        return stochastic_matrix(m)
    w = rng.random((n, n))
    if style == "sparse":
        w *= rng.random((n, n)) < 0.5
    w = np.triu(w, 1)
    w = w + w.T
    rows = w.sum(axis=1)
    scale = max(rows.max(), 1e-12) * (1.0 + rng.random())
    m = w / scale
    np.fill_diagonal(m, 1.0 - m.sum(axis=1))
    return stochastic_matrix(m)


def load_matrix(path: str | Path) -> StochasticMatrix:
    """Read a matrix as a JSON array-of-arrays or dense text with ``n`` first."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        data = json.loads(text)
        if isinstance(data, dict):
            data = data.get("entries", data.get("matrix"))
        return stochastic_matrix(data)
    tokens = text.split()
    if not tokens:
        raise ValidationError(f"{path}: empty matrix file")
    n = int(tokens[0])
    vals = [float(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise ValidationError(f"{path}: expected {n * n} entries after n, found {len(vals)}")
    return stochastic_matrix(np.array(vals).reshape(n, n))
