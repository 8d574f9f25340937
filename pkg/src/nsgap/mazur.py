"""Mazur maps between unit balls of normalized finite-dimensional l_p spaces.

Norms here use the uniform probability measure on coordinates:
``||f||_p = (mean |f_i|^p)^{1/p}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nsgap.config import get_tolerances
from nsgap.errors import ValidationError


def _check_exponents(p: float, q: float) -> None:
    if not (p >= 1 and q >= 1) or np.isinf(p) or np.isinf(q):
        raise ValidationError(f"Mazur exponents must be finite and >= 1, got p={p}, q={q}")


def norm(f, p: float) -> float:
    f = np.asarray(f, dtype=float)
    return float(np.mean(np.abs(f) ** p) ** (1.0 / p))


def mazur_map(f, p: float, q: float) -> np.ndarray:
    """Coordinatewise |f|^{p/q} sign(f), with sign(0) = 0."""
    _check_exponents(p, q)
    f = np.asarray(f, dtype=float)
    return np.sign(f) * np.abs(f) ** (p / q)


@dataclass(frozen=True)
class MazurModuli:
    p: float
    q: float

    def alpha_lower(self, t):
        return np.asarray(t, dtype=float) ** (self.p / self.q) / 2.0 ** ((self.p - self.q) / self.q)

    def beta_upper(self, t):
        return 2.0 ** (1 / self.q - 1 / self.p) * (self.p / self.q) * np.asarray(t, dtype=float)

    def beta_inverse(self, s):
        """Inverse of ``beta_upper``, used to feed the Ozawa bound."""
        return np.asarray(s, dtype=float) / (2.0 ** (1 / self.q - 1 / self.p) * (self.p / self.q))


@dataclass(frozen=True)
class ModulusCheck:
    lower: float
    middle: float
    upper: float
    lhs_ok: bool
    rhs_ok: bool

    @property
    def lower_margin(self) -> float:
        return self.middle - self.lower

    @property
    def upper_margin(self) -> float:
        return self.upper - self.middle

    def to_dict(self) -> dict:
        return {"lower": self.lower, "middle": self.middle, "upper": self.upper,
                "lhsOK": self.lhs_ok, "rhsOK": self.rhs_ok,
                "lowerMargin": self.lower_margin, "upperMargin": self.upper_margin}


def modulus_check(f, g, p: float, q: float, slack: float = 1e-12) -> ModulusCheck:
    """Evaluate both sides of the Mazur modulus inequality for one pair (p >= q).

    ``slack`` is a relative floating-point allowance; the margins are reported raw.
    """
    _check_exponents(p, q)
    if p < q:
        raise ValidationError(f"modulus check is stated for p >= q, got p={p}, q={q}")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise ValidationError("f and g must be vectors of the same length")
    tol = get_tolerances().mazur_norm
    for name, v in (("f", f), ("g", g)):
        if norm(v, p) > 1 + tol:
            raise ValidationError(f"{name} lies outside the unit ball: norm {norm(v, p)!r}")
    mod = MazurModuli(p, q)
    t = norm(f - g, p)
    mid = norm(mazur_map(f, p, q) - mazur_map(g, p, q), q)
    lo = float(mod.alpha_lower(t))
    hi = float(mod.beta_upper(t))
    return ModulusCheck(lo, mid, hi, lo <= mid * (1 + slack) + 1e-300,
                        mid <= hi * (1 + slack) + 1e-300)


def random_ball_points(rng: np.random.Generator, count: int, dim: int, p: float) -> np.ndarray:
    """Points in the normalized l_p unit ball, mixing interior and boundary draws."""
    x = rng.normal(size=(count, dim)) * rng.exponential(size=(count, 1))
    sparse = rng.random((count, dim)) < 0.3
    x = np.where(sparse & (rng.random((count, 1)) < 0.5), 0.0, x)
    norms = np.mean(np.abs(x) ** p, axis=1) ** (1.0 / p)
    norms = np.where(norms == 0, 1.0, norms)
    radius = np.where(rng.random(count) < 0.5, 1.0, rng.random(count) ** (1.0 / dim))
    out = x / norms[:, None] * radius[:, None]
    # guard against round-off pushing a boundary point just outside the ball
    n2 = np.mean(np.abs(out) ** p, axis=1) ** (1.0 / p)
    return out / np.maximum(n2, 1.0)[:, None]


def random_modulus_trial(p: float, q: float, samples: int, dim: int,
                         rng: np.random.Generator | int | None = None) -> dict:
    """Count violations of both modulus inequalities over random pairs."""
    rng = np.random.default_rng(rng)
    f = random_ball_points(rng, samples, dim, p)
    g = random_ball_points(rng, samples, dim, p)
    # antipodal and equal pairs hit the extreme cases of both bounds
    g[: samples // 20] = -f[: samples // 20]
    g[samples // 20: samples // 10] = f[samples // 20: samples // 10]
    lower_bad = upper_bad = 0
    min_lower = min_upper = np.inf
    for fi, gi in zip(f, g):
        r = modulus_check(fi, gi, p, q)
        lower_bad += not r.lhs_ok
        upper_bad += not r.rhs_ok
        min_lower = min(min_lower, r.lower_margin)
        min_upper = min(min_upper, r.upper_margin)
    return {"p": p, "q": q, "samples": samples, "dim": dim,
            "lowerViolations": int(lower_bad), "upperViolations": int(upper_bad),
            "minLowerMargin": float(min_lower), "minUpperMargin": float(min_upper)}
