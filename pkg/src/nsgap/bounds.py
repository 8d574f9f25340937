"""Closed-form bound calculators.

Every inequality with an unspecified absolute constant takes it from
``BoundParams.universal_c`` (default 1). Reports carry ``certified=False``
unless the value is a genuine bound with no hidden constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from nsgap.config import get_tolerances
from nsgap.errors import ValidationError
from nsgap.spectral import StochasticMatrix

INF = math.inf


@dataclass(frozen=True)
class BoundParams:
    p: float = 2.0
    q: float = 2.0
    theta: float = 1.0
    smoothness_const: float = 1.0  # S_q(X)
    convexity_const: float = 1.0  # K_p(X)
    universal_c: float = 1.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValidationError(f"p must be >= 1, got {self.p}")
        if not 1 <= self.q <= 2:
            raise ValidationError(f"q must lie in [1, 2], got {self.q}")
        if not 0 <= self.theta <= 1:
            raise ValidationError(f"theta must lie in [0, 1], got {self.theta}")
        if not (self.smoothness_const >= 1 and self.convexity_const >= 1):
            raise ValidationError("smoothness and convexity constants must be >= 1")
        if not self.universal_c > 0:
            raise ValidationError("universal_c must be positive")


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    inputs: dict
    certified: bool = False

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": "inf" if self.is_infinite else float(self.value),
            "infinite": self.is_infinite,
            "inputs": {k: _jsonable(v) for k, v in self.inputs.items()},
            "certified": self.certified,
        }


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _gap(lam: float) -> float:
    """1 - lam, snapped to zero when lam is 1 up to the eigen tolerance."""
    g = 1.0 - lam
    return 0.0 if g <= get_tolerances().eigen else g


def _lams(a: StochasticMatrix | float, lam_abs: float | None = None) -> tuple[float, float]:
    if isinstance(a, StochasticMatrix):
        return a.lambda2, a.lambda_abs
    lam2 = float(a)
    return lam2, lam2 if lam_abs is None else float(lam_abs)


def cheeger_reference(a: StochasticMatrix | float) -> BoundReport:
    """1/sqrt(1 - lambda_2): the cut-based gap up to an unspecified constant."""
    lam2, _ = _lams(a)
    g = _gap(lam2)
    value = INF if g == 0 else 1.0 / math.sqrt(g)
    return BoundReport("cheeger", value, {"lambda2": lam2})


def matousek_bound(a: StochasticMatrix | float, p: float, universal_c: float = 1.0) -> BoundReport:
    if p < 2:
        raise ValidationError(f"the extrapolation bound needs p >= 2, got {p}")
    lam2, _ = _lams(a)
    g = _gap(lam2)
    value = INF if g == 0 else (universal_c * p) ** p / g ** (p / 2)
    return BoundReport("matousek", value, {"lambda2": lam2, "p": p, "universalC": universal_c})


def lp_gamma_bound(a: StochasticMatrix | float, p: float, universal_c: float = 1.0,
                   lam_abs: float | None = None) -> BoundReport:
    """min(C p^2/(1-lambda_2), C p/(1-lambda^{2/p})) for l_p-valued configurations."""
    if p < 2:
        raise ValidationError(f"the l_p bound needs p >= 2, got {p}")
    lam2, lam = _lams(a, lam_abs)
    g2 = _gap(lam2)
    first = INF if g2 == 0 else universal_c * p * p / g2
    g = _gap(max(lam, 0.0) ** (2.0 / p))
    second = INF if g == 0 else universal_c * p / g
    return BoundReport(
        "lp_gamma",
        min(first, second),
        {"lambda2": lam2, "lambdaAbs": lam, "p": p, "universalC": universal_c,
         "branches": {"lambda2": first, "lambdaAbs": second}},
    )


def ozawa_bound(gamma_y: float, q: float, alpha: Callable[[float], float],
                beta_inverse: Callable[[float], float]) -> BoundReport:
    """8^{q+1} gamma_Y + 8^q / betaInverse(alpha(1/4) / (8 gamma_Y^{1/q}))^q."""
    if not gamma_y >= 1:
        raise ValidationError(f"gammaY must be >= 1, got {gamma_y}")
    if not q >= 1:
        raise ValidationError(f"q must be >= 1, got {q}")
    if math.isinf(gamma_y):
        return BoundReport("ozawa", INF, {"gammaY": gamma_y, "q": q})
    arg = alpha(0.25) / (8.0 * gamma_y ** (1.0 / q))
    b = beta_inverse(arg)
    tail = INF if b <= 0 else 8.0**q / b**q
    return BoundReport("ozawa", 8.0 ** (q + 1) * gamma_y + tail,
                       {"gammaY": gamma_y, "q": q, "betaInverseArg": arg, "betaInverse": b})


def tabulated(xs, ys) -> Callable[[float], float]:
    """Monotone function from samples, linear in between and clamped at the ends."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
        raise ValidationError("tabulated function needs matching 1-d samples (at least two)")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) < 0):
        raise ValidationError("tabulated function must be increasing")
    return lambda t: float(np.interp(t, xs, ys))


def interpolation_bound(gamma_x: float, gamma_y: float, params: BoundParams,
                        p_exp: float, q_exp: float, r_exp: float,
                        convexity_q: float | None = None) -> BoundReport:
    """c^s (s^{s/r} + S_r^s) * min{(9K_p)^p gX/theta, (9K_q)^q gY/(1-theta)}^{s/r}.

    ``params.convexity_const`` is K_p; ``convexity_q`` is K_q and defaults to
    the same value. ``s`` solves 1/s = theta/p + (1-theta)/q.
    """
    if not 1 <= r_exp <= 2:
        raise ValidationError(f"r must lie in [1, 2], got {r_exp}")
    theta = params.theta
    inv_s = theta / p_exp + (1 - theta) / q_exp
    s = INF if inv_s == 0 else 1.0 / inv_s
    kq = params.convexity_const if convexity_q is None else convexity_q
    x_branch = INF if theta == 0 else (9 * params.convexity_const) ** p_exp * gamma_x / theta
    y_branch = INF if theta == 1 else (9 * kq) ** q_exp * gamma_y / (1 - theta)
    m = min(x_branch, y_branch)
    c, sr = params.universal_c, params.smoothness_const
    value = INF if math.isinf(s) or math.isinf(m) else c**s * (s ** (s / r_exp) + sr**s) * m ** (s / r_exp)
    return BoundReport(
        "interpolation", value,
        {"gammaX": gamma_x, "gammaY": gamma_y, "p": p_exp, "q": q_exp, "r": r_exp, "s": s,
         "theta": theta, "branch": "X" if x_branch <= y_branch else "Y", **_param_echo(params)},
    )


def refined_markov_bound(a: StochasticMatrix | float, p: float, m: int,
                         universal_c: float = 1.0) -> BoundReport:
    """C p sum_{t<m} base^t with base = 1 - (2/p)(1 - lambda_2) clamped to [0, 1]."""
    if p < 2:
        raise ValidationError(f"p must be >= 2, got {p}")
    if int(m) != m or m < 1:
        raise ValidationError(f"m must be a positive integer, got {m}")
    m = int(m)
    lam2, _ = _lams(a)
    base = min(1.0, max(0.0, 1.0 - (2.0 / p) * (1.0 - lam2)))
    total = float(m) if base == 1.0 else (1.0 - base**m) / (1.0 - base)
    return BoundReport("refined_markov", universal_c * p * total,
                       {"lambda2": lam2, "p": p, "m": m, "base": base, "universalC": universal_c})


def smoothness_interp_bound(a: StochasticMatrix | float, params: BoundParams,
                            lam_abs: float | None = None) -> BoundReport:
    """Both forms: S^2/(1-lambda^theta)^{2/q} and (S^2/theta^{2/q})/(1-lambda_2)^{2/q}."""
    theta, q = params.theta, params.q
    if theta <= 0:
        raise ValidationError("theta must be positive")
    lam2, lam = _lams(a, lam_abs)
    c, s2 = params.universal_c, params.smoothness_const**2
    g = _gap(max(lam, 0.0) ** theta)
    first = INF if g == 0 else c * s2 / g ** (2.0 / q)
    g2 = _gap(lam2)
    second = INF if g2 == 0 else c * s2 / theta ** (2.0 / q) / g2 ** (2.0 / q)
    return BoundReport("smoothness_interp", min(first, second),
                       {"lambda2": lam2, "lambdaAbs": lam, "absoluteForm": first,
                        "lambda2Form": second, **_param_echo(params)})


def _param_echo(params: BoundParams) -> dict:
    d = asdict(params)
    return {"pParam": d["p"], "qParam": d["q"], "thetaParam": d["theta"],
            "smoothnessConst": d["smoothness_const"], "convexityConst": d["convexity_const"],
            "universalC": d["universal_c"]}


BOUND_NAMES = ("cheeger", "matousek", "lp_gamma", "refined_markov", "smoothness_interp",
               "ozawa", "interpolation")
