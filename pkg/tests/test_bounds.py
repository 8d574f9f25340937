import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import record_calibration
from nsgap.bounds import (BoundParams, cheeger_reference, interpolation_bound, lp_gamma_bound,
                          matousek_bound, ozawa_bound, refined_markov_bound, smoothness_interp_bound,
                          tabulated)
from nsgap.errors import ValidationError
from nsgap.gamma import gamma_exact
from nsgap.mazur import MazurModuli
from nsgap.metric import hamming_cube, path_metric
from nsgap.rng import cell_rng
from nsgap.spectral import random_stochastic, stochastic_matrix

SWAP = stochastic_matrix([[0, 1], [1, 0]])


def test_cheeger_examples():
    assert cheeger_reference(SWAP).value == pytest.approx(1 / math.sqrt(2))
    assert cheeger_reference(0.0).value == 1.0
    assert cheeger_reference(hamming_cube(3)[2]).value == pytest.approx(math.sqrt(1.5))
    assert cheeger_reference(1.0).is_infinite
    assert cheeger_reference(0.0).certified is False


def test_matousek_examples():
    assert matousek_bound(0.0, 2).value == 4
    assert matousek_bound(0.5, 4).value == pytest.approx(1024)
    assert matousek_bound(1.0, 3).to_dict()["value"] == "inf"
    with pytest.raises(ValidationError):
        matousek_bound(0.0, 1.5)


def test_lp_gamma_examples():
    assert lp_gamma_bound(0.0, 2, lam_abs=0.0).value == 2
    assert lp_gamma_bound(0.5, 4, lam_abs=1.0).value == pytest.approx(32)
    rep = lp_gamma_bound(0.3, 2, lam_abs=0.3)
    assert rep.value == pytest.approx(2 / 0.7)


def test_ozawa_examples():
    # alpha(t) = t/3, beta(t) = 2 sqrt(t): the outer q-th power makes the tail 8^2 * 192^4
    rep = ozawa_bound(1.0, 2.0, lambda t: t / 3, lambda s: (s / 2) ** 2)
    assert rep.value == pytest.approx(512 + 64 * 192.0**4)
    assert ozawa_bound(1.0, 1.0, lambda t: t, lambda s: s).value == pytest.approx(320)
    assert ozawa_bound(math.inf, 2.0, lambda t: t, lambda s: s).is_infinite


def test_ozawa_with_mazur_moduli_and_tables():
    mod = MazurModuli(4.0, 2.0)
    a = ozawa_bound(2.0, 2.0, lambda t: float(mod.alpha_lower(t)), lambda s: float(mod.beta_inverse(s)))
    xs = np.linspace(0, 1, 4001)
    b = ozawa_bound(2.0, 2.0, tabulated(xs, mod.alpha_lower(xs)), tabulated(xs, mod.beta_inverse(xs)))
    assert b.value == pytest.approx(a.value, rel=1e-3)


def test_ozawa_monotone_in_gamma_y():
    r = cell_rng(11)
    for _ in range(1000):
        q = 1 + r.random() * 3
        c1, c2 = 0.1 + r.random(), 0.1 + r.random()
        e = 1 + r.random() * 2
        g1 = 1 + r.random() * 100
        g2 = g1 + r.random() * 100
        f = lambda g: ozawa_bound(g, q, lambda t: c1 * t, lambda s: c2 * s**e).value
        assert f(g1) <= f(g2)


def test_interpolation_examples():
    p = BoundParams(theta=0.5)
    rep = interpolation_bound(1.0, 1.0, p, 2, 2, 2)
    assert rep.inputs["s"] == pytest.approx(2)
    assert rep.value == pytest.approx(486)
    only_x = interpolation_bound(3.0, 1.0, BoundParams(theta=1.0), 2, 2, 2)
    assert only_x.inputs["branch"] == "X"
    assert interpolation_bound(math.inf, 1.0, p, 2, 2, 2).inputs["branch"] == "Y"


def test_refined_markov_examples():
    assert refined_markov_bound(1.0, 3, 7, universal_c=2).value == 2 * 3 * 7
    assert refined_markov_bound(0.0, 2, 5).value == pytest.approx(2)
    for lam in (0.0, 0.4, 0.9):
        assert refined_markov_bound(lam, 5, 1, universal_c=1.5).value == pytest.approx(7.5)
    # (2/p)(1 - lambda_2) > 1 clamps the base at zero
    assert refined_markov_bound(-1.0, 2, 9).inputs["base"] == 0.0


def test_smoothness_interp_examples():
    p = BoundParams(theta=1.0, q=2.0)
    assert smoothness_interp_bound(0.5, p, lam_abs=0.5).value == pytest.approx(2)
    rep = smoothness_interp_bound(0.0, BoundParams(theta=1.0, q=2.0, smoothness_const=3.0), lam_abs=0.9)
    assert rep.inputs["lambda2Form"] == pytest.approx(9)
    # theta = 2/p with S = sqrt(p - 1) has the shape (p - 1)/(1 - lambda^{2/p})
    pp = 6.0
    rep = smoothness_interp_bound(0.2, BoundParams(theta=2 / pp, q=2.0, smoothness_const=math.sqrt(pp - 1)),
                                  lam_abs=0.2)
    assert rep.inputs["absoluteForm"] == pytest.approx((pp - 1) / (1 - 0.2 ** (2 / pp)))


def test_params_validation():
    for bad in ({"p": 0.5}, {"q": 2.5}, {"theta": 1.5}, {"smoothness_const": 0.5}, {"universal_c": 0}):
        with pytest.raises(ValidationError):
            BoundParams(**bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 0.999), st.floats(0.1, 10))
def test_closed_form_identities(lam2, c):
    assert refined_markov_bound(1.0, 4, 3, universal_c=c).value == c * 4 * 3
    assert matousek_bound(lam2, 2, universal_c=c).value == pytest.approx((2 * c) ** 2 / (1 - lam2), rel=1e-12)


def test_line_subsets_respect_lp_bound_with_c4():
    """gamma over finite subsets of the line stays below the p = 2 bound with C = 4."""
    r = cell_rng(12)
    worst = 0.0
    for _ in range(200):
        a = random_stochastic(int(r.integers(2, 5)), r)
        x = path_metric(np.sort(r.normal(size=int(r.integers(2, 4)))))
        g = gamma_exact(a, x, 2).value
        b = lp_gamma_bound(a, 2, universal_c=4.0).value
        assert g <= b
        if math.isfinite(b):
            worst = max(worst, g / b)
    record_calibration("lp_gamma_line_subsets", {"universalC": 4.0, "worstRatio": worst})
