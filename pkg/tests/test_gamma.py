import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from nsgap.errors import BudgetExceeded, DegenerateConfiguration, ValidationError
from nsgap.gamma import (cut_bound, gamma_exact, gamma_plus_exact, gamma_real_line, gamma_sampled,
                         poincare_ratio, real_poincare_ratio)
from nsgap.metric import FiniteMetric, cycle_edges, graph_metric, hamming_cube, power_kernel, random_metric
from nsgap.rng import cell_rng
from nsgap.spectral import anti_diagonal, lazy, random_stochastic, stochastic_matrix, uniform_matrix

SWAP = stochastic_matrix([[0, 1], [1, 0]])
TWO = FiniteMetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
HALF = uniform_matrix(2)


def test_swap_ratio_example():
    assert poincare_ratio(SWAP, power_kernel(TWO, 1).values, (0, 1)) == pytest.approx(0.5)


def test_constant_configuration_is_degenerate():
    with pytest.raises(DegenerateConfiguration):
        poincare_ratio(SWAP, TWO.dist, (1, 1))


def test_zero_denominator_is_infinite():
    assert poincare_ratio(stochastic_matrix(np.eye(2)), TWO.dist, (0, 1)) == math.inf


def test_h2_sign_pattern_matches_real_gap():
    _, _, h2 = hamming_cube(2)
    v = gamma_real_line(h2).witness
    signs = tuple(int(c > 0) for c in v)
    assert poincare_ratio(h2, power_kernel(TWO, 2).values, signs) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3.5])
def test_gamma_exact_swap(p):
    est = gamma_exact(SWAP, TWO, p)
    assert est.value == pytest.approx(0.5)
    assert est.witness == (0, 1)


def test_identity_is_not_ergodic():
    eye = stochastic_matrix(np.eye(2))
    assert gamma_exact(eye, TWO, 2).is_infinite
    assert gamma_plus_exact(eye, TWO, 2).is_infinite
    assert gamma_exact(eye, TWO, 2).to_dict()["value"] == "inf"


def test_uniform_two_by_two():
    # enumeration oracle: (0,1) gives (2/4)/((1/2)*1) = 1
    assert gamma_exact(HALF, TWO, 1).value == pytest.approx(oracles.gamma(HALF.entries.tolist(), TWO.dist.tolist(), 1))
    assert gamma_exact(HALF, TWO, 1).value == pytest.approx(1.0)


def test_gamma_plus_examples():
    est = gamma_plus_exact(SWAP, TWO, 1)
    assert est.value == pytest.approx(oracles.gamma_plus(SWAP.entries.tolist(), TWO.dist.tolist(), 1))
    assert est.value >= 1
    u = gamma_plus_exact(HALF, TWO, 2)
    assert u.value == pytest.approx(1.0)
    # the value is attained at constant x against a different constant y
    assert poincare_ratio(HALF, power_kernel(TWO, 2).values, (0, 0), (1, 1)) == pytest.approx(1.0)


def test_budget():
    a = random_stochastic(6, cell_rng(0))
    x = random_metric(5, cell_rng(1))
    with pytest.raises(BudgetExceeded, match="gamma_sampled"):
        gamma_exact(a, x, 2, budget=1000)


def test_sampled_guard_and_convergence():
    with pytest.raises(ValidationError):
        gamma_sampled(SWAP, TWO, 1, trials=0)
    assert gamma_sampled(SWAP, TWO, 1, trials=10, rng=cell_rng(2)).value == pytest.approx(0.5)


def test_sampled_never_exceeds_exact(rng):
    for _ in range(100):
        a = random_stochastic(int(rng.integers(2, 5)), rng)
        x = random_metric(int(rng.integers(2, 4)), rng)
        p = float(rng.choice([1, 2]))
        ex = gamma_exact(a, x, p).value
        sm = gamma_sampled(a, x, p, trials=3, rng=rng).value
        assert sm <= ex * (1 + 1e-12)


def test_cut_bound_examples():
    assert cut_bound(SWAP) == pytest.approx(0.5)
    assert cut_bound(HALF) == pytest.approx(1.0)
    assert cut_bound(stochastic_matrix(np.eye(3))) == math.inf


def test_c4_gamma():
    c4 = graph_metric(4, cycle_edges(4))
    walk = stochastic_matrix(np.array([[0, .5, 0, .5], [.5, 0, .5, 0], [0, .5, 0, .5], [.5, 0, .5, 0]]))
    assert gamma_exact(walk, c4, 2).value == pytest.approx(oracles.gamma(walk.entries.tolist(), c4.dist.tolist(), 2))
    assert cut_bound(walk) == pytest.approx(oracles.cut(walk.entries.tolist()))


def test_cut_sweep_is_a_lower_bound(rng):
    for _ in range(5):
        a = random_stochastic(14, rng)
        sweep = cut_bound(a, exact_max_n=0)
        assert 0 < sweep <= cut_bound(a) * (1 + 1e-12)
    assert math.isfinite(cut_bound(random_stochastic(40, rng, "weights")))


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(2, 3), st.sampled_from([1.0, 2.0]))
def test_exact_matches_naive_oracle(seed, n, size, p):
    r = cell_rng(seed)
    a = random_stochastic(n, r)
    x = random_metric(size, r)
    assert gamma_exact(a, x, p).value == pytest.approx(oracles.gamma(a.entries.tolist(), x.dist.tolist(), p), rel=1e-12)
    if n <= 3:
        assert gamma_plus_exact(a, x, p).value == pytest.approx(
            oracles.gamma_plus(a.entries.tolist(), x.dist.tolist(), p), rel=1e-12)


def _plus_witness(a, x, p):
    est = gamma_plus_exact(a, x, p)
    return est.witness, est.witness2


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(2, 3), st.sampled_from([1.0, 2.0]))
def test_structural_inequalities(seed, n, size, p):
    r = cell_rng(seed)
    a = oracles.dyadic(random_stochastic(n, r))
    x = random_metric(size, r)
    g = gamma_exact(a, x, p).value
    gp = gamma_plus_exact(a, x, p).value
    assert oracles.certifies_at_least(a, x, p, gamma_exact(a, x, p).witness, None, Fraction(n - 1, n))
    assert oracles.certifies_at_least(a, x, p, *_plus_witness(a, x, p), 1)
    assert gp >= g * (1 - 1e-12)
    assert cut_bound(a) <= g * (1 + 1e-12)
    if size == 2:
        assert cut_bound(a) == pytest.approx(g, rel=1e-12) or math.isinf(g)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 8))
def test_real_line_eigenvector(seed, n):
    a = random_stochastic(n, cell_rng(seed))
    est = gamma_real_line(a)
    if est.is_infinite:
        return
    assert real_poincare_ratio(a, est.witness, 2) == pytest.approx(est.value, rel=1e-9)
