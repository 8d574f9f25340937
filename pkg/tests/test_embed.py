import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog as scipy_linprog

from nsgap.embed import (bourgain_matousek_embed, ckr_partition, duality_certificate, jl_reduce, line_embed,
                         spread_sdp, zero_set_from_partition)
from nsgap.embed.duality import duality_threshold
from nsgap.embed.jl import jl_dimension
from nsgap.embed.line import si_floor
from nsgap.embed.partition import padding_frequency, zero_set_statistics
from nsgap.embed.simplex import linprog
from nsgap.embed.witness import average_distortion, lipschitz_constant
from nsgap.errors import ValidationError
from nsgap.gamma import gamma_exact
from nsgap.graphs import random_regular
from nsgap.metric import (FiniteMetric, cycle_edges, graph_metric, grid_edges, lp_metric, path_metric,
                          point_cloud, random_metric)
from nsgap.rng import cell_rng
from nsgap.spectral import random_stochastic

C4 = graph_metric(4, cycle_edges(4))
P3 = path_metric([0, 1, 2])
TWO = path_metric([0, 1])


# ------------------------------------------------------------------ partitions

def test_partition_trivial_cases():
    one = FiniteMetric(np.zeros((1, 1)))
    assert ckr_partition(one, 1.0, 0).clusters == [(0,)]
    far = path_metric([0, 10])
    for seed in range(20):
        assert len(ckr_partition(far, 1.0, seed).clusters) == 2


def test_partition_cluster_diameter(rng):
    for _ in range(50):
        x = random_metric(int(rng.integers(2, 20)), rng)
        delta = float(x.diameter() * rng.uniform(0.05, 1.5))
        assert ckr_partition(x, delta, rng).max_cluster_diameter(x) <= delta


def test_grid_padding_probability():
    grid = graph_metric(16, grid_edges(4, 4))
    freq = padding_frequency(grid, 2.0, 2.0 / 8, 1000, cell_rng(7))
    assert freq.min() > 0.3


def test_zero_set_coin_flips():
    one_cluster = ckr_partition(path_metric([0, 0.1]), 10.0, 0)
    sizes = [zero_set_from_partition(one_cluster, cell_rng(1, s)).members.size for s in range(400)]
    assert set(sizes) == {0, 2}
    assert 0.4 < np.mean(np.array(sizes) == 2) < 0.6
    far = ckr_partition(path_metric([0, 100]), 1.0, 0)
    seen = {tuple(zero_set_from_partition(far, cell_rng(2, s)).members) for s in range(200)}
    assert seen == {(), (0,), (1,), (0, 1)}


def test_zero_set_statistics_grid():
    grid = graph_metric(16, grid_edges(4, 4))
    stats = zero_set_statistics(grid, 3.0, 400, 8.0, cell_rng(3))
    assert stats["pairs"] > 0 and stats["minProbability"] > 0


# ------------------------------------------------------------------ line embedding

def test_line_embed_two_points():
    w = line_embed(TWO, 2, rng=0)
    assert w.average_distortion == pytest.approx(1.0)
    assert w.lipschitz == pytest.approx(1.0)


def test_line_embed_collinear_path():
    w = line_embed(P3, 2, rng=1)
    assert w.lipschitz <= 1 + 1e-12
    # every pair is separated, so the zero-set branch runs and finds an optimal map
    assert w.details["branch"] == "zero_set"
    assert w.average_distortion == pytest.approx(1.0)
    # the truncated map is constant here, which is why that branch is gated off
    assert si_floor(P3, 2)["lhs"] == 0.0


def test_truncated_branch_meets_floor():
    hits = 0
    for seed in range(200):
        r = cell_rng(seed)
        n = int(r.integers(8, 33))
        # a tight cluster plus one far point drives the separated-pair count to zero at p = 1
        pts = np.concatenate([r.normal(scale=1e-3, size=(n - 1, 2)), [[50.0, 0.0]]])
        x = lp_metric(point_cloud(pts))
        w = line_embed(x, 1.0, rng=r)
        if w.details["branch"] != "truncated":
            continue
        hits += 1
        assert si_floor(x, 1.0)["holdsCentre"]
    assert hits > 0


def test_line_embed_c4():
    w = line_embed(C4, 2, zero_set_trials=200, rng=cell_rng(5))
    assert w.average_distortion <= 4


def test_line_embed_rejects_degenerate():
    with pytest.raises(ValidationError):
        line_embed(FiniteMetric(np.zeros((1, 1))))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 24), st.sampled_from([1.0, 2.0, 3.0]))
def test_line_embed_lipschitz_and_nonconstant(seed, n, p):
    r = cell_rng(seed)
    x = random_metric(n, r)
    w = line_embed(x, p, zero_set_trials=16, rng=r)
    img = np.abs(w.images[:, 0][:, None] - w.images[:, 0][None, :])
    assert lipschitz_constant(x.dist, img) <= 1 + 1e-12
    assert np.ptp(w.images) > 0


# ------------------------------------------------------------------ Bourgain and JL

def test_bourgain_examples():
    assert bourgain_matousek_embed(TWO, 2, rng=0).details["distortion"] == pytest.approx(1.0)
    # C4 needs distortion sqrt(2) in l_2, so no draw can beat it; the typical draw is within 1 of it
    runs = [bourgain_matousek_embed(C4, 2, rng=cell_rng(9, s)) for s in range(30)]
    dist = [w.details["distortion"] for w in runs]
    assert min(dist) >= math.sqrt(2) - 1e-12
    assert np.median(dist) <= math.sqrt(2) + 1
    assert max(w.lipschitz for w in runs) <= 1 + 1e-12


def test_bourgain_on_regular_graphs():
    for n in (16, 64):
        g = random_regular(n, 3, cell_rng(n))
        for p in (2.0, 4.0):
            w = bourgain_matousek_embed(g.metric(), p, rng=cell_rng(n, int(p)))
            assert w.details["distortion"] <= 20 * (1 + math.log(n) / p)


def test_jl_statistics():
    n, eps = 20, 0.5
    dim = jl_dimension(n, eps)
    cloud = point_cloud(cell_rng(0).normal(size=(n, 60)))
    dists = [jl_reduce(cloud, dim, cell_rng(1, s)).details["distortion"] for s in range(100)]
    assert np.median(dists) <= 1.5


def test_jl_single_point_and_pigeonhole(rng):
    single = jl_reduce(point_cloud([[1.0, 2.0]]), 3, rng)
    assert single.average_distortion == 1.0
    for _ in range(20):
        cloud = point_cloud(rng.normal(size=(int(rng.integers(2, 15)), 5)))
        k = int(rng.integers(1, 10))
        d = jl_reduce(cloud, k, rng).details
        assert d["bestSpread"] * k >= d["totalSpread"]
    with pytest.raises(ValidationError):
        jl_reduce(point_cloud([[0.0], [1.0]], 1), 2)


# ------------------------------------------------------------------ spread SDP

def test_sdp_examples():
    gram, av = spread_sdp(P3)
    assert gram.objective == pytest.approx(12, abs=1e-3)
    assert av == pytest.approx(1.0, abs=1e-3)
    gram, av = spread_sdp(C4)
    assert gram.objective == pytest.approx(16, abs=1e-3)
    assert av == pytest.approx(math.sqrt(1.5), abs=1e-3)
    assert spread_sdp(TWO).av_estimate == pytest.approx(1.0, abs=1e-6)


def test_sdp_feasible_and_bounded(rng):
    for _ in range(10):
        x = random_metric(int(rng.integers(2, 9)), rng)
        res = spread_sdp(x)
        assert res.gram.max_violation <= 1e-9 * max(1.0, x.diameter() ** 2)
        assert res.gram.objective <= float(np.sum(x.dist**2)) * (1 + 1e-9)
        assert res.av_estimate >= 1 - 1e-6


def test_sdp_matches_cvxpy(rng):
    cp = pytest.importorskip("cvxpy")
    for _ in range(4):
        x = random_metric(int(rng.integers(3, 7)), rng)
        n = x.size
        g = cp.Variable((n, n), PSD=True)
        cons = [g[i, i] + g[j, j] - 2 * g[i, j] <= x.dist[i, j] ** 2 for i in range(n) for j in range(i + 1, n)]
        obj = sum(g[i, i] + g[j, j] - 2 * g[i, j] for i in range(n) for j in range(n))
        prob = cp.Problem(cp.Maximize(obj), cons)
        prob.solve(solver="CLARABEL")
        assert spread_sdp(x).gram.objective == pytest.approx(prob.value, rel=1e-3)


def test_sdp_euclidean_clouds(rng):
    for _ in range(5):
        cloud = point_cloud(rng.normal(size=(int(rng.integers(2, 11)), 3)))
        assert spread_sdp(lp_metric(cloud)).av_estimate == pytest.approx(1.0, abs=1e-3)


# ------------------------------------------------------------------ simplex

def test_simplex_against_scipy(rng):
    for _ in range(300):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 8))
        c = rng.normal(size=n)
        a_ub = rng.normal(size=(m, n))
        b_ub = rng.normal(size=m) + 0.5
        use_eq = rng.random() < 0.5
        a_eq = rng.normal(size=(1, n)) if use_eq else None
        b_eq = [float(rng.normal())] if use_eq else None
        mine = linprog(c, a_ub, b_ub, a_eq, b_eq)
        ref = scipy_linprog(c, a_ub, b_ub, a_eq, b_eq, bounds=(0, None), method="highs")
        if ref.status == 0:
            assert mine.status == "optimal"
            assert mine.fun == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
            assert np.all(a_ub @ mine.x <= b_ub + 1e-8)
            continue
        # HiGHS may label an unbounded model infeasible; decide with a zero objective
        feas = scipy_linprog(np.zeros(n), a_ub, b_ub, a_eq, b_eq, bounds=(0, None), method="highs")
        expected = "unbounded" if feas.status == 0 else "infeasible"
        assert mine.status == expected


def test_simplex_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [-0.75, 150, -0.02, 6]
    a = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = linprog(c, a, [0, 0, 1])
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-0.05)


# ------------------------------------------------------------------ duality

def test_duality_identity_instances():
    cert = duality_certificate(TWO, TWO, 1.0, 1.0)
    assert cert.feasible and cert.verified
    assert [0, 1] in cert.configs.tolist() or [1, 0] in cert.configs.tolist()
    eps = 1e-3
    same = duality_certificate(C4, C4, 2.0, 1 + eps)
    assert same.feasible and same.verified
    rows = same.configs.tolist()
    assert any(len(set(r)) == 4 for r in rows)


def test_duality_separating_branch():
    lo = duality_threshold(C4, P3, 2.0)["lower"]
    assert lo > 1.4
    cert = duality_certificate(C4, P3, 2.0, 1.2)
    assert not cert.feasible and cert.verified
    gx = gamma_exact(cert.matrix, C4, 2.0).value
    gy = gamma_exact(cert.matrix, P3, 2.0).value
    assert gx > 1.2 * gy


def test_duality_l1_example_is_feasible_at_one():
    # C4 is the 2-cube, which embeds isometrically into l_1 of the 3-point path
    assert duality_threshold(C4, P3, 1.0) == {"lower": 1.0, "upper": 1.0}
    assert duality_certificate(C4, P3, 1.0, 1.0).feasible


def test_duality_validation():
    with pytest.raises(ValidationError):
        duality_certificate(C4, P3, 2.0, 0.5)
    with pytest.raises(ValidationError):
        duality_certificate(FiniteMetric(np.zeros((1, 1))), P3, 2.0, 1.0)


def test_average_distortion_helper():
    src = TWO.dist
    assert average_distortion(src, 3 * src, 2.0) == pytest.approx(1.0)
    assert lipschitz_constant(np.zeros((2, 2)), src) == math.inf
