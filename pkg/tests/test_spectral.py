import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsgap.errors import ValidationError
from nsgap.metric import hamming_cube
from nsgap.rng import cell_rng
from nsgap.spectral import (anti_diagonal, eigen_decompose, jacobi_eigh, lazy, load_matrix,
                            matrix_power, random_stochastic, stochastic_matrix)

SWAP = [[0.0, 1.0], [1.0, 0.0]]


def h2():
    return hamming_cube(2)[2]


def test_swap_spectrum():
    s = eigen_decompose(SWAP)
    assert s.eigenvalues.tolist() == pytest.approx([1.0, -1.0], abs=1e-12)
    assert s.lambda2 == pytest.approx(-1.0)
    assert s.lambda_abs == pytest.approx(1.0)


def test_identity_spectrum():
    s = eigen_decompose(np.eye(3))
    assert s.eigenvalues.tolist() == pytest.approx([1, 1, 1])
    assert s.lambda2 == pytest.approx(1.0)


def test_h2_lambda2_is_zero():
    assert h2().lambda2 == pytest.approx(0.0, abs=1e-12)


def test_lazy_examples():
    assert lazy(stochastic_matrix(SWAP)).entries.tolist() == [[0.5, 0.5], [0.5, 0.5]]
    assert np.array_equal(lazy(stochastic_matrix(np.eye(3))).entries, np.eye(3))
    w = eigen_decompose(lazy(h2())).eigenvalues
    assert w.tolist() == pytest.approx([1, 0.5, 0.5, 0], abs=1e-12)


def test_matrix_power_examples():
    swap = stochastic_matrix(SWAP)
    assert np.array_equal(matrix_power(swap, 2).entries, np.eye(2))
    a = random_stochastic(5, cell_rng(1))
    assert np.allclose(matrix_power(a, 1).entries, a.entries)
    assert matrix_power(h2(), 2).entries[0, 0] == pytest.approx(0.5)


@pytest.mark.parametrize("bad, word", [
    ([[0.5, 0.6], [0.5, 0.4]], "symmetry"),
    ([[0.5, 0.6], [0.6, 0.5]], "row-stochastic"),
    ([[1.5, -0.5], [-0.5, 1.5]], "nonnegativity"),
    ([[1, 0, 0]], "square"),
])
def test_validation_names_invariant(bad, word):
    with pytest.raises(ValidationError, match=word):
        stochastic_matrix(bad)


def test_small_asymmetry_is_absorbed():
    a = stochastic_matrix([[0.5, 0.5 + 5e-11], [0.5 - 5e-11, 0.5]])
    assert np.array_equal(a.entries, a.entries.T)


def test_jacobi_agrees_with_lapack(rng):
    for _ in range(20):
        a = random_stochastic(int(rng.integers(2, 12)), rng).entries
        w, v = jacobi_eigh(a)
        assert np.sort(w) == pytest.approx(np.linalg.eigvalsh(a), abs=1e-12)
        assert np.allclose(a @ v, v * w, atol=1e-12)


def test_large_matrices_use_lapack_and_agree(rng):
    a = random_stochastic(80, rng)
    assert eigen_decompose(a).eigenvalues == pytest.approx(np.linalg.eigvalsh(a.entries)[::-1], abs=1e-12)


def test_load_matrix_formats(tmp_path):
    (tmp_path / "a.json").write_text(json.dumps(SWAP))
    (tmp_path / "a.txt").write_text("2\n0 1\n1 0\n")
    assert np.array_equal(load_matrix(tmp_path / "a.json").entries, load_matrix(tmp_path / "a.txt").entries)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 9), st.integers(1, 6))
def test_power_spectrum_is_spectrum_power(seed, n, m):
    a = random_stochastic(n, cell_rng(seed))
    w = eigen_decompose(a).eigenvalues
    wm = eigen_decompose(matrix_power(a, m)).eigenvalues
    assert np.sort(wm) == pytest.approx(np.sort(w**m), abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 9))
def test_summary_invariants_and_lazy_and_block(seed, n):
    a = random_stochastic(n, cell_rng(seed))
    s = eigen_decompose(a)
    assert s.eigenvalues[0] == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.abs(s.eigenvalues) <= 1 + 1e-9)
    assert np.all(np.diff(s.eigenvalues) <= 1e-15)
    if n > 1:
        assert s.lambda_abs == max(s.eigenvalues[1], -s.eigenvalues[-1])
    lz = eigen_decompose(lazy(a)).eigenvalues
    assert lz == pytest.approx((1 + s.eigenvalues) / 2, abs=1e-9)
    assert np.all(lz >= -1e-9)
    blk = eigen_decompose(anti_diagonal(a)).eigenvalues
    assert np.sort(blk) == pytest.approx(np.sort(np.concatenate([s.eigenvalues, -s.eigenvalues])), abs=1e-8)
