import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkaczmarz.numerics import (InvalidArgumentError, ls_solve, regularized_solve,
                                rng_stream, sample_complex_gaussian)


def test_zero_variance_gives_zero_vector(rng):
    z = sample_complex_gaussian(4, 0.0, rng)
    assert z.shape == (4,)
    assert np.all(z == 0)


def test_unit_variance_power():
    z = sample_complex_gaussian(100_000, 1.0, rng_stream(1))
    assert 0.99 <= np.mean(np.abs(z) ** 2) <= 1.01


def test_mean_near_zero():
    z = sample_complex_gaussian(100_000, 2.0, rng_stream(2))
    assert abs(z.mean().real) < 0.02
    assert abs(z.mean().imag) < 0.02


def test_real_and_imag_parts_split_variance():
    z = sample_complex_gaussian(200_000, 2.0, rng_stream(3))
    assert np.var(z.real) == pytest.approx(1.0, abs=0.02)
    assert np.var(z.imag) == pytest.approx(1.0, abs=0.02)


def test_negative_variance_rejected(rng):
    with pytest.raises(InvalidArgumentError):
        sample_complex_gaussian(3, -1.0, rng)


def test_streams_reproducible_and_distinct():
    a = sample_complex_gaussian(16, 1.0, rng_stream(7, 3))
    b = sample_complex_gaussian(16, 1.0, rng_stream(7, 3))
    c = sample_complex_gaussian(16, 1.0, rng_stream(7, 4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_independent_streams_uncorrelated():
    a = np.concatenate([sample_complex_gaussian(50, 1.0, rng_stream(9, i)) for i in range(200)])
    b = np.concatenate([sample_complex_gaussian(50, 1.0, rng_stream(9, i + 200)) for i in range(200)])
    # 10^4 samples: standard error of the correlation is 0.01
    assert abs(np.vdot(a, b) / len(a)) < 0.04


class TestLsSolve:
    def test_identity(self):
        b = np.array([1, 2j, -1])
        np.testing.assert_allclose(ls_solve(np.eye(3), b), b)

    def test_overdetermined_column(self):
        # normal equations: (A^H A)^-1 A^H b = 4 / 2
        np.testing.assert_allclose(ls_solve([[1], [1]], [1, 3]), [2.0])

    def test_rank_one_minimum_norm(self):
        np.testing.assert_allclose(ls_solve([[1, 1], [1, 1]], [2, 2]), [1.0, 1.0], atol=1e-12)

    def test_rank_deficient_matches_lstsq(self, rng):
        A = sample_complex_gaussian((12, 3), 1.0, rng) @ sample_complex_gaussian((3, 6), 1.0, rng)
        b = sample_complex_gaussian(12, 1.0, rng)
        ref = np.linalg.lstsq(A, b, rcond=None)[0]
        np.testing.assert_allclose(ls_solve(A, b), ref, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            ls_solve(np.eye(3), np.ones(2))

    def test_batched(self, rng):
        A = sample_complex_gaussian((5, 8, 3), 1.0, rng)
        b = sample_complex_gaussian((5, 8), 1.0, rng)
        batched = ls_solve(A, b)
        for i in range(5):
            np.testing.assert_allclose(batched[i], ls_solve(A[i], b[i]), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(1, 12), extra=st.integers(0, 10))
def test_ls_solve_recovers_exact_solution(seed, rows, extra):
    rng = rng_stream(seed)
    cols = rows
    A = sample_complex_gaussian((rows + extra, cols), 1.0, rng)
    x0 = sample_complex_gaussian(cols, 1.0, rng)
    x = ls_solve(A, A @ x0)
    s = np.linalg.svd(A, compute_uv=False)
    # conditioning-aware bound; random Gaussian matrices are well conditioned w.h.p.
    tol = 1e-10 * max(1.0, s[0] / s[-1])
    assert np.linalg.norm(x - x0) <= tol * np.linalg.norm(x0)


class TestRegularizedSolve:
    def test_identity(self):
        np.testing.assert_allclose(regularized_solve(np.eye(2), [1, 1], 1.0), [0.5, 0.5])

    def test_small_xi_recovers_ls(self):
        assert abs(regularized_solve([[2.0]], [4.0], 1e-4)[0] - 2.0) < 1e-3

    def test_wide_matrix(self):
        # A^H (A A^H + xi)^-1 b = (1, 1) * 2 / 4
        np.testing.assert_allclose(regularized_solve([[1, 1]], [2], 2.0), [0.5, 0.5])

    def test_rejects_nonpositive_xi(self):
        with pytest.raises(InvalidArgumentError):
            regularized_solve(np.eye(2), [1, 1], 0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            regularized_solve(np.eye(2), [1, 1, 1], 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(1, 10), K=st.integers(1, 10),
       xi=st.floats(0.01, 10.0))
def test_regularized_equals_augmented_minimum_norm(seed, M, K, xi):
    rng = rng_stream(seed)
    A = sample_complex_gaussian((M, K), 1.0, rng)
    b = sample_complex_gaussian(M, 1.0, rng)
    x = regularized_solve(A, b, xi)
    z = ls_solve(np.hstack([A, np.sqrt(xi) * np.eye(M)]), b)
    np.testing.assert_allclose(x, z[:K], rtol=1e-9, atol=1e-9 * np.linalg.norm(x))
    normal = np.linalg.solve(A.conj().T @ A + xi * np.eye(K), A.conj().T @ b)
    np.testing.assert_allclose(x, normal, rtol=1e-8, atol=1e-9)
