import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamunfold.linalg import (
    DimensionMismatch,
    NotHermitian,
    NotPositiveDefinite,
    frobenius_norm_sq,
    frobenius_stepsize,
    hermitian_inverse,
    largest_eigenvalue,
    logdet_hermitian_pd,
)

from conftest import random_hermitian_psd


class TestHermitianInverse:
    def test_identity(self):
        eye = np.eye(3, dtype=complex)
        assert np.allclose(hermitian_inverse(eye), eye, atol=1e-12)

    def test_diagonal(self):
        a = np.diag([2.0, 4.0]).astype(complex)
        assert np.allclose(hermitian_inverse(a), np.diag([0.5, 0.25]), atol=1e-14)

    def test_analytic_2x2(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
        expect = np.array([[2 / 3, -1 / 3], [-1 / 3, 2 / 3]])
        assert np.allclose(hermitian_inverse(a), expect, atol=1e-12)

    def test_inverse_residual(self, rng):
        for n in (2, 5, 9):
            a = random_hermitian_psd(rng, n) + 0.1 * np.eye(n)
            b = hermitian_inverse(a)
            assert np.max(np.abs(a @ b - np.eye(n))) <= 1e-8

    def test_involution(self, rng):
        a = random_hermitian_psd(rng, 6) + 0.5 * np.eye(6)
        back = hermitian_inverse(hermitian_inverse(a))
        assert np.max(np.abs(back - a)) <= 1e-6 * np.max(np.abs(a))

    def test_rejects_non_hermitian(self):
        a = np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex)
        with pytest.raises(NotHermitian):
            hermitian_inverse(a)

    def test_rejects_indefinite(self):
        a = np.diag([1.0, -1.0]).astype(complex)
        with pytest.raises(NotPositiveDefinite):
            hermitian_inverse(a)


class TestLogdet:
    def test_identity(self):
        assert logdet_hermitian_pd(np.eye(4, dtype=complex)) == pytest.approx(0.0)

    def test_diagonal_analytic(self):
        a = np.diag([np.e, np.e ** 2]).astype(complex)
        assert logdet_hermitian_pd(a) == pytest.approx(3.0, abs=1e-12)

    def test_2x2(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
        assert logdet_hermitian_pd(a) == pytest.approx(np.log(3.0), abs=1e-12)

    def test_logdet_of_inverse_cancels(self, rng):
        a = random_hermitian_psd(rng, 7) + 0.2 * np.eye(7)
        total = logdet_hermitian_pd(a) + logdet_hermitian_pd(hermitian_inverse(a))
        assert abs(total) <= 1e-8

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            logdet_hermitian_pd(np.diag([2.0, 0.0]).astype(complex))


class TestFrobeniusNormSq:
    def test_zero(self):
        assert frobenius_norm_sq(np.zeros((2, 2), dtype=complex)) == 0.0

    def test_identity(self):
        assert frobenius_norm_sq(np.eye(3, dtype=complex)) == 3.0

    def test_complex_entries(self):
        a = np.array([[1 + 1j, 0.0], [0.0, 2.0]])
        assert frobenius_norm_sq(a) == pytest.approx(6.0)


class TestLargestEigenvalue:
    def test_identity(self):
        assert largest_eigenvalue(np.eye(5, dtype=complex)) == pytest.approx(1.0, rel=1e-7)

    def test_analytic_2x2(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
        assert largest_eigenvalue(a) == pytest.approx(3.0, rel=1e-7)

    def test_allones_start_on_minor_eigenvector(self):
        # the all-ones start vector is exactly the lambda=1 eigenvector here;
        # the seeded probe must still find lambda=3
        a = np.array([[2.0, -1.0], [-1.0, 2.0]], dtype=complex)
        assert largest_eigenvalue(a) == pytest.approx(3.0, rel=1e-7)

    def test_against_dense_eigensolver(self):
        rng = np.random.default_rng(88)
        g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        a = g @ g.conj().T
        oracle = float(np.linalg.eigvalsh(a)[-1])
        lam = largest_eigenvalue(a, tol=1e-9)
        assert abs(lam - oracle) <= 1e-8 * oracle

    def test_scaling_homogeneity(self, rng):
        a = random_hermitian_psd(rng, 6)
        lam = largest_eigenvalue(a)
        assert largest_eigenvalue(3.5 * a) == pytest.approx(3.5 * lam, rel=1e-7)

    def test_zero_matrix(self):
        assert largest_eigenvalue(np.zeros((3, 3), dtype=complex)) == 0.0

    def test_rejects_rectangular(self):
        with pytest.raises(DimensionMismatch):
            largest_eigenvalue(np.ones((2, 3), dtype=complex))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            largest_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))

    def test_info_flag(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
        lam, info = largest_eigenvalue(a, return_info=True)
        assert info.converged
        assert lam == pytest.approx(3.0, rel=1e-7)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 16))
    def test_rayleigh_quotient_dominance(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_hermitian_psd(rng, n)
        lam = largest_eigenvalue(a, tol=1e-9)
        for _ in range(10):
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            quot = float(np.real(v.conj() @ a @ v) / np.real(v.conj() @ v))
            assert quot <= lam * (1 + 1e-9) + 1e-12

    def test_returned_value_upper_bounds_spectrum(self, rng):
        # the inflated return value must not undershoot the true maximum
        for _ in range(20):
            a = random_hermitian_psd(rng, 10)
            lam = largest_eigenvalue(a, tol=1e-9)
            assert lam >= float(np.linalg.eigvalsh(a)[-1]) * (1 - 1e-12)


def test_frobenius_stepsize_dominates_eigenvalue(rng):
    for _ in range(10):
        a = random_hermitian_psd(rng, 8)
        assert frobenius_stepsize(a) >= largest_eigenvalue(a) * (1 - 1e-9)
