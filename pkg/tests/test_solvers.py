"""Relaxation sweeps, conjugate gradients, and the pivot-free LU."""

import numpy as np
import pytest
import scipy.linalg

from mtfade import SymToeplitz, cf_jacobi_sweep, cg_solve, dense_solve, jacobi_sweep
from mtfade.solvers import lu_nopivot, lu_solve_nopivot


def spd_toeplitz(m, seed=0):
    rng = np.random.default_rng(seed)
    t = -np.abs(rng.standard_normal(m))
    t[0] = 2.0 * np.abs(t[1:]).sum() + 1.0
    return SymToeplitz(t)


class TestJacobi:
    def test_sweep_matches_formula(self):
        T = spd_toeplitz(20, seed=1)
        rng = np.random.default_rng(2)
        x = rng.standard_normal(20)
        b = rng.standard_normal(20)
        got = jacobi_sweep(T, x, b, omega=0.7)
        want = x + 0.7 / T.symbol[0] * (b - T.to_dense() @ x)
        assert np.allclose(got, want, rtol=1e-14)

    def test_damped_sweep_reduces_energy(self):
        T = spd_toeplitz(64, seed=3)
        rng = np.random.default_rng(4)
        e = rng.standard_normal(64)
        b = np.zeros(64)
        before = e @ T.matvec(e)
        for _ in range(3):
            e = jacobi_sweep(T, e, b, omega=0.5)
        after = e @ T.matvec(e)
        assert after < before

    def test_rejects_nonpositive_diagonal(self):
        T = SymToeplitz(np.array([-1.0, 0.2, 0.1, 0.0]))
        with pytest.raises(ValueError):
            jacobi_sweep(T, np.zeros(4), np.ones(4))


class TestCfJacobi:
    def test_matches_dense_reference(self):
        T = spd_toeplitz(30, seed=5)
        dense = T.to_dense()
        d = T.symbol[0]
        rng = np.random.default_rng(6)
        x = rng.standard_normal(30)
        b = rng.standard_normal(30)
        got = cf_jacobi_sweep(T, x, b, omega=1.0, order="FCF")
        want = x.copy()
        for grp in "FCF":
            r = b - dense @ want
            s = slice(0, None, 2) if grp == "F" else slice(1, None, 2)
            want[s] += r[s] / d
        assert np.allclose(got, want, rtol=1e-13)

    def test_input_left_untouched(self):
        T = spd_toeplitz(10, seed=7)
        x = np.ones(10)
        cf_jacobi_sweep(T, x, np.zeros(10))
        assert np.array_equal(x, np.ones(10))

    def test_rejects_bad_order(self):
        T = spd_toeplitz(10, seed=8)
        with pytest.raises(ValueError):
            cf_jacobi_sweep(T, np.zeros(10), np.ones(10), order="")
        with pytest.raises(ValueError):
            cf_jacobi_sweep(T, np.zeros(10), np.ones(10), order="FXF")


class TestCg:
    def test_solves_to_tolerance(self):
        T = spd_toeplitz(200, seed=9)
        rng = np.random.default_rng(10)
        b = rng.standard_normal(200)
        x, rep = cg_solve(T, b, tol=1e-12)
        assert rep.converged
        assert np.linalg.norm(b - T.matvec(x)) <= 1e-11 * np.linalg.norm(b)
        want = scipy.linalg.solve(T.to_dense(), b)
        assert np.allclose(x, want, rtol=1e-8)

    def test_zero_rhs_short_circuits(self):
        T = spd_toeplitz(16, seed=11)
        x, rep = cg_solve(T, np.zeros(16))
        assert rep.iterations == 0 and rep.converged
        assert np.array_equal(x, np.zeros(16))

    def test_warm_start_helps(self):
        T = spd_toeplitz(128, seed=12)
        b = np.sin(np.arange(128))
        x, rep_cold = cg_solve(T, b, tol=1e-12)
        _, rep_warm = cg_solve(T, b, tol=1e-12, x0=x)
        assert rep_warm.iterations <= 1

    def test_maxit_reported_honestly(self):
        T = spd_toeplitz(128, seed=13)
        b = np.ones(128)
        _, rep = cg_solve(T, b, tol=1e-15, maxit=1)
        assert not rep.converged and rep.iterations == 1
        with pytest.raises(ValueError):
            cg_solve(T, b, tol=0.0)


class TestLu:
    def test_roundtrip_matches_scipy(self):
        A = spd_toeplitz(12, seed=14).to_dense()
        b = np.arange(12.0)
        assert np.allclose(dense_solve(A, b), scipy.linalg.solve(A, b),
                           rtol=1e-10)

    def test_factor_reuse(self):
        A = spd_toeplitz(9, seed=15).to_dense()
        lu = lu_nopivot(A)
        for seed in (16, 17):
            b = np.random.default_rng(seed).standard_normal(9)
            assert np.allclose(A @ lu_solve_nopivot(lu, b), b, rtol=1e-10)

    def test_zero_pivot_raises(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0]])  # singular, pivot cancels
        with pytest.raises(ZeroDivisionError):
            lu_nopivot(A)
