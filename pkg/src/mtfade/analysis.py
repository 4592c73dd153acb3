"""Executable matrix theory: sign patterns, M-matrix predicates,
sufficient-condition classes, extremal eigenvalues, and contraction
measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

from .amg import TwoLevelV01
from .assembly import step_matrix
from .problem import Mesh, ProblemSpec
from .solvers import cg_solve
from .toeplitz import SymToeplitz

DEFAULT_SEED = 0x5EED

# Dense symmetric eigensolves stay exact and fast up to this size.
EIG_DENSE_CAP = 4096


@dataclass
class MatrixReport:
    diag_positive: bool
    offdiag_pattern: str  # "all-negative" | "first-offdiag-nonnegative"
    diagonally_dominant: bool
    m_matrix: bool
    row_sums_positive: bool
    row_sum_bounds_hold: Optional[bool] = None


@dataclass
class SpectrumReport:
    lambda_min: float
    lambda_max: float
    kappa: float
    method: str
    residual_tol_achieved: float


def _offdiag_first_root(beta):
    return 3.0 ** (3.0 - 2.0 * beta) - 2.0 ** (5.0 - 2.0 * beta) + 7.0


_BETA0_CACHE: list = []


def beta0() -> float:
    """Unique root of 3^(3-2b) - 2^(5-2b) + 7 = 0 in (0, 1/2); cached.

    This is the threshold below which the first off-diagonal of the
    advection stiffness matrix turns nonnegative.
    """
    if not _BETA0_CACHE:
        _BETA0_CACHE.append(brentq(_offdiag_first_root, 1e-12, 0.5 - 1e-12,
                                   xtol=1e-14, rtol=8.9e-16))
    return _BETA0_CACHE[0]


def classify(T: SymToeplitz, mu: Optional[float] = None,
             h: Optional[float] = None) -> MatrixReport:
    """Check the sign-pattern, dominance and M-matrix predicates.

    When the fractional order mu and mesh size h are supplied and
    h <= 1/7, the closed-form row-sum lower bounds are verified too.
    """
    t = T.symbol
    diag_positive = bool(t[0] > 0)
    if np.all(t[1:] < 0):
        pattern = "all-negative"
    elif t[1] >= 0 and np.all(t[2:] < 0):
        pattern = "first-offdiag-nonnegative"
    else:
        pattern = "other"
    dominance = bool(t[0] > 2.0 * np.sum(np.abs(t[1:])))
    row_sums = T.row_sums()
    row_sums_positive = bool(np.all(row_sums > 0))
    m_matrix = bool(pattern == "all-negative" and row_sums_positive)

    bounds = None
    if mu is not None and h is not None and h <= 1.0 / 7.0:
        edge = -(h ** (1.0 - 2.0 * mu) * (4.0 - 2.0 ** (3.0 - 2.0 * mu))
                 / (2.0 * math.cos(mu * math.pi) * gamma_fn(4.0 - 2.0 * mu)))
        interior = -(2.0 ** (2.0 * mu) * h * (2.0 * mu - 1.0)
                     / (math.cos(mu * math.pi) * gamma_fn(2.0 - 2.0 * mu)))
        mlast = T.m - 1
        picks = {0, mlast, T.m // 2}
        bounds = all(
            row_sums[i] >= (edge if i in (0, mlast) else interior)
            for i in picks)
    return MatrixReport(diag_positive=diag_positive, offdiag_pattern=pattern,
                        diagonally_dominant=dominance, m_matrix=m_matrix,
                        row_sums_positive=row_sums_positive,
                        row_sum_bounds_hold=bounds)


def class_conditions(spec: ProblemSpec, mesh: Mesh, n: int = 1):
    """Evaluate the two sufficient M-matrix conditions for the step matrix.

    Class 1: beta >= beta0 together with a lower bound on
    tau^alpha0 / h^{2 gamma}.  Class 2: beta < beta0 with h small enough
    that the diffusion entries dominate the positive advection ones,
    plus the same tau/h bound.
    """
    orders = spec.orders
    beta, gamma = orders.beta, orders.gamma
    tau = float(mesh.taus[n - 1])
    h = mesh.h
    coeff_sum = sum(c / gamma_fn(3.0 - a)
                    for a, c in zip(orders.alphas, orders.a_coeffs))
    tau_bound = (-4.0 * math.cos(gamma * math.pi) * gamma_fn(4.0 - 2.0 * gamma)
                 / (3.0 * spec.k2 * _offdiag_first_root(gamma))) * coeff_sum
    tau_ok = tau ** orders.alpha0 / h ** (2.0 * gamma) > tau_bound

    b0 = beta0()
    class1 = beta >= b0 and tau_ok

    h_bound = (-0.5
               * spec.k2 * _offdiag_first_root(gamma)
               / (math.cos(gamma * math.pi) * gamma_fn(4.0 - 2.0 * gamma))
               * math.cos(beta * math.pi) * gamma_fn(4.0 - 2.0 * beta)
               / (spec.k1 * _offdiag_first_root(beta)))
    class2 = beta < b0 and h ** (2.0 * (gamma - beta)) < h_bound and tau_ok
    return class1, class2


def spectrum(T: SymToeplitz, tol: float = 1e-6,
             dense_cap: int = EIG_DENSE_CAP, maxit: int = 20000) -> SpectrumReport:
    """Extremal eigenvalues and condition number of an SPD Toeplitz matrix.

    Dense symmetric eigensolve below dense_cap; power iteration for the
    largest and inverse iteration (CG inner solves) for the smallest
    eigenvalue above it.
    """
    m = T.m
    if m <= dense_cap:
        dense = T.to_dense()
        lmin = scipy.linalg.eigvalsh(dense, subset_by_index=[0, 0])[0]
        lmax = scipy.linalg.eigvalsh(dense, subset_by_index=[m - 1, m - 1])[0]
        return SpectrumReport(lambda_min=float(lmin), lambda_max=float(lmax),
                              kappa=float(lmax / lmin), method="dense",
                              residual_tol_achieved=0.0)
    rng = np.random.default_rng(DEFAULT_SEED)
    # Power iteration for lambda_max.
    v = rng.standard_normal(m)
    v /= np.linalg.norm(v)
    lmax = 0.0
    achieved = np.inf
    for _ in range(maxit):
        w = T.matvec(v)
        lnew = float(v @ w)
        achieved = abs(lnew - lmax) / abs(lnew)
        lmax = lnew
        v = w / np.linalg.norm(w)
        if achieved <= tol:
            break
    else:
        raise RuntimeError("power iteration did not converge")
    # Inverse iteration for lambda_min.
    v = rng.standard_normal(m)
    v /= np.linalg.norm(v)
    lmin = lmax
    for _ in range(maxit):
        w, rep = cg_solve(T, v, tol=min(1e-10, tol * 1e-2), maxit=100000)
        if not rep.converged:
            raise RuntimeError("inner CG of inverse iteration did not converge")
        mu = float(v @ w)  # Rayleigh quotient of T^-1
        lnew = 1.0 / mu
        delta = abs(lnew - lmin) / abs(lnew)
        lmin = lnew
        v = w / np.linalg.norm(w)
        if delta <= tol:
            break
    else:
        raise RuntimeError("inverse iteration did not converge")
    return SpectrumReport(lambda_min=lmin, lambda_max=lmax,
                          kappa=lmax / lmin, method="iterative",
                          residual_tol_achieved=achieved)


def kappa_ratio_table(spec: ProblemSpec, mesh_for, m_list: Sequence[int],
                      tol: float = 1e-6):
    """Rows (M, lambda_min, lambda_max, kappa, ratio) over a size sweep.

    mesh_for(m) must return the mesh for spatial resolution m; ratio is
    kappa_prev / kappa_cur (empty on the first row).
    """
    rows = []
    prev_kappa = None
    for m in m_list:
        mesh = mesh_for(m)
        rep = spectrum(step_matrix(spec, mesh, 1).a_full, tol=tol)
        ratio = None if prev_kappa is None else prev_kappa / rep.kappa
        rows.append({"M": m, "lambda_min": rep.lambda_min,
                     "lambda_max": rep.lambda_max, "kappa": rep.kappa,
                     "ratio": ratio})
        prev_kappa = rep.kappa
    return rows


def two_level_contraction(A: SymToeplitz, trials: int = 10, iters: int = 20,
                          burn_in: int = 5, seed: int = DEFAULT_SEED) -> float:
    """Empirical energy-norm contraction factor of the V(0,1) iteration.

    Runs the homogeneous iteration (b = 0) from random unit errors and
    returns the worst post-burn-in average of per-step energy ratios.
    """
    if trials < 10:
        raise ValueError("need at least 10 trials")
    cyc = TwoLevelV01(A)
    b = np.zeros(A.m)

    def energy(e):
        return float(e @ A.matvec(e))

    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        e = rng.standard_normal(A.m)
        e /= np.linalg.norm(e)
        ratios = []
        prev = energy(e)
        for _ in range(iters):
            e = cyc.apply(b, e)
            cur = energy(e)
            if prev == 0.0:
                break
            ratios.append(np.sqrt(cur / prev))
            prev = cur
        tail = ratios[burn_in:]
        if tail:
            worst = max(worst, float(np.exp(np.mean(np.log(tail)))))
    return worst
