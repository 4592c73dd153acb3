"""Assembly of the per-step linear system in Toeplitz symbol form.

The fully discrete scheme leads, at every time level n, to a system
A U^n = F^n whose matrix is a fixed linear combination of the hat-function
mass matrix and two fractional stiffness matrices, all symmetric Toeplitz.
The right-hand side carries the Caputo memory term: a weighted sum over
the whole solution history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_legendre

from .problem import Mesh, ProblemSpec
from .toeplitz import SymToeplitz

# Beyond this lag the 5-term power difference loses too many digits to
# cancellation; switch to its central-difference expansion.
_LAG_EXPANSION_CUTOFF = 10_000

# Geometric grading depth for cells touching the domain boundary, where
# the manufactured sources have algebraic endpoint singularities.  The
# innermost panel has width h * 2^(1-levels); deeper grading would push
# quadrature points onto the singular endpoint in double precision.
_BOUNDARY_GRADE_LEVELS = 30


def mass_symbol(m: int, h: float) -> SymToeplitz:
    """Hat-function mass matrix on m cells: symbol [4h/6, h/6, 0, ...]."""
    if m < 4 or h <= 0:
        raise ValueError("need m >= 4 and h > 0")
    t = np.zeros(m - 1)
    t[0] = 4.0 * h / 6.0
    t[1] = h / 6.0
    return SymToeplitz(t)


def _lag_difference(l: np.ndarray, sigma: float) -> np.ndarray:
    """(l+2)^s - 4(l+1)^s + 6 l^s - 4(l-1)^s + (l-2)^s for lags l >= 2."""
    l = np.asarray(l, dtype=np.float64)
    out = (np.power(l + 2.0, sigma) - 4.0 * np.power(l + 1.0, sigma)
           + 6.0 * np.power(l, sigma) - 4.0 * np.power(l - 1.0, sigma)
           + np.power(l - 2.0, sigma))
    big = l > _LAG_EXPANSION_CUTOFF
    if np.any(big):
        lb = l[big]
        c4 = sigma * (sigma - 1.0) * (sigma - 2.0) * (sigma - 3.0)
        c6 = c4 * (sigma - 4.0) * (sigma - 5.0)
        out[big] = (c4 * np.power(lb, sigma - 4.0)
                    + c6 / 6.0 * np.power(lb, sigma - 6.0))
    return out


def stiffness_symbol(mu: float, m: int, h: float) -> SymToeplitz:
    """Fractional stiffness matrix of order 2*mu on hat functions.

    Shared prefactor h^(1-2mu) / (2 cos(mu pi) Gamma(4-2mu)); lag >= 2
    entries use the 5-term power difference.  mu = 1/2 is rejected since
    cos(mu pi) = 0 makes the prefactor singular.
    """
    if not 0.0 < mu < 1.0:
        raise ValueError("order mu must lie in (0, 1)")
    if abs(mu - 0.5) < 1e-14:
        raise ValueError("mu = 1/2 is singular: cos(mu*pi) = 0")
    if m < 4 or h <= 0:
        raise ValueError("need m >= 4 and h > 0")
    sigma = 3.0 - 2.0 * mu
    pre = h ** (1.0 - 2.0 * mu) / (2.0 * math.cos(mu * math.pi)
                                   * gamma_fn(4.0 - 2.0 * mu))
    t = np.empty(m - 1)
    t[0] = pre * (2.0 ** (4.0 - 2.0 * mu) - 8.0)
    t[1] = pre * (3.0 ** sigma - 2.0 ** (5.0 - 2.0 * mu) + 7.0)
    if m > 3:
        t[2:] = pre * _lag_difference(np.arange(2, m - 1), sigma)
    return SymToeplitz(t)


@dataclass(frozen=True)
class StepMatrix:
    """The per-step coefficient matrix plus its Toeplitz components.

    scale_record holds the scalar multipliers: one per temporal term for
    the mass matrix and one per spatial stiffness matrix.
    """

    a_full: SymToeplitz
    mass: SymToeplitz
    stiff_beta: SymToeplitz
    stiff_gamma: SymToeplitz
    tau: float
    scale_record: dict = field(default_factory=dict)


def step_matrix(spec: ProblemSpec, mesh: Mesh, n: int) -> StepMatrix:
    """Assemble the coefficient matrix for time level n (1-based)."""
    if not 1 <= n <= mesh.n_steps:
        raise ValueError(f"time level {n} outside 1..{mesh.n_steps}")
    orders = spec.orders
    tau = float(mesh.taus[n - 1])
    a0 = orders.alpha0
    g0 = gamma_fn(3.0 - a0)
    mass = mass_symbol(mesh.m, mesh.h)
    stiff_b = stiffness_symbol(orders.beta, mesh.m, mesh.h)
    stiff_g = stiffness_symbol(orders.gamma, mesh.m, mesh.h)
    c_mass = sum(c * g0 * tau ** (a0 - a) / gamma_fn(3.0 - a)
                 for a, c in zip(orders.alphas, orders.a_coeffs))
    c_beta = spec.k1 * g0 * tau ** a0 / 2.0
    c_gamma = spec.k2 * g0 * tau ** a0 / 2.0
    symbol = (c_mass * mass.symbol + c_beta * stiff_b.symbol
              + c_gamma * stiff_g.symbol)
    record = {
        "mass_terms": tuple(c * g0 * tau ** (a0 - a) / gamma_fn(3.0 - a)
                            for a, c in zip(orders.alphas, orders.a_coeffs)),
        "beta": c_beta,
        "gamma": c_gamma,
    }
    return StepMatrix(a_full=SymToeplitz(symbol), mass=mass,
                      stiff_beta=stiff_b, stiff_gamma=stiff_g,
                      tau=tau, scale_record=record)


@dataclass
class TimeHistory:
    """Nodal solution vectors U^0 ... U^{n-1} with their time stamps."""

    states: List[np.ndarray]
    times: List[float]

    @classmethod
    def from_initial(cls, spec: ProblemSpec, mesh: Mesh) -> "TimeHistory":
        a, _ = spec.domain
        u0 = np.asarray(spec.initial(mesh.interior_nodes(a)), dtype=np.float64)
        return cls(states=[u0], times=[0.0])

    def append(self, state: np.ndarray, t: float):
        self.states.append(np.asarray(state, dtype=np.float64))
        self.times.append(float(t))

    def __len__(self):
        return len(self.states)


def _graded_panels(lo, hi, toward_lo, levels=_BOUNDARY_GRADE_LEVELS):
    """Split [lo, hi] into panels shrinking geometrically toward one end.

    Cut points are anchored at the graded endpoint (offsets subtracted
    from it directly) so the tiny innermost panels stay representable in
    floating point instead of rounding onto the singularity.
    """
    w = hi - lo
    frac = 0.5 ** np.arange(levels - 1, 0, -1)
    if toward_lo:
        return np.concatenate(([lo], lo + w * frac, [hi]))
    return np.concatenate(([lo], hi - w * frac[::-1], [hi]))


def source_moment(spec: ProblemSpec, mesh: Mesh, n: int,
                  nx: int = 4, nt: int = 4) -> np.ndarray:
    """Moments of the source against each hat function over one time slab.

    Entry l is the integral of f * phi_l over (x_{l-1}, x_{l+1}) x
    (t_{n-1}, t_n), by tensor Gauss-Legendre quadrature.  The two cells
    touching the domain boundary are graded geometrically toward the
    endpoint because the built-in sources are singular there.
    """
    if not 1 <= n <= mesh.n_steps:
        raise ValueError(f"time level {n} outside 1..{mesh.n_steps}")
    m, h = mesh.m, mesh.h
    a, _ = spec.domain
    t0, t1 = mesh.times[n - 1], mesh.times[n]
    gx, wx = roots_legendre(nx)
    gt, wt = roots_legendre(nt)
    t_nodes = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gt
    t_weights = 0.5 * (t1 - t0) * wt

    # Per spatial cell: quadrature points and weights, graded when the
    # cell touches the boundary.
    def cell_rule(k):  # cell k spans [x_{k-1}, x_k], k = 1..m
        lo, hi = a + (k - 1) * h, a + k * h
        if k == 1:
            cuts = _graded_panels(lo, hi, toward_lo=True)
        elif k == m:
            cuts = _graded_panels(lo, hi, toward_lo=False)
        else:
            cuts = np.array([lo, hi])
        mid = 0.5 * (cuts[:-1] + cuts[1:])
        half = 0.5 * np.diff(cuts)
        pts = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        wts = (half[:, None] * wx[None, :]).ravel()
        return pts, wts

    # Time-integrated source at all cell quadrature points, cell by cell.
    out = np.zeros(m - 1)
    for k in range(1, m + 1):
        pts, wts = cell_rule(k)
        ft = np.zeros_like(pts)
        for tq, twq in zip(t_nodes, t_weights):
            ft += twq * np.asarray(spec.source(pts, tq), dtype=np.float64)
        xl, xr = a + (k - 1) * h, a + k * h
        # Hat functions overlapping cell k: phi_{k-1} (falling) and
        # phi_k (rising); indices outside 1..m-1 are boundary hats.
        rising = (pts - xl) / h
        falling = (xr - pts) / h
        if k - 1 >= 1:
            out[k - 2] += np.dot(wts * ft, falling)
        if k <= m - 1:
            out[k - 1] += np.dot(wts * ft, rising)
    return out


def history_weight(alpha: float, n: int, k: int, mesh: Mesh) -> float:
    """Memory-term weight for history level k at the current level n.

    This is the second difference of t -> t^(2-alpha) across the two
    intervals, divided by tau_k * Gamma(3-alpha); always positive by
    convexity of the power map.
    """
    if not 1 <= k <= n - 1:
        raise ValueError(f"history index k={k} must satisfy 1 <= k <= n-1={n - 1}")
    t = mesh.times
    e = 2.0 - alpha
    num = ((t[n] - t[k - 1]) ** e - (t[n - 1] - t[k - 1]) ** e
           - (t[n] - t[k]) ** e + (t[n - 1] - t[k]) ** e)
    return num / (mesh.taus[k - 1] * gamma_fn(3.0 - alpha))


def rhs_vector(spec: ProblemSpec, mesh: Mesh, n: int,
               history: TimeHistory, mats: StepMatrix,
               source_vec: np.ndarray | None = None) -> np.ndarray:
    """Assemble the scaled right-hand side for time level n.

    history must hold exactly n states U^0 .. U^{n-1}.  All products use
    the FFT Toeplitz matvec; the memory sum is collapsed into a single
    mass-matrix product.
    """
    if len(history) != n:
        raise ValueError(f"history holds {len(history)} states, expected {n}")
    orders = spec.orders
    tau = float(mesh.taus[n - 1])
    a0 = orders.alpha0
    g0 = gamma_fn(3.0 - a0)
    if source_vec is None:
        source_vec = source_moment(spec, mesh, n)

    u_prev = history.states[n - 1]
    c_mass_prev = sum(c * tau ** (1.0 - a) / gamma_fn(3.0 - a)
                      for a, c in zip(orders.alphas, orders.a_coeffs))
    rhs = (source_vec
           + c_mass_prev * mats.mass.matvec(u_prev)
           - spec.k1 * tau / 2.0 * mats.stiff_beta.matvec(u_prev)
           - spec.k2 * tau / 2.0 * mats.stiff_gamma.matvec(u_prev))

    if n > 1:
        acc = np.zeros_like(u_prev)
        for k in range(1, n):
            w = sum(c * history_weight(a, n, k, mesh)
                    for a, c in zip(orders.alphas, orders.a_coeffs))
            acc += w * (history.states[k] - history.states[k - 1])
        rhs -= mats.mass.matvec(acc)

    return g0 * tau ** (a0 - 1.0) * rhs
