"""Continuous problem definitions, meshes, and the built-in manufactured tests.

The model equation on an interval (a, b) is

    sum_i a_i * D_t^{alpha_i} u = K1 * d^{2 beta} u / d|x|^{2 beta}
                                + K2 * d^{2 gamma} u / d|x|^{2 gamma} + f

with homogeneous Dirichlet boundary data, Caputo derivatives in time
(orders alpha_i in (0,1), strictly decreasing) and Riesz derivatives in
space (advection order 2*beta with beta in (0, 1/2), diffusion order
2*gamma with gamma in (1/2, 1)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn


@dataclass(frozen=True)
class FractionalOrders:
    """Temporal orders (alphas with weights a_coeffs) and spatial orders."""

    alphas: tuple
    a_coeffs: tuple
    beta: float
    gamma: float

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        a_coeffs = tuple(float(c) for c in self.a_coeffs)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "a_coeffs", a_coeffs)
        if not alphas:
            raise ValueError("need at least one temporal order")
        if len(alphas) != len(a_coeffs):
            raise ValueError("alphas and a_coeffs must have equal length")
        if any(not 0.0 < a < 1.0 for a in alphas):
            raise ValueError("temporal orders must lie in (0, 1)")
        if any(alphas[i] <= alphas[i + 1] for i in range(len(alphas) - 1)):
            raise ValueError("temporal orders must be strictly decreasing")
        if a_coeffs[0] <= 0.0:
            raise ValueError("leading temporal coefficient must be positive")
        if any(c < 0.0 for c in a_coeffs):
            raise ValueError("temporal coefficients must be nonnegative")
        # beta = 1/2 and gamma = 1/2 are excluded: cos(mu*pi) vanishes
        # there and the stiffness prefactor blows up.
        if not 0.0 < self.beta < 0.5:
            raise ValueError("advection order beta must lie in (0, 1/2)")
        if not 0.5 < self.gamma < 1.0:
            raise ValueError("diffusion order gamma must lie in (1/2, 1)")

    @property
    def alpha0(self):
        return self.alphas[0]


@dataclass(frozen=True)
class ProblemSpec:
    """A full problem instance: orders, coefficients, domain, data."""

    orders: FractionalOrders
    k1: float
    k2: float
    domain: tuple
    horizon: float
    source: Callable[[np.ndarray, float], np.ndarray]
    initial: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Callable[[np.ndarray, float], np.ndarray]] = None

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("advection/diffusion coefficients must be positive")
        if self.horizon <= 0:
            raise ValueError("final time must be positive")
        a, b = self.domain
        if not a < b:
            raise ValueError("domain must be a nonempty interval (a, b)")


class TimePolicy(enum.Enum):
    """How the uniform time step relates to the spatial step."""

    TAU_EQ_H = "tau-eq-h"
    TAU_EQ_H2 = "tau-eq-h2"
    TAU_CONST = "tau-const"


@dataclass(frozen=True)
class Mesh:
    """Uniform spatial grid plus a (by default uniform) time grid."""

    m: int
    h: float
    taus: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        if self.m < 4:
            raise ValueError("need at least 4 spatial cells")
        if self.h <= 0:
            raise ValueError("spatial step must be positive")
        taus = np.asarray(self.taus, dtype=np.float64)
        if np.any(taus <= 0):
            raise ValueError("time steps must be positive")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "times", np.asarray(self.times, dtype=np.float64))

    @property
    def n_steps(self):
        return len(self.taus)

    @property
    def uniform(self):
        t = self.taus
        return bool(np.all(np.abs(t - t[0]) <= 1e-14 * t[0]))

    def interior_nodes(self, a=0.0):
        return a + self.h * np.arange(1, self.m)


def make_mesh(spec: ProblemSpec, m: int, policy: TimePolicy,
              tau_const: Optional[float] = None) -> Mesh:
    """Build a uniform mesh with tau = h, tau = h^2 or tau = const.

    N is rounded up so that N * tau = T exactly (tau is then T / N).
    """
    if m < 4:
        raise ValueError("need at least 4 spatial cells")
    a, b = spec.domain
    h = (b - a) / m
    T = spec.horizon
    if policy is TimePolicy.TAU_EQ_H:
        tau_nominal = h
    elif policy is TimePolicy.TAU_EQ_H2:
        tau_nominal = h * h
    elif policy is TimePolicy.TAU_CONST:
        if tau_const is None or tau_const <= 0:
            raise ValueError("tau-const policy needs a positive tau_const")
        tau_nominal = tau_const
    else:
        raise ValueError(f"unknown time policy {policy!r}")
    n = math.ceil(T / tau_nominal - 1e-12)
    if n < 1:
        raise ValueError("time policy produced no time steps")
    tau = T / n
    taus = np.full(n, tau)
    times = np.linspace(0.0, T, n + 1)
    return Mesh(m=m, h=h, taus=taus, times=times)


def _caputo_poly_t2(alphas: Sequence[float], a_coeffs: Sequence[float], t):
    """sum_i a_i * Caputo^{alpha_i} of (t^2 + 1), in closed form."""
    out = 0.0
    for a, c in zip(alphas, a_coeffs):
        out = out + c * 2.0 * t ** (2.0 - a) / gamma_fn(3.0 - a)
    return out


def make_example_1(orders: FractionalOrders) -> ProblemSpec:
    """Manufactured problem with exact solution 100 (t^2+1)(x^2 - x^3).

    Domain (0,1), T = 0.5, two temporal terms with unit weights,
    K1 = 1, K2 = 2.  The caller picks the four fractional orders.
    """
    if len(orders.alphas) != 2:
        raise ValueError("this example uses exactly two temporal orders")
    if orders.a_coeffs != (1.0, 1.0):
        raise ValueError("this example uses unit temporal coefficients")
    beta, gamma = orders.beta, orders.gamma

    def exact(x, t):
        x = np.asarray(x, dtype=np.float64)
        return 100.0 * (t * t + 1.0) * (x * x - x ** 3)

    def initial(x):
        return exact(x, 0.0)

    def source(x, t):
        x = np.asarray(x, dtype=np.float64)
        time_part = 100.0 * (x * x - x ** 3) * _caputo_poly_t2(
            orders.alphas, orders.a_coeffs, t)
        y = 1.0 - x
        s = 100.0 * (t * t + 1.0)
        out = time_part
        for mu, k in ((beta, 1.0), (gamma, 2.0)):
            bracket = (y ** (1.0 - 2.0 * mu) / gamma_fn(2.0 - 2.0 * mu)
                       + (2.0 * x ** (2.0 - 2.0 * mu)
                          - 4.0 * y ** (2.0 - 2.0 * mu)) / gamma_fn(3.0 - 2.0 * mu)
                       + (6.0 * y ** (3.0 - 2.0 * mu)
                          - 6.0 * x ** (3.0 - 2.0 * mu)) / gamma_fn(4.0 - 2.0 * mu))
            out = out + k * s / (2.0 * math.cos(mu * math.pi)) * bracket
        return out

    return ProblemSpec(orders=orders, k1=1.0, k2=2.0, domain=(0.0, 1.0),
                       horizon=0.5, source=source, initial=initial, exact=exact)


def make_example_2(orders: FractionalOrders, k1: float, k2: float) -> ProblemSpec:
    """Manufactured problem with exact solution 100 (t^2+1) x^2 (1-x)^2.

    Symmetric initial profile; K1 and K2 are free so the effect of large
    diffusion coefficients can be studied.
    """
    if k1 <= 0 or k2 <= 0:
        raise ValueError("k1 and k2 must be positive")
    if len(orders.alphas) != 2:
        raise ValueError("this example uses exactly two temporal orders")
    if orders.a_coeffs != (1.0, 1.0):
        raise ValueError("this example uses unit temporal coefficients")
    beta, gamma = orders.beta, orders.gamma

    def exact(x, t):
        x = np.asarray(x, dtype=np.float64)
        return 100.0 * (t * t + 1.0) * (x * (1.0 - x)) ** 2

    def initial(x):
        return exact(x, 0.0)

    def source(x, t):
        x = np.asarray(x, dtype=np.float64)
        time_part = 100.0 * (x * (1.0 - x)) ** 2 * _caputo_poly_t2(
            orders.alphas, orders.a_coeffs, t)
        y = 1.0 - x
        s = 100.0 * (t * t + 1.0)
        out = time_part
        for mu, k in ((beta, k1), (gamma, k2)):
            bracket = ((x ** (2.0 - 2.0 * mu) + y ** (2.0 - 2.0 * mu))
                       / gamma_fn(3.0 - 2.0 * mu)
                       - (6.0 * x ** (3.0 - 2.0 * mu)
                          + 6.0 * y ** (3.0 - 2.0 * mu)) / gamma_fn(4.0 - 2.0 * mu)
                       + (12.0 * x ** (4.0 - 2.0 * mu)
                          + 12.0 * y ** (4.0 - 2.0 * mu)) / gamma_fn(5.0 - 2.0 * mu))
            out = out + k * s / math.cos(mu * math.pi) * bracket
        return out

    return ProblemSpec(orders=orders, k1=k1, k2=k2, domain=(0.0, 1.0),
                       horizon=0.5, source=source, initial=initial, exact=exact)
