"""The mollification kernel h(z) = sin^2(z/2)/z^2 and its product kernel.

h is entire of exponential type 1, non-negative and integrable on the
line, with integral pi/2.  Its n-fold product H inherits the Taylor
structure needed for the degree-N truncation U_N and the uniform
derivative bound K_H that controls the truncation remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError
from .multipoly import MultiPoly

__all__ = [
    "h_eval",
    "h_taylor_coeff",
    "h_derivative",
    "H_eval",
    "KernelConstants",
    "kernel_constants",
    "build_UN",
    "remainder_bound_eq2",
]

#: below this |z| the closed form (1 - cos z)/(2 z^2) cancels catastrophically
SERIES_SWITCH = 1e-2
#: series order used inside the switch radius (remainder < 1e-30 there)
SERIES_TERMS = 7


def h_taylor_coeff(k):
    """Coefficient of z^k in the Maclaurin series of h.

    h(z) = sum_j (-1)^j z^(2j) / (2 (2j+2)!), so odd coefficients vanish.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k % 2:
        return 0.0
    j = k // 2
    return (-1.0) ** j / (2.0 * math.factorial(2 * j + 2))


def _h_series(z, terms=SERIES_TERMS):
    out = np.zeros_like(z)
    for j in range(terms - 1, -1, -1):
        out = out * (z * z) + h_taylor_coeff(2 * j)
    return out


def h_eval(z):
    """h(z) = sin^2(z/2)/z^2, with the even Taylor series near z = 0.

    Always in [0, 1/4]; zero exactly at nonzero multiples of 2*pi.
    """
    z = np.asarray(z, dtype=float)
    small = np.abs(z) <= SERIES_SWITCH
    zs = np.where(small, 0.0, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = np.sin(zs / 2.0) ** 2 / np.where(small, 1.0, zs * zs)
    out = np.where(small, _h_series(z), closed)
    return out if out.ndim else float(out)


def h_derivative(z, k, series_terms=26):
    """k-th derivative of h, exact closed form away from 0, series near 0.

    Closed form by the Leibniz rule on (1 - cos z) * z^(-2) / 2; the series
    branch differentiates the Maclaurin expansion term by term.
    """
    if k == 0:
        return h_eval(z)
    z = np.asarray(z, dtype=float)
    small = np.abs(z) <= 0.5
    zs = np.where(small, 1.0, z)

    closed = np.zeros_like(zs)
    for i in range(k + 1):
        if i == 0:
            u_i = 1.0 - np.cos(zs)
        else:
            u_i = -np.cos(zs + i * math.pi / 2.0)
        m = k - i
        inv = (-1.0) ** m * math.factorial(m + 1) * zs ** (-(m + 2))
        closed += math.comb(k, i) * u_i * inv
    closed *= 0.5

    series = np.zeros_like(z)
    for j in range(series_terms - 1, -1, -1):
        if 2 * j < k:
            continue
        fall = math.perm(2 * j, k)
        series = series + h_taylor_coeff(2 * j) * fall * z ** (2 * j - k)
    out = np.where(small, series, closed)
    return out if out.ndim else float(out)


def H_eval(x):
    """Product kernel H(x) = h(x_1) ... h(x_n), values in [0, 4^-n]."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise ValueError("H_eval expects a point with a coordinate axis")
    out = np.prod(h_eval(x), axis=-1)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class KernelConstants:
    """Normalization and derivative bound of the product kernel."""

    dim: int
    A: float      # integral of H over R^n
    A1: float     # integral of h over R (A = A1^n)
    K_H: float    # uniform bound on every partial derivative of H

    def __post_init__(self):
        if not (self.A > 0 and self.K_H > 0):
            raise ValueError("kernel constants must be positive")


@lru_cache(maxsize=None)
def _integral_of_h(tol=1e-10):
    """Adaptive quadrature of h over the line.

    The tail beyond B is handled analytically for the 1/(2 z^2) part and by
    an oscillatory (QAWF) rule for the cos z/(2 z^2) part.
    """
    B = 10.0
    head, e1 = quad(lambda t: h_eval(t), 0.0, B, limit=200, epsabs=tol, epsrel=tol)
    osc, e2 = quad(
        lambda t: 1.0 / (2.0 * t * t), B, np.inf,
        weight="cos", wvar=1.0, epsabs=1e-11, limlst=100,
    )
    tail = 1.0 / (2.0 * B) - osc
    err = e1 + e2
    if err > 1e-8:
        raise QuadratureError(
            f"kernel normalization quadrature stalled at error {err:g}",
            achieved=err,
        )
    return 2.0 * (head + tail)


def kernel_constants(n) -> KernelConstants:
    """Constants for dimension n: A = A1^n by quadrature, K_H = 4^-n.

    K_H follows from the product structure of the partials of H and the
    Bernstein inequality for entire functions of exponential type 1:
    every |h^(k)| <= sup |h| = 1/4.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    a1 = _integral_of_h()
    return KernelConstants(dim=n, A=a1 ** n, A1=a1, K_H=0.25 ** n)


def build_UN(N, n) -> MultiPoly:
    """Degree-N Taylor polynomial of H at the origin.

    Truncation of the product of the univariate series of h to total
    degree <= N; identical to the multi-index partial-derivative sum.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    terms = {}
    evens = range(0, N + 1, 2)
    for alpha in product(evens, repeat=n):
        if sum(alpha) > N:
            continue
        c = 1.0
        for a in alpha:
            c *= h_taylor_coeff(a)
        terms[alpha] = c
    return MultiPoly(n, terms)


def remainder_bound_eq2(N, n, x):
    """Taylor remainder bound 2 K_H n^(N+1) ||x||^(N+1) / (N+1)!.

    Computed in log space; valid uniformly in x by the derivative bound.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
    if r == 0.0:
        return 0.0
    k_h = 0.25 ** n
    log_val = (
        math.log(2.0) + math.log(k_h)
        + (N + 1) * (math.log(n) + math.log(r))
        - math.lgamma(N + 2)
    )
    return math.exp(log_val)
