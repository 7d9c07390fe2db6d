"""Explicit error bounds for the polynomial stage, via conjugate calculus.

The chain certified here, for a weight with log phi and its radial
sections phi_sigma:

    sup_x (1+||x||)^(N+1) / weight(x)
        <= 2^(N+1) exp(max(0, sup_sigma (phi_sigma[e])*(N+1)))           (form bound)
        and, through the half-line conjugate inequality,
    p(f_mollified - V_N)
        <= C1 C2^N / (N+1)! * sup_ratio                                  (first bound)
        <= 2 C1 max((2C2)^N/(N+1)!, (2C2)^N exp(-inf_sigma ((phi_sigma)*[e])*(N+1)))

All arithmetic is carried in log space and converted at the end; the
powers and factorials overflow doubles well inside the desk envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conjugate import (
    SampledFunction,
    conjugate_exp_conjugate,
    exp_conjugate,
)
from .errors import DivergingRatioError, SlopeGuardError
from .kernel import kernel_constants
from .pipeline import CutoffStage
from .quadrature import panel_rule
from .weights import Weight, default_directions, radial_section

__all__ = [
    "sup_ratio",
    "log_sup_ratio",
    "conjugate_form_bound",
    "log_conjugate_form_bound",
    "bound_eq3",
    "bound_eq4",
    "eq5_diagnostic",
    "Eq5Report",
    "double_conjugate",
    "transfer_constants",
    "ErrorCertificate",
    "CERT_CSV_HEADER",
]

_R_CAP = 1e7


def _directions_for(w: Weight, directions):
    if directions is not None:
        return list(directions)
    dirs = default_directions(w.dim)
    return dirs[:1] if w.radial else dirs


def _section_sample(w: Weight, sigma, R, points=20001) -> SampledFunction:
    sec = radial_section(w, sigma)
    grid = np.linspace(0.0, R, points)
    vals = np.asarray(sec(grid), dtype=float)
    slope = (vals[-1] - vals[-2]) / (grid[-1] - grid[-2])
    return SampledFunction(grid, vals, float(slope))


def _golden_max(fn, a, b, iters=80):
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = fn(x1)
    return max(f1, f2)


def log_sup_ratio(w: Weight, N, directions=None):
    """log of sup over x of (1+||x||)^(N+1) / weight(x).

    Per direction: 1D maximization of (N+1) ln(1+r) - phi_sigma(r) by a
    coarse grid with adaptive range doubling, then golden-section
    refinement around the best node.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    best = -math.inf
    for sigma in _directions_for(w, directions):
        sec = radial_section(w, sigma)

        def psi(r, _sec=sec):
            r = np.asarray(r, dtype=float)
            return (N + 1) * np.log1p(r) - _sec(r)

        R = max(8.0, 2.0 * (N + 1))
        while True:
            grid = np.linspace(0.0, R, 4001)
            vals = psi(grid)
            j = int(np.argmax(vals))
            if j < grid.size - 1:
                break
            R *= 2.0
            if R > _R_CAP:
                raise DivergingRatioError(
                    "no interior maximum of the growth ratio found; "
                    "weight grows too slowly for this degree"
                )
        lo = grid[max(j - 1, 0)]
        hi = grid[min(j + 1, grid.size - 1)]
        best = max(best, float(_golden_max(lambda r: float(psi(r)), lo, hi)))
    return best


def sup_ratio(w: Weight, N, directions=None):
    """sup over x of (1+||x||)^(N+1) / weight(x), always >= exp(-min phi)."""
    return math.exp(log_sup_ratio(w, N, directions))


def _adaptive_section(w, sigma, need_slope, start=8.0):
    """Section sample whose substituted end slope R*phi'(R) covers need_slope."""
    R = start
    while True:
        g = _section_sample(w, sigma, R)
        if R * g.extrapolation_slope >= need_slope or R >= _R_CAP:
            return g
        R *= 2.0


def log_conjugate_form_bound(w: Weight, N, directions=None):
    """log of 2^(N+1) exp(max(0, sup_sigma (phi_sigma[e])*(N+1))).

    Dominates log_sup_ratio by the split of the supremum at r = 1.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    x = float(N + 1)
    sup_conj = -math.inf
    for sigma in _directions_for(w, directions):
        g = _adaptive_section(w, sigma, 4.0 * x)
        sup_conj = max(sup_conj, float(exp_conjugate(g, x)))
    return (N + 1) * math.log(2.0) + max(0.0, sup_conj)


def conjugate_form_bound(w: Weight, N, directions=None):
    return math.exp(log_conjugate_form_bound(w, N, directions))


def double_conjugate(w: Weight, sigma, xi):
    """((phi_sigma)*[e])*(xi), with the section range grown until stable.

    Raises SlopeGuardError when the inner conjugate is not representable
    (linear-growth log-weights: phi* jumps to infinity).
    """
    if xi < 0:
        raise ValueError("xi must be >= 0")
    R = 8.0
    prev = None
    while True:
        g = _section_sample(w, sigma, R)
        if g.extrapolation_slope <= 1.0 and R >= _R_CAP:
            raise SlopeGuardError(
                "conjugate argument exceeds representable slope "
                "(section slope never exceeds 1)"
            )
        try:
            val = float(conjugate_exp_conjugate(g, xi))
        except SlopeGuardError:
            val = None
        if val is not None and prev is not None and abs(val - prev) <= 1e-9 * (
            1.0 + abs(val)
        ):
            return val
        prev = val
        R *= 2.0
        if R > _R_CAP:
            if val is None:
                raise SlopeGuardError(
                    "conjugate argument exceeds representable slope"
                )
            return val


def bound_eq3(C1, C2, w: Weight, N, directions=None):
    """C1 C2^N / (N+1)! times the growth-ratio supremum."""
    if C1 < 0 or C2 <= 0:
        raise ValueError("constants must be positive")
    if C1 == 0.0:
        return 0.0
    log_val = (
        math.log(C1) + N * math.log(C2) - math.lgamma(N + 2)
        + log_sup_ratio(w, N, directions)
    )
    return math.exp(log_val)


def bound_eq4(C1, C2, w: Weight, N, directions=None):
    """2 C1 max((2C2)^N/(N+1)!, (2C2)^N exp(-inf_sigma double conjugate)).

    The second branch carries the superlinearity mechanism: its exponent
    grows superlinearly in N exactly when the weight is admissible.
    """
    if C1 < 0 or C2 <= 0:
        raise ValueError("constants must be positive")
    if C1 == 0.0:
        return 0.0
    inf_cc = min(
        double_conjugate(w, sigma, float(N + 1))
        for sigma in _directions_for(w, directions)
    )
    log_b1 = N * math.log(2.0 * C2) - math.lgamma(N + 2)
    log_b2 = N * math.log(2.0 * C2) - inf_cc
    return 2.0 * C1 * math.exp(max(log_b1, log_b2))


@dataclass(frozen=True)
class Eq5Report:
    """Sampled superlinearity diagnostic of the double conjugate."""

    xi_samples: tuple
    ratios: tuple          # min over directions of double_conjugate(xi)/xi
    admissible_consistent: bool
    reason: str = ""


def eq5_diagnostic(w: Weight, directions=None, xi_samples=(5.0, 10.0, 20.0)):
    """Check that min_sigma ((phi_sigma)*[e])*(xi) / xi increases in xi.

    An increasing table is consistent with the uniform superlinear limit;
    a slope-guard trip or a plateau flags the weight as non-admissible.
    """
    xi_samples = tuple(float(x) for x in xi_samples)
    if any(b <= a for a, b in zip(xi_samples, xi_samples[1:])):
        raise ValueError("xi samples must be increasing")
    dirs = _directions_for(w, directions)
    ratios = []
    for xi in xi_samples:
        try:
            cc = min(double_conjugate(w, sigma, xi) for sigma in dirs)
        except SlopeGuardError as exc:
            return Eq5Report(
                xi_samples, tuple(ratios), False,
                reason=f"slope guard tripped at xi={xi:g}: {exc}",
            )
        ratios.append(cc / xi)
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    reason = "" if increasing else "double-conjugate ratios do not increase"
    return Eq5Report(xi_samples, tuple(ratios), increasing, reason)


def transfer_constants(stage: CutoffStage, lam):
    """Concrete (C1, C2) for the polynomial-stage inequality.

    From |f_moll - V_N|(x) <= (lambda^n/A) ||f_nu||_L1 * 2 K_H
    * (n lambda (1 + 4 nu sqrt(n)))^(N+1) (1+||x||)^(N+1) / (N+1)!:
    C2 = n lambda (1 + 4 nu sqrt(n)) and C1 absorbs the remaining factors
    together with one extra power of C2.
    """
    n = stage.dim
    nu = stage.nu
    consts = kernel_constants(n)
    nodes, wts = panel_rule(
        -2.0 * nu, 2.0 * nu, breakpoints=(-nu, nu), max_len=0.5, order=32
    )
    if n == 1:
        l1 = float(wts @ np.abs(stage(nodes[:, None])))
    else:
        from .quadrature import tensor_rule

        pts, w_all = tensor_rule([(nodes, wts)] * n)
        l1 = float(w_all @ np.abs(stage(pts)))
    C2 = n * lam * (1.0 + 4.0 * nu * math.sqrt(n))
    C1 = (lam ** n / consts.A) * l1 * 2.0 * consts.K_H * C2
    return C1, C2


CERT_CSV_HEADER = (
    "nu,lambda,N,measured,sup_ratio,bound3,bound4,eq5_consistent"
)


@dataclass(frozen=True)
class ErrorCertificate:
    """Measured weighted error next to the certified bound values."""

    nu: int
    lam: float
    N: int
    measured: float
    sup_ratio: float
    bound3: float
    bound4: float
    eq5_consistent: Optional[bool] = None

    def csv_row(self):
        cells = [
            str(self.nu),
            format(self.lam, ".17g"),
            str(self.N),
            format(self.measured, ".17g"),
            format(self.sup_ratio, ".17g"),
            format(self.bound3, ".17g"),
            format(self.bound4, ".17g"),
            "" if self.eq5_consistent is None else str(self.eq5_consistent).lower(),
        ]
        return ",".join(cells)
