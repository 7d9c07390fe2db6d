"""The three-stage construction: cutoff, mollification, Taylor polynomial.

Stage 1 multiplies the target by a smooth tensor cutoff supported in the
cube of radius 2*nu.  Stage 2 convolves with the scaled kernel
(lambda^n / A) H(lambda .).  Stage 3 replaces the kernel by its degree-N
Taylor polynomial U_N, which turns the convolution into an exact
polynomial whose coefficients are finite combinations of moments of the
cutoff stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError
from .kernel import H_eval, build_UN, kernel_constants
from .multipoly import MultiPoly
from .quadrature import panel_rule, refine_to_tol, tensor_rule
from .weights import TargetFunction, Weight

__all__ = [
    "CutoffFunction",
    "CutoffStage",
    "MollifiedStage",
    "ApproxParams",
    "build_chi",
    "cutoff_apply",
    "cutoff_error",
    "mollify",
    "mollify_on_points",
    "mollify_error_split",
    "kernel_tail_mass",
    "moments",
    "moment_tensor",
    "build_VN",
    "stage2_error_estimate",
]


@dataclass(frozen=True)
class ApproxParams:
    """The triple parameterizing the three stages."""

    nu: int
    lam: float
    N: int

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("nu must be a positive integer")
        if self.lam <= 1:
            raise ValueError("lambda must exceed 1")
        if self.N < 0:
            raise ValueError("N must be >= 0")


@dataclass(frozen=True)
class CutoffFunction:
    """A smooth bump: identically 1 on [-1, 1], supported in [-2, 2]."""

    eval: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return self.eval(np.asarray(t, dtype=float))


def _bump_side(u):
    """s(u) = exp(-1/u) for u > 0, 0 otherwise (smooth at 0)."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)


def build_chi() -> CutoffFunction:
    """The fixed cutoff chi(t) = s(2-|t|) / (s(2-|t|) + s(|t|-1)).

    Pinning one explicit construction keeps every derived constant (e.g.
    the cutoff moments) reproducible; chi is symmetric about |t| = 1.5 on
    the transition band, so the band integrates to exactly 1/2.
    """

    def chi(t):
        t = np.abs(np.asarray(t, dtype=float))
        up = _bump_side(2.0 - t)
        down = _bump_side(t - 1.0)
        denom = up + down
        out = np.where(denom > 0, up / np.where(denom > 0, denom, 1.0), 0.0)
        return out if out.ndim else float(out)

    return CutoffFunction(chi)


_CHI = build_chi()


@dataclass(frozen=True)
class CutoffStage:
    """f_nu(x) = f(x) * prod_j chi(x_j / nu): equals f on the cube of
    radius nu, vanishes outside the cube of radius 2*nu."""

    source: TargetFunction
    nu: int

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        window = np.prod(_CHI(x / self.nu), axis=-1)
        return self.source(x) * window

    @property
    def dim(self):
        return self.source.dim

    def max_abs(self, m=401):
        """Grid maximum of |f| over the support cube (the paper's M_nu)."""
        pts = _cube_grid(2.0 * self.nu, m if self.dim == 1 else 101, self.dim)
        return float(np.max(np.abs(self.source(pts))))


def cutoff_apply(f: TargetFunction, nu: int) -> CutoffStage:
    """Stage 1: window the target with the tensor cutoff at scale nu."""
    if nu < 1:
        raise ValueError("nu must be a positive integer")
    return CutoffStage(f, int(nu))


def _cube_grid(R, m, dim, include=()):
    axis = np.linspace(-R, R, m)
    for v in include:
        axis = np.union1d(axis, [-v, v])
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def cutoff_error(f: TargetFunction, w: Weight, nu: int, R, m=None):
    """Grid estimate of sup over Pi_R \\ Pi_nu of |f| exp(-phi).

    This is the upper-stage bound on the weighted error of the cutoff:
    the stage-1 error never exceeds the weighted tail of f outside the
    cube of radius nu.
    """
    if R <= nu:
        raise ValueError("R must exceed nu")
    if m is None:
        m = 241 if w.dim == 1 else 81
    pts = _cube_grid(R, m, w.dim, include=(nu,))
    outside = np.max(np.abs(pts), axis=-1) >= nu
    pts = pts[outside]
    vals = np.abs(f(pts)) * np.exp(-w.phi(pts))
    return float(np.max(vals))


# ---------------------------------------------------------------------------
# stage 2: mollification


def _moll_axes(stage: CutoffStage, max_len):
    nu = stage.nu
    rule = panel_rule(-2.0 * nu, 2.0 * nu, breakpoints=(-nu, nu), max_len=max_len)
    return [rule] * stage.dim


def _moll_start_len(stage: CutoffStage, lam):
    # panel short enough that a 24-point rule resolves the oscillation of
    # H(lambda .): node count per axis scales like lambda * nu
    return min(float(stage.nu), 32.0 / lam)


def mollify(stage: CutoffStage, lam, x, tol=1e-8):
    """f_{nu,lambda}(x) = (lambda^n / A) integral of f_nu(y) H(lambda(x-y)) dy.

    Tensor Gauss-Legendre over the exact support cube, panels split at the
    cutoff seams, refined until two resolutions agree within tol.
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = stage.dim
    consts = kernel_constants(n)
    scale = lam ** n / consts.A

    def evaluate(max_len):
        pts, wts = tensor_rule(_moll_axes(stage, max_len))
        vals = stage(pts) * H_eval(lam * (x - pts))
        return scale * float(wts @ vals)

    return refine_to_tol(evaluate, tol, _moll_start_len(stage, lam))


def mollify_on_points(stage: CutoffStage, lam, pts, max_len=None, chunk=256):
    """Batch mollification at many points, one fixed quadrature resolution.

    Used by norm sweeps where a per-point refinement loop would be
    wasteful; the resolution defaults to one halving below the scale that
    single-point refinement starts from.
    """
    if max_len is None:
        max_len = 0.5 * _moll_start_len(stage, lam)
    n = stage.dim
    consts = kernel_constants(n)
    scale = lam ** n / consts.A
    qpts, qw = tensor_rule(_moll_axes(stage, max_len))
    fvals = stage(qpts) * qw
    pts = np.asarray(pts, dtype=float)
    out = np.empty(pts.shape[0])
    for lo in range(0, pts.shape[0], chunk):
        block = pts[lo:lo + chunk]
        kern = H_eval(lam * (block[:, None, :] - qpts[None, :, :]))
        out[lo:lo + chunk] = scale * kern @ fvals
    return out


@dataclass(frozen=True)
class MollifiedStage:
    """The mollified stage with its quadrature descriptor."""

    base: CutoffStage
    lam: float
    quadrature: str = "tensor Gauss-Legendre, panels at cutoff seams"
    tol: float = 1e-8

    def __call__(self, x):
        return mollify(self.base, self.lam, x, tol=self.tol)


def kernel_tail_mass(n, T, tol=1e-10):
    """Mass of the product kernel outside the Euclidean ball of radius T."""
    if T <= 0:
        raise ValueError("T must be positive")
    consts = kernel_constants(n)
    if n == 1:
        # 2 * int_T^inf (1 - cos t)/(2 t^2) dt, cosine part by QAWF
        osc, _ = quad(lambda t: 1.0 / (2.0 * t * t), T, np.inf, weight="cos", wvar=1.0)
        return 2.0 * (1.0 / (2.0 * T) - osc)
    if n == 2:
        tx, tw = panel_rule(0.0, 2.0 * math.pi, max_len=0.1)
        rx, rw = panel_rule(0.0, T, max_len=0.25)
        c, s = np.cos(tx), np.sin(tx)
        pts = np.stack(
            [np.outer(rx, c).ravel(), np.outer(rx, s).ravel()], axis=-1
        )
        integrand = H_eval(pts) * np.outer(rx, np.ones_like(tx)).ravel()
        disk = float(np.outer(rw, tw).ravel() @ integrand)
        return consts.A - disk
    raise NotImplementedError("kernel tail mass implemented for n <= 2")


def mollify_error_split(stage: CutoffStage, lam, x, directions=32, radii=16):
    """The two-term diagnostic behind stage-2 convergence.

    Term one is the measured oscillation of f_nu over the ball of radius
    r(lambda) = lambda^(-2n/(2n+1)) around x; term two is
    (2 M_nu / A) times the kernel mass outside radius lambda^(1/(2n+1)).
    The tail-cut exponent is 1/(2n+1) in every dimension (the change of
    variables t = lambda(x - y) applied to the ball ||x-y|| > r(lambda)).
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = stage.dim
    r = lam ** (-2.0 * n / (2.0 * n + 1.0))

    # sampled oscillation over the ball of radius r
    if n == 1:
        offs = np.linspace(-r, r, 2 * radii + 1)[:, None]
    else:
        rng = np.linspace(0.0, r, radii + 1)[1:]
        if n == 2:
            ang = np.linspace(0.0, 2.0 * math.pi, directions, endpoint=False)
            dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        else:
            g = np.random.default_rng(0).standard_normal((directions, n))
            dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
        offs = (rng[:, None, None] * dirs[None, :, :]).reshape(-1, n)
        offs = np.vstack([np.zeros((1, n)), offs])
    center = float(stage(x))
    i1 = float(np.max(np.abs(stage(x + offs) - center)))

    consts = kernel_constants(n)
    m_nu = stage.max_abs()
    tail = kernel_tail_mass(n, lam ** (1.0 / (2.0 * n + 1.0)))
    i2 = 2.0 * m_nu / consts.A * tail
    return i1, i2


# ---------------------------------------------------------------------------
# stage 3: moments and the polynomial approximant


def moment_tensor(stage: CutoffStage, max_deg, tol=1e-9, order=32):
    """All moments int f_nu(y) y^beta dy for beta with every beta_i <= max_deg.

    Returns an array of shape (max_deg+1,) * n indexed by beta.  Tolerance
    is relative to max(1, |moment|), checked between two panel resolutions.
    """
    if max_deg < 0:
        raise ValueError("max_deg must be >= 0")
    nu = stage.nu
    n = stage.dim

    def evaluate(max_len):
        nodes, wts = panel_rule(
            -2.0 * nu, 2.0 * nu, breakpoints=(-nu, nu), max_len=max_len, order=order
        )
        vand = np.vander(nodes, max_deg + 1, increasing=True)
        shape = (nodes.size,) * n
        grid = tensor_rule([(nodes, wts)] * n)[0]
        tens = stage(grid).reshape(shape)
        mag = np.abs(tens)
        aw = vand * wts[:, None]
        aw_abs = np.abs(aw)
        for _ in range(n):
            tens = np.tensordot(tens, aw, axes=([0], [0]))
            mag = np.tensordot(mag, aw_abs, axes=([0], [0]))
        return tens, mag

    max_len = min(float(nu), 2.0)
    prev, _ = evaluate(max_len)
    for _ in range(5):
        max_len *= 0.5
        cur, mag = evaluate(max_len)
        # moments that vanish by symmetric cancellation sit at the roundoff
        # floor eps * (sum of |terms|); allow that floor on top of tol
        allow = tol * np.maximum(1.0, np.abs(cur)) + 32 * np.finfo(float).eps * mag
        err = np.max(np.abs(cur - prev) / np.maximum(1.0, np.abs(cur)))
        if np.all(np.abs(cur - prev) <= allow):
            return cur
        prev = cur
    raise QuadratureError(
        f"moment quadrature did not reach tol={tol:g}; last move {err:g}",
        achieved=float(err),
    )


def moments(stage: CutoffStage, beta, tol=1e-9):
    """Single moment int over the support cube of f_nu(y) y^beta dy."""
    beta = tuple(int(b) for b in np.atleast_1d(beta))
    if len(beta) != stage.dim:
        raise ValueError("multi-index length must equal the dimension")
    if any(b < 0 for b in beta):
        raise ValueError("multi-index must be non-negative")
    tens = moment_tensor(stage, max(beta), tol=tol)
    return float(tens[beta])


def build_VN(stage: CutoffStage, lam, N, tol=1e-9, _moments=None) -> MultiPoly:
    """The polynomial V_N(x) = (lambda^n/A) int f_nu(y) U_N(lambda(x-y)) dy.

    Assembled exactly (up to moment quadrature) by binomial expansion of
    each kernel term in x - y; coefficients accumulate through compensated
    summation because the lambda^|gamma| factors cancel heavily.
    """
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    if N < 0:
        raise ValueError("N must be >= 0")
    n = stage.dim
    consts = kernel_constants(n)
    un = build_UN(N, n)
    tens = moment_tensor(stage, N, tol=tol) if _moments is None else _moments
    acc = {}
    for gamma, a_g in un.terms.items():
        base = a_g * lam ** (sum(gamma) + n) / consts.A
        for k in product(*(range(g + 1) for g in gamma)):
            sign = -1.0 if (sum(gamma) - sum(k)) % 2 else 1.0
            c = base * sign
            for gi, ki in zip(gamma, k):
                c *= math.comb(gi, ki)
            c *= float(tens[tuple(g - i for g, i in zip(gamma, k))])
            acc.setdefault(k, []).append(c)
    terms = {k: math.fsum(v) for k, v in acc.items()}
    return MultiPoly(n, terms)


def stage2_error_estimate(stage: CutoffStage, lam, w: Weight, m=None, max_len=None):
    """Weighted grid norm of f_{nu,lambda} - f_nu over the cube of radius 4*nu.

    Outside that cube both terms are controlled by kernel-tail bounds of
    the mollify_error_split kind, so the grid window captures the sup.
    """
    if m is None:
        m = 161 if w.dim == 1 else 41
    pts = _cube_grid(4.0 * stage.nu, m, w.dim)
    approx = mollify_on_points(stage, lam, pts, max_len=max_len)
    diff = np.abs(approx - stage(pts))
    return float(np.max(diff * np.exp(-w.phi(pts))))
