"""Young (Legendre-Fenchel) conjugation on the half-line [0, oo).

The conjugate used throughout is

    g*(x) = sup_{y >= 0} (x*y - g(y)),   x >= 0,

computed as a sup over the nodes of a sampled function, which makes the
numeric value a guaranteed lower bound of the true conjugate.  The other
two primitives are the exponential substitution g[e](t) = g(e^t) and the
gap of the half-line inequality

    (g[e])*(x) + (g*[e])*(x) <= x ln x - x   (x > 0),

which is certified non-negative (up to interpolation error) for every
superlinear sample and saturates exactly for the quadratic.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SlopeGuardError

__all__ = [
    "SampledFunction",
    "young_conjugate",
    "exp_substitute",
    "exp_conjugate",
    "conjugate_exp_conjugate",
    "lemma_gap",
    "xlogx_minus_x",
    "random_superlinear_family",
]

#: default step for internally generated conjugation grids
DEFAULT_STEP = 1e-4

#: tolerance on the certified lemma gap (covers interpolation error only)
TOL_LEMMA = 1e-6


@dataclass(frozen=True)
class SampledFunction:
    """A scalar function sampled on a grid 0 = t_0 < ... < t_m = T.

    ``extrapolation_slope`` is the slope assumed beyond T; conjugation
    arguments are guarded against it, since a supremum whose maximizer
    escapes the grid would be silently truncated otherwise.
    """

    grid: np.ndarray
    values: np.ndarray
    extrapolation_slope: float
    # lower-convex-hull cache (vertex indices), built lazily
    _hull: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must hold at least two nodes")
        if grid.shape != values.shape:
            raise ValueError("grid and values must have equal length")
        if grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(grid))):
            raise ValueError("grid and values must be finite")
        if not np.isfinite(self.extrapolation_slope):
            raise ValueError("extrapolation slope must be finite")

    @classmethod
    def from_callable(cls, fn, stop, step=1e-3, slope=None):
        """Sample ``fn`` on [0, stop] with spacing <= step."""
        m = max(2, int(math.ceil(stop / step)) + 1)
        grid = np.linspace(0.0, stop, m)
        values = np.asarray(fn(grid), dtype=float)
        if slope is None:
            slope = (values[-1] - values[-2]) / (grid[-1] - grid[-2])
        return cls(grid, values, float(slope))

    @classmethod
    def from_csv(cls, path, slope=None):
        """Load a two-column CSV (abscissa, value)."""
        ts, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                ts.append(float(row[0]))
                vs.append(float(row[1]))
        grid = np.asarray(ts)
        values = np.asarray(vs)
        if slope is None and grid.size >= 2:
            slope = (values[-1] - values[-2]) / (grid[-1] - grid[-2])
        return cls(grid, values, float(slope))

    @property
    def span(self):
        return float(self.grid[-1])

    def __call__(self, t):
        """Piecewise-linear interpolation (linear extrapolation beyond T)."""
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.grid, self.values)
        beyond = t > self.grid[-1]
        if np.any(beyond):
            out = np.where(
                beyond,
                self.values[-1] + self.extrapolation_slope * (t - self.grid[-1]),
                out,
            )
        return out if out.ndim else float(out)

    def tail_slope(self, floor):
        """Difference-quotient proxy for superlinear growth.

        Returns True when the quotient over the outer half of the grid
        exceeds ``floor``.
        """
        m = self.grid.size
        i = m // 2
        q = (self.values[-1] - self.values[i]) / (self.grid[-1] - self.grid[i])
        return q > floor

    def _hull_data(self):
        cached = self._hull.get("data")
        if cached is None:
            idx = _lower_hull(self.grid, self.values)
            t = self.grid[idx]
            v = self.values[idx]
            slopes = np.diff(v) / np.diff(t)
            cached = (t, v, slopes)
            self._hull["data"] = cached
        return cached


def _lower_hull(t, v):
    """Vertex indices of the lower convex hull of the points (t_i, v_i)."""
    idx = []
    for i in range(t.size):
        while len(idx) >= 2:
            i0, i1 = idx[-2], idx[-1]
            # drop i1 when it lies on or above the chord i0 -> i
            if (v[i1] - v[i0]) * (t[i] - t[i0]) >= (v[i] - v[i0]) * (t[i1] - t[i0]):
                idx.pop()
            else:
                break
        idx.append(i)
    return np.asarray(idx, dtype=np.intp)


def _conjugate_nodes(g: SampledFunction, x):
    """max_i (x * t_i - g_i), vectorized over sorted or unsorted x.

    Equals the brute-force sup over all grid nodes: the per-x maximum of a
    linear function of (t, g) is always attained on the lower convex hull,
    and on the hull the maximizing vertex is located by slope bisection.
    """
    t, v, slopes = g._hull_data()
    x = np.asarray(x, dtype=float)
    j = np.searchsorted(slopes, x, side="right")
    out = x * t[j] - v[j]
    return out


def young_conjugate(g: SampledFunction, x):
    """Numeric Young conjugate g*(x) = max over grid nodes of (x*t - g(t)).

    A lower bound of the true conjugate, exact up to grid resolution for
    continuous g.  ``x`` may be a scalar or an array; every argument must
    respect the slope guard.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise ValueError("conjugate argument must be non-negative")
    if np.any(xs > g.extrapolation_slope * (1 + 1e-12) + 1e-300):
        raise SlopeGuardError("conjugate argument exceeds representable slope")
    out = _conjugate_nodes(g, xs)
    return out if out.ndim else float(out)


def exp_substitute(g: SampledFunction, span=None, step=DEFAULT_STEP):
    """The substituted function g[e](s) = g(e^s) on [0, span].

    The source grid must cover [1, e^span]; values between source nodes are
    obtained by linear interpolation.
    """
    if span is None:
        span = math.log(g.span)
    if span <= 0:
        raise ValueError("span must be positive")
    if g.span < math.exp(span) * (1 - 1e-12):
        raise ValueError(
            f"source grid [0, {g.span:g}] does not cover [1, {math.exp(span):g}]"
        )
    m = max(2, int(math.ceil(span / step)) + 1)
    s = np.linspace(0.0, span, m)
    arg = np.minimum(np.exp(s), g.span)
    vals = np.interp(arg, g.grid, g.values)
    # slope of g[e] at the right end: e^span * local slope of g there
    k = min(np.searchsorted(g.grid, arg[-1], side="right"), g.grid.size - 1)
    local = (g.values[k] - g.values[k - 1]) / (g.grid[k] - g.grid[k - 1])
    return SampledFunction(s, vals, float(arg[-1] * local))


def exp_conjugate(g: SampledFunction, x, step=DEFAULT_STEP):
    """(g[e])*(x): conjugate of the exponential substitution of g."""
    return young_conjugate(exp_substitute(g, step=step), x)


def _conjugate_sampled(g: SampledFunction, step=DEFAULT_STEP):
    """g* at exponential arguments, as a SampledFunction of xi = ln(arg).

    Built on xi in [0, ln(slope guard)], so that every evaluation
    g*(e^xi) keeps e^xi within the representable slope of g.
    """
    if g.extrapolation_slope <= 1.0:
        raise SlopeGuardError(
            "conjugate argument exceeds representable slope "
            "(grid slope <= 1: g* has no representable exponential section)"
        )
    span = math.log(g.extrapolation_slope)
    m = max(2, int(math.ceil(span / step)) + 1)
    xi = np.linspace(0.0, span, m)
    eta = np.exp(xi)
    vals = _conjugate_nodes(g, eta)
    # at eta = max slope the maximizer sits at the last node, so the slope
    # of xi -> g*(e^xi) there is eta_max * t_max
    slope = float(eta[-1] * g.grid[-1])
    return SampledFunction(xi, vals, slope)


def conjugate_exp_conjugate(g: SampledFunction, x, step=DEFAULT_STEP):
    """(g*[e])*(x): conjugate of the exponential substitution of g*."""
    return young_conjugate(_conjugate_sampled(g, step=step), x)


def xlogx_minus_x(x):
    """x ln x - x, extended by its limit 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 0, x * np.log(np.maximum(x, 1e-300)) - x, 0.0)
    return out if out.ndim else float(out)


def lemma_gap(g: SampledFunction, x, step=DEFAULT_STEP):
    """B(x) - (g[e])*(x) - (g*[e])*(x) with B(x) = x ln x - x, B(0) = 0.

    The exact gap is >= 0 for superlinear g; since grid conjugates are
    lower bounds of the true ones, the numeric gap can only undershoot by
    the interpolation error of the exponential substitution, so a value
    >= -TOL_LEMMA certifies the inequality.
    """
    ge = exp_substitute(g, step=step)
    gse = _conjugate_sampled(g, step=step)
    b = xlogx_minus_x(x)
    return b - young_conjugate(ge, x) - young_conjugate(gse, x)


def random_superlinear_family(count, seed, stop=10.0, step=1e-3):
    """Convex samples with end slope safely above 1: quadratics,
    exponentials, and piecewise-linear hulls with increasing slopes.

    The end-slope floors keep every conjugation in lemma_gap inside the
    slope guard for arguments up to 20.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            a = rng.uniform(0.25, 2.0)
            b = rng.uniform(-1.0, 3.0)
            c = rng.uniform(-5.0, 5.0)
            fn = lambda y, a=a, b=b, c=c: a * y * y + b * y + c
            slope = 2.0 * a * stop + b
        elif kind == 1:
            a = rng.uniform(0.1, 1.0)
            b = rng.uniform(0.5, 0.9)
            c = rng.uniform(-3.0, 3.0)
            fn = lambda y, a=a, b=b, c=c: a * np.exp(b * y) + c
            slope = a * b * math.exp(b * stop)
        else:
            pieces = int(rng.integers(3, 8))
            knots = np.sort(rng.uniform(0.0, stop, pieces - 1))
            edges = np.concatenate([[0.0], knots, [stop]])
            slopes = np.sort(rng.uniform(-2.0, 30.0, pieces))
            slopes[-1] = max(slopes[-1], 4.0)
            v0 = rng.uniform(-5.0, 5.0)
            fn = lambda y, e=edges, s=slopes, v0=v0: _piecewise_linear(y, e, s, v0)
            slope = float(slopes[-1])
        out.append(SampledFunction.from_callable(fn, stop, step, slope=slope))
    return out


def _piecewise_linear(y, edges, slopes, v0):
    y = np.asarray(y, dtype=float)
    knot_vals = np.concatenate([[v0], v0 + np.cumsum(slopes * np.diff(edges))])
    seg = np.clip(np.searchsorted(edges, y, side="right") - 1, 0, slopes.size - 1)
    return knot_vals[seg] + slopes[seg] * (y - edges[seg])
