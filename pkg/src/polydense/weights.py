"""Admissible weights, the weighted sup-norm, and radial sections.

A weight is carried exclusively through its logarithm phi = ln(weight):
every bound downstream is stated in log form, and superexponential
families would overflow doubles if exponentiated eagerly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import EvaluationError

__all__ = [
    "Weight",
    "RadialSection",
    "TargetFunction",
    "MembershipReport",
    "make_weight",
    "make_target",
    "exp_power_weight",
    "exp_anisotropic_weight",
    "exp_linear_weight",
    "weighted_norm_estimate",
    "radial_section",
    "membership_check",
    "default_directions",
    "tensor_grid",
]

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Weight:
    """A weight on R^n represented by its log phi(x) = ln(weight(x)).

    ``log_weight`` maps arrays of shape (..., dim) to shape (...); phi >= 0
    everywhere (weight >= 1).  ``radial`` marks weights that depend on x
    only through ||x||, letting directional extrema collapse to one ray.
    """

    dim: int
    log_weight: Callable[[np.ndarray], np.ndarray]
    family_tag: str
    radial: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def phi(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"point dimension {x.shape[-1]} != weight dim {self.dim}")
        return self.log_weight(x)


@dataclass(frozen=True)
class RadialSection:
    """The log-weight restricted to a ray: phi_sigma(t) = phi(t * sigma)."""

    direction: np.ndarray
    values: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return self.values(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class TargetFunction:
    """A continuous function to approximate; ``eval`` maps (..., dim) -> (...).

    ``decay_hint`` optionally names a radius beyond which |f|/weight is
    negligible for the intended weight; purely advisory.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    name: str = ""
    decay_hint: Optional[float] = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"point dimension {x.shape[-1]} != target dim {self.dim}")
        return self.eval(x)


# ---------------------------------------------------------------------------
# built-in families


def exp_power_weight(dim, a=1.0, p=2.0) -> Weight:
    """weight(x) = exp(a * ||x||^p), a > 0, p > 1 (admissible)."""
    if a <= 0 or p <= 1:
        raise ValueError("exp-power requires a > 0 and p > 1")

    def phi(x):
        return a * np.linalg.norm(x, axis=-1) ** p

    return Weight(dim, phi, f"exp-power a={a:g} p={p:g}", radial=True)


def exp_anisotropic_weight(dim, a, p) -> Weight:
    """weight(x) = exp(sum_i a_i |x_i|^{p_i}), a_i > 0, p_i > 1."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    if a.shape != (dim,) or p.shape != (dim,):
        raise ValueError("need one (a_i, p_i) pair per coordinate")
    if np.any(a <= 0) or np.any(p <= 1):
        raise ValueError("exp-anisotropic requires a_i > 0 and p_i > 1")

    def phi(x):
        return np.sum(a * np.abs(x) ** p, axis=-1)

    tag = "exp-anisotropic a=" + ",".join(f"{v:g}" for v in a)
    tag += " p=" + ",".join(f"{v:g}" for v in p)
    return Weight(dim, phi, tag, radial=False)


def exp_linear_weight(dim, c=1.0) -> Weight:
    """weight(x) = exp(c * ||x||): deliberately non-admissible (linear growth)."""
    if c <= 0:
        raise ValueError("exp-linear requires c > 0")

    def phi(x):
        return c * np.linalg.norm(x, axis=-1)

    return Weight(dim, phi, f"exp-linear c={c:g}", radial=True)


def make_weight(name, dim, **params) -> Weight:
    """Build a weight family by name ("exp-power", "exp-anisotropic", "exp-linear")."""
    if name == "exp-power":
        return exp_power_weight(dim, **params)
    if name == "exp-anisotropic":
        return exp_anisotropic_weight(dim, **params)
    if name == "exp-linear":
        return exp_linear_weight(dim, **params)
    raise ValueError(f"unknown weight family {name!r}")


def make_target(name, dim) -> TargetFunction:
    """Built-in target functions selectable by name."""
    if name == "zero":
        return TargetFunction(dim, lambda x: np.zeros(x.shape[:-1]), "zero")
    if name == "one":
        return TargetFunction(dim, lambda x: np.ones(x.shape[:-1]), "one")
    if name == "sin":
        if dim != 1:
            raise ValueError("target 'sin' is one-dimensional")
        return TargetFunction(1, lambda x: np.sin(x[..., 0]), "sin")
    if name == "sincos":
        if dim != 2:
            raise ValueError("target 'sincos' is two-dimensional")
        return TargetFunction(
            2, lambda x: np.sin(x[..., 0]) * np.cos(x[..., 1]), "sincos"
        )
    if name == "gauss":
        return TargetFunction(
            dim, lambda x: np.exp(-np.sum(x * x, axis=-1)), "gauss"
        )
    raise ValueError(f"unknown target {name!r}")


# ---------------------------------------------------------------------------
# operations


def tensor_grid(R, m, dim):
    """Uniform tensor grid on the closed cube [-R, R]^dim, shape (m^dim, dim)."""
    axis = np.linspace(-R, R, m)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def default_grid_points(dim):
    """Default per-axis resolution for norm estimates (201 in 1D, 101 in 2D)."""
    return 201 if dim == 1 else 101 if dim == 2 else 41


def weighted_norm_estimate(f: TargetFunction, w: Weight, R, m=None):
    """Grid estimate of the weighted sup-norm sup |f(x)| / weight(x).

    Max over the uniform tensor grid on the cube of radius R of
    |f(x)| * exp(-phi(x)); a lower estimate of the norm, monotone
    non-decreasing in R and m, converging for decaying integrands.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if m is None:
        m = default_grid_points(w.dim)
    if m < 2:
        raise ValueError("need at least 2 grid points per axis")
    pts = tensor_grid(R, m, w.dim)
    fv = np.asarray(f(pts), dtype=float)
    ph = np.asarray(w.phi(pts), dtype=float)
    for name, arr in (("target", fv), ("log-weight", ph)):
        bad = ~np.isfinite(arr)
        if np.any(bad):
            node = pts[np.argmax(bad)]
            raise EvaluationError(f"non-finite {name} value at node {node.tolist()}")
    vals = np.abs(fv) * np.exp(-ph)
    # fixed reduction order keeps the result deterministic
    return float(np.max(vals))


def radial_section(w: Weight, sigma) -> RadialSection:
    """The section phi_sigma(t) = phi(t * sigma) along a unit direction."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (w.dim,):
        raise ValueError(f"direction must have shape ({w.dim},)")
    if abs(np.linalg.norm(sigma) - 1.0) > UNIT_TOL:
        raise ValueError("direction must be a unit vector")

    def values(t):
        t = np.asarray(t, dtype=float)
        return w.phi(t[..., None] * sigma)

    return RadialSection(sigma, values)


def default_directions(dim, count=64):
    """Sample of the unit sphere: {+1, -1} in 1D, a uniform angular grid in 2D."""
    if dim == 1:
        return [np.array([1.0]), np.array([-1.0])]
    if dim == 2:
        angles = np.arange(count) * (2 * math.pi / count)
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]
    rng = np.random.default_rng(0)
    vs = rng.standard_normal((count, dim))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    return list(vs)


@dataclass(frozen=True)
class MembershipReport:
    """Sampled growth ratios phi(r*sigma)/r and their monotonicity verdict.

    ``consistent`` is a heuristic necessary condition only: strictly
    increasing ratios along every sampled direction are consistent with
    the superexponential limit, never a proof of it.
    """

    radii: tuple
    ratios: tuple  # one tuple of ratios per direction
    consistent: bool


def membership_check(w: Weight, radii=(1.0, 2.0, 4.0), directions=None):
    """Check phi(r*sigma)/r for strict growth along sampled rays."""
    radii = tuple(float(r) for r in radii)
    if any(r < 1 for r in radii) or any(
        b <= a for a, b in zip(radii, radii[1:])
    ):
        raise ValueError("radii must be strictly increasing and >= 1")
    if directions is None:
        directions = default_directions(w.dim)
        if w.radial:
            directions = directions[:1]
    rows = []
    consistent = True
    r = np.asarray(radii)
    for sigma in directions:
        sec = radial_section(w, sigma)
        ratios = sec(r) / r
        rows.append(tuple(float(v) for v in ratios))
        if not np.all(np.diff(ratios) > 0):
            consistent = False
    return MembershipReport(radii, tuple(rows), consistent)
