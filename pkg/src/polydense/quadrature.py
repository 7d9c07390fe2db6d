"""Panelized tensor Gauss-Legendre quadrature.

Panels are split at caller-supplied breakpoints (where an integrand loses
analyticity, e.g. cutoff seams) and further subdivided to a maximum panel
length (to resolve kernel oscillation at scale lambda); each panel uses a
fixed-order Gauss-Legendre rule, which is spectrally accurate per panel.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

__all__ = ["panel_rule", "tensor_rule", "refine_to_tol"]

DEFAULT_ORDER = 24


@lru_cache(maxsize=None)
def _leggauss(order):
    return np.polynomial.legendre.leggauss(order)


def panel_rule(a, b, breakpoints=(), max_len=None, order=DEFAULT_ORDER):
    """Nodes and weights on [a, b] with panels split as requested.

    Interior breakpoints are always honored; every panel is then subdivided
    into equal pieces no longer than ``max_len``.
    """
    if b <= a:
        raise ValueError("empty interval")
    cuts = sorted({a, b} | {c for c in breakpoints if a < c < b})
    xs, ws = [], []
    base_x, base_w = _leggauss(order)
    for lo, hi in zip(cuts, cuts[1:]):
        length = hi - lo
        pieces = 1 if max_len is None else max(1, int(math.ceil(length / max_len)))
        edges = np.linspace(lo, hi, pieces + 1)
        for p0, p1 in zip(edges, edges[1:]):
            half = 0.5 * (p1 - p0)
            xs.append(half * base_x + 0.5 * (p0 + p1))
            ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)


def tensor_rule(axes):
    """Tensor product of per-axis (nodes, weights) pairs.

    Returns points of shape (M, n) and weights of shape (M,).
    """
    node_list = [np.asarray(nodes) for nodes, _ in axes]
    weight_list = [np.asarray(w) for _, w in axes]
    mesh = np.meshgrid(*node_list, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*weight_list, indexing="ij")
    w = np.ones(pts.shape[0])
    for m in wmesh:
        w *= m.ravel()
    return pts, w


def refine_to_tol(evaluate, tol, start_max_len, levels=6, node_budget=None):
    """Halve the panel length until two successive levels agree within tol.

    ``evaluate(max_len)`` must return the integral value at that panel
    resolution.  Raises QuadratureError with the achieved difference when
    the budget of refinement levels is exhausted.
    """
    max_len = start_max_len
    prev = evaluate(max_len)
    diff = None
    for _ in range(levels):
        max_len *= 0.5
        cur = evaluate(max_len)
        diff = abs(cur - prev)
        if diff < tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not reach tol={tol:g}; last refinement moved {diff:g}",
        achieved=diff,
    )
