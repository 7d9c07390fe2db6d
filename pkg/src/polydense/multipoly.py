"""Sparse multivariate polynomials keyed by multi-index."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

__all__ = ["MultiPoly"]

Index = Tuple[int, ...]


@dataclass(frozen=True)
class MultiPoly:
    """A polynomial sum_alpha c_alpha x^alpha with finitely many terms.

    Zero coefficients are never stored; iteration over ``terms`` is
    lexicographic, so serialization and evaluation order are deterministic.
    """

    dim: int
    terms: Dict[Index, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha in sorted(self.terms):
            c = float(self.terms[alpha])
            if len(alpha) != self.dim:
                raise ValueError(f"multi-index {alpha} has wrong length")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            if c != 0.0:
                clean[tuple(int(a) for a in alpha)] = c
        object.__setattr__(self, "terms", clean)

    @property
    def total_degree(self):
        return max((sum(a) for a in self.terms), default=0)

    def __call__(self, x):
        """Evaluate at points of shape (..., dim) with compensated summation."""
        x = np.asarray(x, dtype=float)
        if x.shape == (self.dim,):
            return float(
                math.fsum(c * math.prod(x[i] ** a[i] for i in range(self.dim))
                          for a, c in self.terms.items())
            )
        if x.shape[-1] != self.dim:
            raise ValueError(f"point dimension {x.shape[-1]} != poly dim {self.dim}")
        flat = x.reshape(-1, self.dim)
        # per-axis power tables: columns up to the max exponent used
        max_deg = [max((a[i] for a in self.terms), default=0) for i in range(self.dim)]
        pows = [np.vander(flat[:, i], max_deg[i] + 1, increasing=True)
                for i in range(self.dim)]
        out = np.zeros(flat.shape[0])
        for alpha in sorted(self.terms):
            mono = pows[0][:, alpha[0]].copy()
            for i in range(1, self.dim):
                mono *= pows[i][:, alpha[i]]
            out += self.terms[alpha] * mono
        return out.reshape(x.shape[:-1])

    def scale(self, c):
        return MultiPoly(self.dim, {a: c * v for a, v in self.terms.items()})

    def add(self, other: "MultiPoly"):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        terms = dict(self.terms)
        for a, v in other.terms.items():
            terms[a] = terms.get(a, 0.0) + v
        return MultiPoly(self.dim, terms)

    def coefficient(self, alpha):
        return self.terms.get(tuple(alpha), 0.0)

    def to_text(self):
        """Plain-text lines "a_1 ... a_n coefficient", 17 significant digits."""
        lines = []
        for alpha in sorted(self.terms):
            coeff = format(self.terms[alpha], ".17g")
            lines.append(" ".join(str(a) for a in alpha) + " " + coeff)
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text, dim=None):
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            alpha = tuple(int(p) for p in parts[:-1])
            if dim is None:
                dim = len(alpha)
            terms[alpha] = float(parts[-1])
        if dim is None:
            raise ValueError("cannot infer dimension from empty text")
        return cls(dim, terms)
