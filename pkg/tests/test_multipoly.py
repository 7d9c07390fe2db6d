"""Sparse multivariate polynomial container."""

import numpy as np
import pytest

from polydense.multipoly import MultiPoly


def test_zero_coefficients_dropped():
    p = MultiPoly(2, {(0, 0): 1.0, (1, 0): 0.0, (0, 2): -2.0})
    assert (1, 0) not in p.terms
    assert p.terms == {(0, 0): 1.0, (0, 2): -2.0}


def test_total_degree():
    assert MultiPoly(2, {}).total_degree == 0
    assert MultiPoly(2, {(1, 3): 2.0}).total_degree == 4


def test_validation():
    with pytest.raises(ValueError):
        MultiPoly(2, {(1,): 1.0})
    with pytest.raises(ValueError):
        MultiPoly(1, {(-1,): 1.0})


def test_single_point_evaluation():
    p = MultiPoly(2, {(0, 0): 1.0, (2, 1): 3.0})
    assert p(np.array([2.0, -1.0])) == pytest.approx(1.0 + 3.0 * 4.0 * -1.0)


def test_batch_evaluation_matches_single():
    rng = np.random.default_rng(1)
    terms = {
        (int(a), int(b)): float(c)
        for a, b, c in zip(
            rng.integers(0, 5, 10), rng.integers(0, 5, 10), rng.normal(size=10)
        )
    }
    p = MultiPoly(2, terms)
    pts = rng.uniform(-2.0, 2.0, (20, 2))
    batch = p(pts)
    singles = np.array([p(pt) for pt in pts])
    assert np.allclose(batch, singles, rtol=1e-13)


def test_batch_shape_preserved():
    p = MultiPoly(1, {(2,): 1.0})
    x = np.linspace(-1.0, 1.0, 12).reshape(3, 4, 1)
    assert p(x).shape == (3, 4)


def test_scale_and_add():
    p = MultiPoly(1, {(0,): 1.0, (1,): 2.0})
    q = MultiPoly(1, {(1,): -2.0, (2,): 1.0})
    s = p.add(q)
    assert s.terms == {(0,): 1.0, (2,): 1.0}
    assert p.scale(3.0).terms == {(0,): 3.0, (1,): 6.0}
    with pytest.raises(ValueError):
        p.add(MultiPoly(2, {}))


def test_coefficient_lookup():
    p = MultiPoly(1, {(3,): 5.0})
    assert p.coefficient((3,)) == 5.0
    assert p.coefficient((1,)) == 0.0


def test_text_round_trip_exact():
    rng = np.random.default_rng(2)
    terms = {(i, j): float(rng.normal()) for i in range(4) for j in range(3)}
    p = MultiPoly(2, terms)
    q = MultiPoly.from_text(p.to_text())
    assert q.dim == 2
    assert q.terms == p.terms  # 17 significant digits round-trip doubles


def test_from_text_with_comments_and_dim():
    text = "# comment\n0 1.5\n2 -0.25\n"
    p = MultiPoly.from_text(text, dim=1)
    assert p.terms == {(0,): 1.5, (2,): -0.25}
    with pytest.raises(ValueError):
        MultiPoly.from_text("")


def test_empty_polynomial_serializes_empty():
    assert MultiPoly(1, {}).to_text() == ""
