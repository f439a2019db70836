from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from iterated_shimura.ncalg import SeriesError, TruncSeries

AB = ("a", "b")


def _lie(coeffs_a, coeffs_b, depth=3, exact=True):
    """Element c_a a + c_b b + c [a, b] of the free Lie algebra."""
    ca, cb = coeffs_a
    c = coeffs_b
    return TruncSeries.from_dict(AB, depth, {("a",): ca, ("b",): cb, ("a", "b"): c, ("b", "a"): -c}, exact)


def test_hand_product():
    x = TruncSeries.from_dict(AB, 2, {(): 1, ("a",): 2}, exact=True)
    y = TruncSeries.from_dict(AB, 2, {(): 1, ("b",): 3}, exact=True)
    p = x * y
    assert p[("a", "b")] == 6 and p[("b", "a")] == 0
    assert p[("a",)] == 2 and p[("b",)] == 3


def test_exp_of_letter_is_divided_powers():
    e = TruncSeries.letter(AB, 4, "a", exact=True).exp()
    for n in range(5):
        assert e[("a",) * n] == Fraction(1, [1, 1, 2, 6, 24][n])
    assert e[("a", "b")] == 0


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_exp_log_roundtrip_exact(p, q, r):
    L = _lie((p, q), r)
    G = L.exp()
    assert G.log().distance(L) == 0
    assert G.shuffle_residual() == 0
    assert G.coproduct_residual() == 0


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_inverse_and_sqrt_exact(p, q, r):
    G = _lie((p, q), r).exp()
    one = TruncSeries.one(AB, 3, exact=True)
    assert (G * G.inverse()).distance(one) == 0
    s = G.sqrt()
    assert (s * s).distance(G) == 0
    assert s.shuffle_residual() == 0


def test_non_grouplike_detected():
    F = TruncSeries.from_dict(AB, 2, {(): 1, ("a",): 1}, exact=True)
    assert F.shuffle_residual() == 1  # F(a)^2 = 1 but F(aa) = 0
    assert F.coproduct_residual() == 1


def test_letter_map_is_an_automorphism():
    M = np.array([[1, 2], [0, 1]], dtype=object)
    x = _lie((1, 2), 3)
    y = _lie((-1, 0), 1)
    lhs = (x.exp() * y.exp()).apply_letter_map(M)
    rhs = x.exp().apply_letter_map(M) * y.exp().apply_letter_map(M)
    assert lhs.distance(rhs) == 0
    with pytest.raises(Exception):
        x.apply_letter_map(np.array([[1, 1], [1, 1]], dtype=object))


def test_restrict_and_json_roundtrip():
    G = _lie((1, 2), 3, exact=False).exp()
    R = TruncSeries.from_json(G.to_json())
    assert R.distance(G) < 1e-15
    sub = G.restrict(("a",))
    assert abs(sub[("a", "a")] - 0.5) < 1e-15


def test_errors():
    with pytest.raises(SeriesError):
        TruncSeries.zero(("a", "a"), 2)
    with pytest.raises(SeriesError):
        TruncSeries.zero(AB, 2).inverse()
    with pytest.raises(SeriesError):
        TruncSeries.one(AB, 2).exp()


def test_relative_shuffle_residual_is_scale_free():
    G = _lie((10 ** 6, 3), 5, exact=False).exp()
    noisy = G.copy()
    noisy.levels[2] = noisy.levels[2] * (1 + 1e-15)
    assert noisy.shuffle_residual() > 1e-6
    assert noisy.shuffle_residual(relative=True) < 1e-14
    bad = TruncSeries.from_dict(AB, 2, {(): 1, ("a",): 1}, exact=False)
    assert bad.shuffle_residual(relative=True) == 1.0
