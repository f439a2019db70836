from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from iterated_shimura import forms, msymb, psl2z
from iterated_shimura.msymb import ModularSymbol, SymbolError
from iterated_shimura.psl2z import INF, SIGMA, Cusp, Mat2

mats = st.lists(st.sampled_from(["s", "t", "tt"]), max_size=6).map(
    lambda t: psl2z.eval_word(psl2z.reduce_tokens(t)))
polys = st.lists(st.integers(-3, 3), min_size=5, max_size=5)


@pytest.fixture(scope="module")
def S12():
    return msymb.build_space(12)


def test_hand_action():
    # even degree only: the sign of the matrix must not matter
    assert msymb.gamma_poly_action(SIGMA, [0, 0, 1]) == [1, 0, 0]
    assert msymb.gamma_poly_action(SIGMA, [0, 1, 0]) == [0, -1, 0]
    # translation (1 1; 0 1): X^2 -> (X - Y)^2
    assert msymb.gamma_poly_action(Mat2(1, 1, 0, 1), [0, 0, 1]) == [1, -2, 1]


@given(mats, mats, polys)
def test_left_action(g, h, P):
    lhs = msymb.gamma_poly_action(g * h, P)
    rhs = msymb.gamma_poly_action(g, msymb.gamma_poly_action(h, P))
    assert lhs == rhs


@pytest.mark.parametrize("k", range(4, 32, 2))
def test_cusp_dimension_is_twice_dim_cusp_forms(k):
    sp = msymb.build_space(k)
    assert sp.cusp_dim == 2 * forms.dim_cusp_forms(k)
    # one Eisenstein class, except in weight 2 (excluded) -- total = cusp + 1
    assert sp.dim == sp.cusp_dim + 1


def test_frozen_dimension_table():
    assert msymb.dimension_table([10, 12, 14, 16, 18, 20, 22]) == [
        (10, 1, 0), (12, 3, 2), (14, 1, 0), (16, 3, 2), (18, 3, 2), (20, 3, 2), (22, 3, 2)]


@given(polys, st.fractions(min_value=-3, max_value=3, max_denominator=9),
       st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_lift_independent_of_pivot(P, a, b):
    sp = msymb.build_space(6)
    assert sp.reduce_symbol(P, a, b, "oo") == sp.reduce_symbol(P, a, b, "0")


@given(polys, st.fractions(min_value=-3, max_value=3, max_denominator=9),
       st.fractions(min_value=-3, max_value=3, max_denominator=9),
       st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_symbols_are_additive_in_the_path(P, a, b, c):
    sp = msymb.build_space(6)
    ab, bc, ac = (sp.reduce_symbol(P, x, y) for x, y in ((a, b), (b, c), (a, c)))
    assert [x + y for x, y in zip(ab, bc)] == ac


@given(mats, polys, st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_translation_invariance(g, P, a):
    sp = msymb.build_space(6)
    s = ModularSymbol.single(P, a, INF)
    assert sp.coordinates(sp.lift_symbol(s)) == sp.coordinates(sp.lift_symbol(s.translate(g)))


def test_boundary_of_cusp_basis_vanishes(S12):
    for Q in S12.cusp_basis():
        assert not any(S12.boundary_of_lift(Q))


@given(polys.map(lambda p: p + [0] * 6), st.fractions(min_value=-3, max_value=3, max_denominator=9),
       st.fractions(min_value=-3, max_value=3, max_denominator=9))
def test_boundary_commutes_with_lift(P, a, b):
    sp = msymb.build_space(12)
    s = ModularSymbol.single(P, a, b)
    assert sp.boundary(s) == sp.boundary_of_lift(sp.lift_symbol(s))


def test_period_polynomial_ratios(delta):
    # Delta's period polynomial: odd part ~ 4X^9 - 25X^7 + 42X^5 - 25X^3 + 4X,
    # even part ~ (36/691)(X^10 - 1) - X^2 (X^2 - 1)^3
    pr = msymb.Pairing(delta)
    r = pr.periods(INF, Cusp(0, 1))  # r[n] = int_0^{i oo} Delta z^n dz
    from math import comb
    c = {10 - n: comb(10, n) * (-1) ** n * r[n] for n in range(11)}
    odd = np.array([c[j] for j in (9, 7, 5, 3, 1)]) / c[9] * 4
    assert np.allclose(odd, [4, -25, 42, -25, 4], rtol=1e-10)
    even = np.array([c[j] for j in (10, 8, 6, 4, 2, 0)]) / c[10] * Fraction(36, 691)
    ref = [36 / 691, -1, 3, -3, 1, -36 / 691]
    assert np.allclose(even.astype(complex), ref, rtol=1e-10)


def test_pairing_respects_manin_trick(delta, S12):
    pr = msymb.Pairing(delta)
    P = [0, 0, 1, 0, 0, 0, 0, 0, 0, 2, 0]
    for a in ["2/5", "-3/7"]:
        direct = pr(P, a, INF)
        lifted = pr(S12.lift(P, a, INF))
        assert abs(direct - lifted) < 1e-9 * max(1, abs(direct))


def test_pairing_matrix_rank_two(delta, S12):
    M = msymb.pairing_matrix(S12, delta)
    sv = np.linalg.svd(M, compute_uv=False)
    assert M.shape == (2, 2) and sv[-1] / sv[0] > 1e-4
    assert msymb.relation_pairings(S12, delta) < 1e-14


def test_symbol_errors(delta):
    with pytest.raises(SymbolError):
        ModularSymbol(12).add(1, [1, 2], 0, INF)
    with pytest.raises(SymbolError):
        msymb.pairing(ModularSymbol.single([1, 0, 0, 0, 0], 0, INF), delta)
    with pytest.raises(SymbolError):
        msymb.build_space(12).lift([0] * 11, 0, INF, pivot="1")


def test_json_dump(S12):
    import json
    d = json.loads(msymb.dumps_space(S12))
    assert d["dim"] == 3 and d["cusp_dim"] == 2 and len(d["cusp_basis"]) == 2
