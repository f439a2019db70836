from __future__ import annotations

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from iterated_shimura import forms, psl2z
from iterated_shimura.forms import FormError, FormLetter
from iterated_shimura.psl2z import SIGMA, TAU, Mat2

RAMANUJAN_TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920,
                 534612, -370944, -577738, 401856, 1217160]


def _eta_product(N):
    # q * prod (1 - q^n)^24 by plain integer polynomial multiplication
    poly = [1] + [0] * N
    for n in range(1, N + 1):
        for _ in range(24):
            for i in range(N, n - 1, -1):
                poly[i] -= poly[i - n]
    return [0] + poly[:N]


def test_delta_coefficients_frozen(delta):
    assert list(delta.coefficients[1:16]) == RAMANUJAN_TAU


def test_delta_matches_eta_product():
    assert list(forms.delta(40).coefficients) == _eta_product(40)


@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (3, 7), (4, 9), (5, 8)])
def test_ramanujan_multiplicativity(delta, m, n):
    c = delta.coefficients
    assert c[m * n] == c[m] * c[n]


def test_hecke_at_p_squared(delta):
    c = delta.coefficients
    for p in (2, 3, 5, 7):
        assert c[p * p] == c[p] ** 2 - p ** 11


def test_delta_at_i_closed_form(delta):
    exact = mpmath.gamma(0.25) ** 24 / (2 ** 24 * mpmath.pi ** 18)
    assert abs(complex(forms.evaluate(delta, 1j)) - float(exact)) < 1e-17


def test_delta_e4_leading_coefficients():
    f = forms.delta_e4(10)
    assert f.weight == 16
    assert list(f.coefficients[1:4]) == [1, 216, -3348]


@pytest.mark.parametrize("k,d", [(4, 0), (10, 0), (12, 1), (14, 0), (16, 1), (24, 2), (26, 1), (36, 3)])
def test_cusp_dimensions(k, d):
    assert forms.dim_cusp_forms(k) == d


@given(st.floats(-0.5, 0.5), st.floats(0.3, 2.0))
def test_modularity(delta, x, y):
    z = complex(x, y)
    f = forms.evaluate
    assert abs(f(delta, -1 / z) - z ** 12 * f(delta, z)) <= 1e-12 * max(1.0, abs(z ** 12 * f(delta, z)))
    assert abs(f(delta, z + 1) - f(delta, z)) <= 1e-14


def test_slash_invariance(delta):
    z = np.array([0.1 + 0.8j, -0.3 + 1.2j])
    h = forms.slash(delta, Mat2(2, 1, 1, 1))
    assert np.allclose(h(z), delta(z), rtol=1e-11, atol=0)
    with pytest.raises(FormError):
        forms.slash(delta, (0, 1, 1, 0))


def test_closure_of_1_and_11_is_all_exponents(delta):
    alpha = forms.close_alphabet(forms.letters(delta, [1, 11]))
    assert [v.m for v in alpha] == list(range(1, 12))
    assert forms.is_closed(alpha)


def test_sigma_pullback_swaps_m_and_k_minus_m(delta):
    alpha = forms.letters(delta)
    P = forms.pullback_matrix(SIGMA, alpha)
    for j, v in enumerate(alpha):
        col = {alpha[i].m: P[i, j] for i in range(len(alpha)) if P[i, j] != 0}
        assert col == {12 - v.m: (-1) ** (v.m - 1)}


@pytest.mark.parametrize("g", [SIGMA, TAU, Mat2(2, 1, 1, 1), Mat2(1, 3, 0, 1)])
def test_pullback_against_pointwise_substitution(delta, g):
    alpha = forms.letters(delta)
    P = forms.pullback_matrix(g, alpha).astype(float)
    a, b, c, d = g.tuple()
    z = np.array([0.2 + 0.9j, -0.4 + 1.5j, 0.05 + 0.6j])
    gz = (a * z + b) / (c * z + d)
    dgz = 1 / (c * z + d) ** 2
    fz, fgz = delta(z), delta(gz)
    for j, v in enumerate(alpha):
        lhs = fgz * gz ** (v.m - 1) * dgz
        rhs = sum(P[i, j] * fz * z ** (alpha[i].m - 1) for i in range(len(alpha)))
        assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-14)


def test_letter_action_is_a_right_representation(delta):
    alpha = forms.letters(delta)
    A = forms.letter_action(SIGMA, alpha)
    B = forms.letter_action(TAU, alpha)
    AB = forms.letter_action(SIGMA * TAU, alpha)
    # (gh)_* = g_* h_* on the formal variables
    assert np.allclose(AB, A @ B)


def test_symmetric_power_action_is_integral():
    M = forms.symmetric_power_action(TAU, 6)
    assert M.shape == (5, 5)
    assert all(int(x) == x for x in M.ravel())


def test_form_file_roundtrip(tmp_path, delta):
    p = tmp_path / "f.json"
    p.write_text(forms.dump_form(forms.delta(20)))
    g = forms.load_form(str(p))
    assert g.coefficients == forms.delta(20).coefficients and g.weight == 12


def test_bad_forms():
    with pytest.raises(FormError):
        forms.CuspForm("x", 11, (0, 1))
    with pytest.raises(FormError):
        forms.CuspForm("x", 12, (1, 1))
    with pytest.raises(FormError):
        forms.letters(forms.delta(10), [12])[0]
    with pytest.raises(FormError):
        forms.pullback_matrix(SIGMA, forms.letters(forms.delta(10), [1]))


def test_letter_str():
    assert "Delta" in str(FormLetter(forms.delta(10), 3))
    assert psl2z.SIGMA is SIGMA


def test_delta_at_5i_is_dominated_by_two_terms(delta):
    q = float(mpmath.exp(-10 * mpmath.pi))
    dev = abs(complex(forms.evaluate(delta, 5j)) / q - 1)
    # relative deviation from a_1 q is |a_2| q + O(q^2), not below 1e-20
    assert abs(dev - 24 * q) < 1e-3 * 24 * q
