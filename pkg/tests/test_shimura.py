from __future__ import annotations

import pytest

from iterated_shimura import forms, nccoh, psl2z, shimura
from iterated_shimura.integrate import Integrator
from iterated_shimura.psl2z import INF, SIGMA, TAU


@pytest.fixture(scope="module")
def I2(omega_delta):
    return Integrator(omega_delta, 2)


@pytest.fixture(scope="module")
def cocycles(omega_delta, I2):
    return {a: shimura.build(a, omega_delta, 2, integrator=I2) for a in ("oo", "i", "rho")}


def test_fixed_points_give_trivial_generators(cocycles):
    one = cocycles["i"].group.one()
    assert cocycles["i"].X.distance(one) == 0
    assert cocycles["rho"].Y.distance(one) == 0


def test_at_infinity_X_equals_Y(cocycles):
    u = cocycles["oo"]
    assert u.X.distance(u.Y) < 1e-12


@pytest.mark.parametrize("a", ["oo", "i", "rho"])
def test_relations(cocycles, a):
    assert max(cocycles[a].relation_residuals().values()) < 1e-12


@pytest.mark.parametrize("a", ["oo", "i", "rho"])
def test_extension_matches_direct_transport(cocycles, a):
    words = shimura.sample_words(1, 12, 5)
    assert cocycles[a].extension_residual(words) < 1e-9


def test_cocycle_identity_in_multiprecision(cocycles):
    u = cocycles["i"].cocycle.lifted(30)
    assert u.projection < 1e-12
    assert nccoh.verify_cocycle(u, shimura.sample_pairs(2, 6, 5)) < 1e-12


def test_base_point_change(omega_delta, I2):
    words = shimura.sample_words(3, 10, 5)
    assert shimura.base_point_independence("i", "rho", omega_delta, 2, words, integrator=I2) < 1e-9
    assert shimura.base_point_independence("oo", "i", omega_delta, 2, words, integrator=I2) < 1e-9


def test_rho_sigma_identity(omega_delta, I2):
    assert shimura.rho_sigma_identity(omega_delta, 2, integrator=I2) < 1e-12


@pytest.mark.parametrize("a", ["1", "2/3", "3/5", "-5/7"])
def test_cf_decomposition(omega_delta, I2, a):
    r = shimura.cf_decomposition(a, omega_delta, 2, integrator=I2)
    assert r.residual < 1e-9
    assert r.orientation == "0->oo"
    assert r.as_dict()["cusp"]


@pytest.mark.parametrize("a", ["i", "rho"])
def test_cuspidal_witness(cocycles, a):
    rep = shimura.cuspidality(cocycles[a])
    assert rep.cuspidal and rep.witness_residual < 1e-9


def test_depth_one_values_are_shimura_integrals(delta, omega_delta, cocycles):
    # depth one of X at i oo is the period vector int_0^{i oo} f z^(m-1) dz
    from iterated_shimura import mellin
    X = cocycles["oo"].X
    for v in omega_delta.alphabet:
        assert abs(X[(v,)] + mellin.lambda_(delta, v.m).value) < 1e-12


def test_base_point_parsing():
    assert shimura.base_point("i") == 1j
    assert shimura.base_point("oo") == INF
    assert shimura.base_point("2/3") == psl2z.Cusp(2, 3)
    assert abs(shimura.RHO ** 2 - shimura.RHO + 1) < 1e-15
    assert psl2z.mobius(TAU, shimura.RHO) is not None and SIGMA is not None


def test_unclosed_alphabet_rejected(delta):
    with pytest.raises(ValueError):
        shimura.build("i", forms.OmegaForm(forms.letters(delta, [1])), 1)
