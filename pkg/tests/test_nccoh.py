from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from iterated_shimura import nccoh, psl2z
from iterated_shimura.nccoh import CocycleError
from iterated_shimura.psl2z import SIGMA, TAU, Mat2

words = st.lists(st.sampled_from(["s", "t", "tt"]), max_size=8).map(psl2z.reduce_tokens)


@pytest.fixture(scope="module")
def N():
    return nccoh.synthetic_group(4, 3)


@pytest.fixture(scope="module")
def u(N):
    X, Y = nccoh.synthetic_pair(N, random.Random(7))
    return nccoh.cocycle_from_pair(X, Y, N, tol=0)


def test_synthetic_action_is_a_homomorphism(N):
    a = N.random_element(random.Random(1), grouplike=True)
    b = N.random_element(random.Random(2), grouplike=True)
    g, h = Mat2(2, 1, 1, 1), TAU
    assert N.distance(N.act(g * h, a), N.act(g, N.act(h, a))) == 0
    assert N.distance(N.act(g, N.mul(a, b)), N.mul(N.act(g, a), N.act(g, b))) == 0
    assert N.distance(N.act(SIGMA, N.act(SIGMA, a)), a) == 0


def test_synthetic_pair_satisfies_relations_exactly(u):
    assert u.residuals == {"sigma": 0, "tau": 0}


@given(words, words)
def test_cocycle_identity_exact(u, w1, w2):
    assert nccoh.verify_cocycle(u, [(w1, w2)]) == 0


def test_coboundary_matches_closed_form(N):
    n = N.random_element(random.Random(3), grouplike=True)
    c = nccoh.Cocycle(*nccoh.coboundary_pair(n, N), N, tol=0)
    for w in psl2z.enumerate_words(5):
        g = psl2z.eval_word(w)
        assert N.distance(c(g), N.mul(N.inv(n), N.act(g, n))) == 0


def test_equivalence_under_change_of_pair(u, N):
    n = N.random_element(random.Random(4), grouplike=True)
    u2 = nccoh.Cocycle(*nccoh.change_pair(u.X, u.Y, n, N), N, tol=0)
    assert nccoh.equivalent(u, u2, n, psl2z.enumerate_words(5)) == 0
    # and a wrong witness is detected
    m = N.random_element(random.Random(5), grouplike=True)
    assert nccoh.equivalent(u, u2, m, psl2z.enumerate_words(3)) > 0


def test_normalize_sigma(u, N):
    v, n = nccoh.normalize_sigma(u)
    assert N.distance(v.X, N.one()) == 0
    assert nccoh.equivalent(u, v, n, psl2z.enumerate_words(4)) == 0


def test_relations_checked(N):
    bad = N.random_element(random.Random(9))
    with pytest.raises(CocycleError):
        nccoh.cocycle_from_pair(bad, N.one(), N, tol=0)
    t = nccoh.trivial_cocycle(N)
    assert N.distance(t(psl2z.parse_word("s.t.s.tt")), N.one()) == 0


def test_random_words_are_normal(rng):
    for w in nccoh.random_words(rng, 200, 6):
        psl2z.check_word(w)
        assert psl2z.word_length(w) <= 6
        assert psl2z.normal_form(psl2z.eval_word(w)) == w


def test_coboundary_is_cuspidal_with_its_witness(N):
    n = N.random_element(random.Random(11), grouplike=True)
    c = nccoh.Cocycle(*nccoh.coboundary_pair(n, N), N, tol=0)
    rep = nccoh.is_cuspidal(c)
    assert rep.cuspidal and rep.depth_reached == 3 and rep.witness_residual == 0


def test_noncuspidal_pair_rejected_at_depth_one(N):
    X, Y = nccoh.noncuspidal_pair(N)
    rep = nccoh.is_cuspidal(nccoh.Cocycle(X, Y, N, tol=0))
    assert not rep.cuspidal and rep.obstruction_depth == 1
    assert rep.as_dict()["cuspidal"] is False


def test_enforce_relations_projects_perturbed_pair(u, N):
    import mpmath
    P = nccoh.PrecisionGroup(N, 30)
    with mpmath.workdps(30):
        X = P.lift(u.X.to_float())
        Y = P.lift(u.Y.to_float())
        eps = X.copy()
        eps.levels[2] = eps.levels[2] + mpmath.mpf("1e-12")
        X2, Y2 = nccoh.enforce_relations(eps, Y, P)
        r = nccoh.relation_residuals(X2, Y2, P)
    assert max(r.values()) < 1e-25


def test_gamma2_cosets():
    C = nccoh.gamma2_cosets()
    assert C.index == 6
    with pytest.raises(CocycleError):
        nccoh.CosetSystem([psl2z.IDENTITY, Mat2(1, 2, 0, 1)], nccoh.gamma2_member)
    with pytest.raises(CocycleError):
        nccoh.CosetSystem([psl2z.IDENTITY, SIGMA], nccoh.gamma2_member)


def test_shapiro_induction_exact(u, N, rng):
    C = nccoh.gamma2_cosets()
    ind = nccoh.shapiro_induce(u, C, N)
    assert nccoh.verify_cocycle(ind, nccoh.random_pairs(rng, 40, 6)) == 0
    elems = nccoh.subgroup_elements(C, nccoh.random_words(rng, 40, 6))
    assert all(C.member(g) for g in elems)
    assert nccoh.projection_residual(ind, elems) == 0
    # the induced pair determines the induced cocycle
    X, Y = ind.pair()
    v = nccoh.Cocycle(X, Y, ind.group, tol=0)
    for w in nccoh.random_words(rng, 20, 6):
        assert ind.group.distance(v(w), ind(w)) == 0
