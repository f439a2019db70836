from __future__ import annotations

from fractions import Fraction

from hypothesis import given, strategies as st

from iterated_shimura import linalg

small = st.integers(-4, 4)
matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c),
                                                            min_size=r, max_size=r)))


def test_hand_rank_and_nullspace():
    A = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert linalg.rank(A) == 2
    (v,) = linalg.nullspace(A)
    assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in A)


def test_solve_inconsistent():
    assert linalg.solve([[1, 1], [1, 1]], [1, 2]) is None
    x = linalg.solve([[2, 0], [0, 3]], [1, 1])
    assert list(x) == [Fraction(1, 2), Fraction(1, 3)]


@given(matrices)
def test_rank_nullity(A):
    n = len(A[0])
    N = linalg.nullspace(A, n)
    assert linalg.rank(A) + len(N) == n
    for v in N:
        for row in A:
            assert sum(Fraction(a) * x for a, x in zip(row, v)) == 0


@given(matrices)
def test_subspace_reduce_kills_span(A):
    n = len(A[0])
    S = linalg.Subspace(A, n)
    for row in A:
        assert S.contains(row)
    assert S.rank == linalg.rank(A)
