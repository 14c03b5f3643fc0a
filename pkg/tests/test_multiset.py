from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from toroidal.errors import DivisibilityViolation
from toroidal.ffield import build_context
from toroidal.multiset import CharacterMultiset, cancel, geometric_rank, geometric_sets, rho

ctx13 = build_context(13)
idx = st.lists(st.integers(0, 11), max_size=8)


def test_rho_examples():
    assert rho(ctx13, 2).indices == [0, 6]
    assert rho(ctx13, 1).indices == [0]
    assert rho(ctx13, 3).indices == [0, 4, 8]
    for a in (1, 2, 3, 4, 6, 12):
        assert rho(ctx13, -a) == rho(ctx13, a)
        assert all((a * j) % 12 == 0 for j in rho(ctx13, a).indices)
        assert len(rho(ctx13, a)) == a
    with pytest.raises(DivisibilityViolation):
        rho(ctx13, 5)


@given(idx, idx)
def test_multiset_algebra(x, y):
    A, B = CharacterMultiset.of(ctx13, x), CharacterMultiset.of(ctx13, y)
    assert len(A + B) == len(A) + len(B)
    assert (A & B) + (A - B) == A
    c, t = cancel(A, B)
    assert not (c & t)
    assert len(A) - len(c) == len(B) - len(t)
    assert A.inverse().inverse() == A
    assert A.shift(5).shift(7) == A
    assert A.product_index() == sum(x) % 12


def test_canonical_form():
    assert CharacterMultiset.of(ctx13, [6, 0, 13, 6]).counts == ((0, 1), (1, 1), (6, 2))
    assert CharacterMultiset.of(ctx13, [4, 8]).as_fractions() == [Fraction(1, 3), Fraction(2, 3)]


def test_geometric_sets():
    chi, theta = geometric_sets(2, -3, 1)
    assert sum(chi.values()) == 3 and sum(theta.values()) == 3
    assert geometric_rank(2, -3, 1) == (3, False)
    assert geometric_rank(-1, -1, 2) == (2, True)
