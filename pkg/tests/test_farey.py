import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from markov_slopes.farey import (
    FareyFraction,
    continued_fraction,
    coprime_pairs,
    count_coprime_pairs,
    farey_parents,
    t_inverse,
    t_map,
    t_map_fraction,
    tree_path,
)


@st.composite
def unit_fractions(draw, max_q=500):
    q = draw(st.integers(2, max_q))
    p = draw(st.integers(1, q - 1).filter(lambda p: math.gcd(p, q) == 1))
    return FareyFraction(p, q)


@given(unit_fractions(), unit_fractions())
def test_order_matches_rationals(a, b):
    assert (a < b) == (Fraction(a.p, a.q) < Fraction(b.p, b.q))


def test_parse_and_reject():
    assert FareyFraction.parse(" 2/5 ") == FareyFraction(2, 5)
    assert FareyFraction.parse("1") == FareyFraction(1, 1)
    for bad in ("2/4", "3/2", "a/b", "-1/2"):
        with pytest.raises(ValueError):
            FareyFraction.parse(bad)


@given(unit_fractions())
def test_parents_are_neighbours_with_mediant(f):
    tri = farey_parents(f)
    left, right = tri.left, tri.right
    assert (left.p + right.p, left.q + right.q) == (f.p, f.q)
    assert right.p * left.q - left.p * right.q == 1
    assert tri.is_valid()


def test_root_parents():
    assert farey_parents(FareyFraction(0, 1)).left is None
    tri = farey_parents(FareyFraction(1, 1))
    assert (tri.left, tri.right) == (FareyFraction(0, 1), FareyFraction(1, 0))


@given(unit_fractions())
def test_t_map_round_trip(f):
    if 2 * f.p <= f.q:
        assert t_inverse(t_map_fraction(f)) == f


def test_t_map_values():
    assert t_map((3, 1)) == (2, 1)
    assert t_map_fraction(FareyFraction(1, 3)) == FareyFraction(1, 2)
    assert t_map_fraction(FareyFraction(1, 2)) == FareyFraction(1, 1)


@given(unit_fractions())
def test_continued_fraction_reconstructs(f):
    cf = continued_fraction(f.p, f.q)
    x = Fraction(cf[-1])
    for a in reversed(cf[:-1]):
        x = a + 1 / x
    assert x == Fraction(f.p, f.q)


@given(unit_fractions(60))
def test_tree_path_descends_to_fraction(f):
    lo, hi = (0, 1), (1, 1)
    node = (1, 2)
    for step in tree_path(f):
        if step == "L":
            hi = node
        else:
            lo = node
        node = (lo[0] + hi[0], lo[1] + hi[1])
    assert node == (f.p, f.q)


@pytest.mark.parametrize("n", [1, 2, 7, 50, 123])
def test_coprime_pair_count(n):
    brute = sum(1 for q in range(1, n + 1) for p in range(q + 1) if math.gcd(p, q) == 1)
    pairs = list(coprime_pairs(n))
    assert len(pairs) == count_coprime_pairs(n) == brute
    assert all(c.q >= c.p >= 0 for c in pairs)
