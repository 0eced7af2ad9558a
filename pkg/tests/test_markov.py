import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from markov_slopes import markov
from markov_slopes.farey import FareyFraction, coprime_pairs
from markov_slopes.markov import (
    MarkovCache,
    MarkovTriple,
    chebyshev_trace,
    cohn_trace,
    label_table,
    labelled_nodes,
    load_cache_from_env,
    markov_distance,
    markov_number,
    markov_triple_at,
)

TREE = {"0/1": 1, "1/1": 2, "1/2": 5, "1/3": 13, "2/3": 29, "2/5": 194, "3/5": 433}


@pytest.mark.parametrize("frac,label", TREE.items())
def test_tree_values(frac, label):
    assert markov_number(FareyFraction.parse(frac)) == label


def markov_numbers_up_to(bound: int) -> set[int]:
    """All Markov numbers <= bound, by mutating triples from (1, 1, 1)."""
    seen, found = set(), set()
    stack = [(1, 1, 1)]
    while stack:
        t = tuple(sorted(stack.pop()))
        if t in seen or t[2] > bound:
            continue
        seen.add(t)
        found.update(t)
        x, y, z = t
        stack += [(3 * y * z - x, y, z), (x, 3 * x * z - y, z), (x, y, 3 * x * y - z)]
    return found


def test_labels_are_exactly_the_markov_numbers():
    bound = 10**6
    # a label with denominator q is at least an odd-index Fibonacci number F(2q - 1)
    labels = {m for m in label_table(16).values() if m <= bound}
    assert labels == markov_numbers_up_to(bound)


def test_labels_injective_small():
    table = label_table(80)
    assert len(set(table.values())) == len(table)


def test_cohn_trace_oracle():
    for c in coprime_pairs(60):
        assert cohn_trace((c.p, c.q)) == 3 * markov_number((c.p, c.q))


def test_nodes_form_markov_triples():
    for node in labelled_nodes(25):
        assert node.triple().is_valid()


def test_triple_mutation():
    t = MarkovTriple(1, 5, 13)
    assert t.is_valid()
    assert t.mutate(2) == MarkovTriple(1, 5, 2)
    assert not MarkovTriple(1, 5, 12).is_valid()


@given(st.integers(2, 40).flatmap(lambda q: st.tuples(st.just(q), st.integers(1, q // 2))))
def test_triple_at_satisfies_cubic(qp):
    q, p = qp
    if math.gcd(p, q) != 1:
        return
    n1, n, n2 = markov_triple_at(FareyFraction(p, q))
    assert n1 * n1 + n * n + n2 * n2 == 3 * n1 * n * n2


def test_markov_distance_examples():
    assert markov_distance(2, 0) == Fraction(7, 3)
    assert markov_distance(2, 2) == Fraction(34, 3)
    assert markov_distance(5, 2) == 194


@pytest.mark.parametrize("q,p,g", [(1, 0, 3), (2, 1, 4), (3, 1, 2), (5, 3, 5)])
def test_markov_distance_matches_cosh_form(q, p, g):
    m = markov_number((p, q))
    expected = mpmath.mpf(2) / 3 * mpmath.cosh(g * mpmath.acosh(mpmath.mpf(3 * m) / 2))
    d = markov_distance(g * q, g * p)
    assert d.denominator in (1, 3)
    assert abs(mpmath.mpf(d.numerator) / d.denominator - expected) < mpmath.mpf(10) ** -100 * expected


def test_chebyshev_trace_recurrence():
    assert [chebyshev_trace(3, k) for k in range(5)] == [2, 3, 7, 18, 47]


def test_cache_round_trip(tmp_path):
    cache = MarkovCache()
    for c in coprime_pairs(20):
        cache.label((c.p, c.q))
    path = tmp_path / "labels.tsv"
    cache.save(path)
    loaded = MarkovCache.load(path, sample_rate=1.0)
    assert dict(loaded.items()) == dict(cache.items())


def test_cache_rejects_corruption(tmp_path):
    cache = MarkovCache()
    for c in coprime_pairs(10):
        cache.label((c.p, c.q))
    path = tmp_path / "labels.tsv"
    cache.save(path)
    text = path.read_text().replace("2/5\t194", "2/5\t195")
    path.write_text(text)
    with pytest.raises(ValueError):
        MarkovCache.load(path, sample_rate=1.0)
    path.write_text("junk\n")
    with pytest.raises(ValueError):
        MarkovCache.load(path)


def test_cache_conflicting_insert():
    cache = MarkovCache()
    cache.insert((1, 2), 5)
    with pytest.raises(RuntimeError):
        cache.insert((1, 2), 6)


def test_cache_from_environment(tmp_path, monkeypatch):
    cache = MarkovCache()
    cache.label((3, 7))
    path = tmp_path / "snap.tsv"
    cache.save(path)
    previous = markov.default_cache()
    monkeypatch.setenv("MARKOV_CACHE", str(path))
    try:
        loaded = load_cache_from_env()
        assert loaded is markov.default_cache()
        assert (3, 7) in loaded
    finally:
        markov.set_default_cache(previous)
    monkeypatch.delenv("MARKOV_CACHE")
    assert load_cache_from_env() is None


def test_rejects_fractions_outside_unit_interval():
    with pytest.raises(ValueError):
        markov_number((2, 4))
    with pytest.raises(ValueError):
        markov_distance(1, 2)
