import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from maskfree.combinat import (K_MAX, PairPartition, Permutation, catalan, double_factorial, enumerate_nc2,
                               enumerate_pair_partitions, gamma_pi, gamma_pi_orbit_count, gamma_pi_orbits,
                               is_noncrossing, orbit_labels)
from maskfree.errors import DomainError, SizeLimitError


def brute_pairings(k):
    """All perfect matchings of 1..2k via permutations, deduplicated."""
    seen = set()
    for perm in itertools.permutations(range(1, 2 * k + 1)):
        pairs = frozenset(tuple(sorted(perm[i:i + 2])) for i in range(0, 2 * k, 2))
        seen.add(pairs)
    return seen


def crosses(pairs):
    return any(a < c < b < d for (a, b), (c, d) in itertools.permutations(pairs, 2))


def brute_orbits(pairs, m):
    mate = {}
    for a, b in pairs:
        mate[a], mate[b] = b, a
    step = {r: mate[r] % m + 1 for r in range(1, m + 1)}
    left, count = set(step), 0
    while left:
        r = left.pop()
        count += 1
        r = step[r]
        while r in left:
            left.remove(r)
            r = step[r]
    return count


@pytest.mark.parametrize("k", range(1, 5))
def test_enumeration_matches_brute_force(k):
    got = {frozenset(pi.pairs) for pi in enumerate_pair_partitions(k)}
    assert got == brute_pairings(k)
    nc = {frozenset(pi.pairs) for pi in enumerate_nc2(k)}
    assert nc == {p for p in brute_pairings(k) if not crosses(p)}


@pytest.mark.parametrize("k", range(1, K_MAX + 1))
def test_counts(k):
    assert len(enumerate_nc2(k)) == catalan(k)
    if k <= 6:
        assert len(enumerate_pair_partitions(k)) == double_factorial(2 * k - 1)


def test_canonical_order():
    assert [str(p) for p in enumerate_pair_partitions(2)] == ["(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)"]
    nc = enumerate_nc2(3)
    assert list(nc) == sorted(nc, key=lambda p: p.pairs)
    allp = [p for p in enumerate_pair_partitions(3) if is_noncrossing(p)]
    assert list(nc) == allp


@pytest.mark.parametrize("k", range(1, 6))
def test_orbit_count_fact(k):
    for pi in enumerate_pair_partitions(k):
        c = gamma_pi_orbit_count(pi)
        assert c == brute_orbits(pi.pairs, 2 * k)
        assert c <= k + 1
        assert (c == k + 1) == is_noncrossing(pi)


def test_gamma_pi_example():
    pi = PairPartition.parse("(1,4)(2,3)")
    g = gamma_pi(pi)
    assert [g(r) for r in range(1, 5)] == [1, 4, 3, 2]
    assert gamma_pi_orbits(pi) == [frozenset({1}), frozenset({2, 4}), frozenset({3})]
    assert orbit_labels(pi) == [0, 1, 2, 1]


def test_permutation_cycles():
    p = Permutation((2, 1, 3))
    assert p.size == 3
    assert sorted(map(sorted, p.cycles())) == [[1, 2], [3]]


def test_parse_round_trip_and_canonical():
    pi = PairPartition.parse("(3,4)(2,1)")
    assert str(pi) == "(1,2)(3,4)"
    assert PairPartition(((4, 3), (1, 2))) == pi
    assert pi.k == 2


@pytest.mark.parametrize("text", ["(1,2)(2,3)", "(1,2)(4,5)", "(1,1)", "(1,2", ""])
def test_bad_partitions(text):
    with pytest.raises(DomainError):
        PairPartition.parse(text)


def test_size_limits():
    with pytest.raises(SizeLimitError):
        enumerate_nc2(K_MAX + 1)
    with pytest.raises(DomainError):
        enumerate_pair_partitions(0)


def test_catalan_and_double_factorial():
    assert [catalan(m) for m in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]
    assert catalan(30) == math.comb(60, 30) // 31
    assert [double_factorial(m) for m in (1, 3, 5, 7)] == [1, 3, 15, 105]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.permutations(range(1, 2 * k + 1))))
def test_random_pairing_properties(perm):
    pairs = tuple((perm[i], perm[i + 1]) for i in range(0, len(perm), 2))
    pi = PairPartition(pairs)
    assert is_noncrossing(pi) == (not crosses(pi.pairs))
    assert gamma_pi_orbit_count(pi) == brute_orbits(pi.pairs, len(perm))
    orbits = gamma_pi_orbits(pi)
    assert sorted(r for o in orbits for r in o) == list(range(1, len(perm) + 1))
    assert PairPartition.parse(str(pi)) == pi
