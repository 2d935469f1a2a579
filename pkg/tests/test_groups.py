import itertools

import pytest
from hypothesis import given, strategies as st

from equicohom.groups import (FiniteGroup, GroupError, OrbitCategory, cyclic, subgroups,
                              symmetric3, trivial_group)

GROUPS = [trivial_group(), cyclic(2), cyclic(3), cyclic(4), symmetric3(), cyclic(6)]


def brute_subgroups(G):
    out = set()
    for r in range(1, G.order + 1):
        for S in itertools.combinations(range(G.order), r):
            s = set(S)
            if G.identity in s and all(G.mul(a, G.inv(b)) in s for a in s for b in s):
                out.add(tuple(sorted(s)))
    return out


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_subgroups_against_subset_enumeration(G):
    subs = subgroups(G)
    assert set(subs) == brute_subgroups(G)
    assert len(subs) == len(set(subs))


def test_subgroup_counts():
    assert subgroups(trivial_group()) == [(0,)]
    assert [len(H) for H in subgroups(cyclic(2))] == [1, 2]
    assert len(subgroups(symmetric3())) == 6


def test_bad_table_rejected():
    with pytest.raises(GroupError):
        FiniteGroup.from_names(["e", "t"], [["e", "t"], ["t", "t"]])


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_hom_sets_match_brute_force(G):
    O = OrbitCategory(G)
    subs = subgroups(G)
    for H, K in itertools.product(subs, subs):
        cosets = {frozenset(G.mul(g, k) for k in K) for g in range(G.order)
                  if all(G.mul(G.mul(G.inv(g), h), g) in K for h in H)}
        homs = O.hom_set(H, K)
        assert {frozenset(G.mul(m.rep, k) for k in K) for m in homs} == cosets
        assert len(homs) == len(cosets)
        if H == K:
            assert O.identity(H) in homs


def test_hom_set_examples():
    Z2 = cyclic(2)
    O = OrbitCategory(Z2)
    e, G = (0,), (0, 1)
    assert len(O.hom_set(e, G)) == 1
    assert O.hom_set(G, e) == []
    assert len(O.hom_set(e, e)) == 2
    t = O.morphism(e, e, 1)
    assert O.compose(t, t) == O.identity(e)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_orbit_category_laws(G):
    O = OrbitCategory(G)
    arrows = O.all_morphisms()
    for m in arrows:
        assert O.compose(O.identity(m.source), m) == m
        assert O.compose(m, O.identity(m.target)) == m
    by_source = {}
    for m in arrows:
        by_source.setdefault(m.source, []).append(m)
    for a in arrows:
        for b in by_source[a.target]:
            for c in by_source[b.target]:
                assert O.compose(O.compose(a, b), c) == O.compose(a, O.compose(b, c))


@given(st.integers(0, 5), st.integers(0, 5))
def test_coset_representative_independent(i, j):
    G = symmetric3()
    O = OrbitCategory(G)
    for H, K in itertools.product(subgroups(G), subgroups(G)):
        g = i % G.order
        k = K[j % len(K)]
        assert O.is_morphism(H, K, g) == O.is_morphism(H, K, G.mul(g, k))
        if O.is_morphism(H, K, g):
            assert O.morphism(H, K, g) == O.morphism(H, K, G.mul(g, k))
