import itertools

import pytest
from hypothesis import given, strategies as st

from equicohom.groups import cyclic, subgroups, trivial_group
from equicohom.simplicial import (NonFreeAction, SimplicialError, SimplicialMap, SizeGuardExceeded,
                                  fiber_product, from_nondegenerate, from_tables, identity_map,
                                  identity_violations, point, product, quotient, standard_simplex,
                                  trivial_action, validate)

from conftest import SPACES, circle, free_circle, klein, torus, wedge_swap


def _tables(X):
    return ([list(l) for l in X.levels], [[dict(f) for f in fs] for fs in X.face],
            [[dict(s) for s in ss] for ss in X.degeneracy])


def test_standard_simplex_and_circle_validate():
    assert validate(standard_simplex(1, 2)).ok
    S1 = circle().base
    assert validate(S1).ok
    # level 2 holds s1s0(v), s0(e) and s1(e)
    assert S1.size() == (1, 2, 3)
    assert set(S1.levels[2]) == {"s1s0(v)", "s0(e)", "s1(e)"}


def test_corrupted_circle_face_is_caught_as_degeneracy_identity():
    S1 = circle().base
    levels, face, degen = _tables(S1)
    levels[0].append("w")
    face[1][0]["e"] = "w"
    degen[0][0]["w"] = degen[0][0]["v"]
    bad = from_tables(2, levels, face, degen)
    rep = validate(bad)
    assert not rep.ok and not rep.structural
    assert rep.violation.identity == "∂0s0 = id"
    assert rep.violation.simplex == "w"


def test_structural_errors_reported_separately():
    S1 = circle().base
    levels, face, degen = _tables(S1)
    face[1][0]["e"] = "nowhere"
    rep = validate(from_tables(2, levels, face, degen))
    assert rep.structural and rep.violation is None
    assert "nowhere" in rep.structural[0]
    del face[1][1]["e"]
    assert any("not defined" in m for m in validate(from_tables(2, levels, face, degen)).structural)


def test_nondegenerate_simplices():
    assert standard_simplex(2, 2).nondegenerate(2) == ((0, 1, 2),)
    assert circle().base.nondegenerate(1) == ("e",)
    assert set(torus().base.nondegenerate(2)) == {"U", "L"}


@pytest.mark.parametrize("name", sorted(SPACES))
def test_fixture_spaces_satisfy_all_identities(name):
    X = SPACES[name]()
    assert identity_violations(X.base, first_only=False) == []
    assert X.base.decomposition_conflicts() == []
    assert X.action_violations() == []


@pytest.mark.parametrize("name", sorted(SPACES))
def test_eilenberg_zilber_decomposition(name):
    X = SPACES[name]().base
    for n in range(X.N + 1):
        for x in X.levels[n]:
            y, eta = X.decompose(x)
            assert not X.is_degenerate(y)
            assert X.apply(y, eta) == x
            assert list(eta) == sorted(eta) and set(eta) == set(range(X.dim(y) + 1))


@pytest.mark.parametrize("name", sorted(SPACES))
def test_fixed_points_are_monotone(name):
    X = SPACES[name]()
    subs = subgroups(X.group)
    assert X.fixed_points(subs[0]).levels == X.base.levels
    for H1, H2 in itertools.product(subs, subs):
        if set(H1) <= set(H2):
            for n in range(X.N + 1):
                assert set(X.fixed_points(H2).levels[n]) <= set(X.fixed_points(H1).levels[n])
    for H in subs:
        assert validate(X.fixed_points(H)).ok


def test_fixed_points_examples():
    W2 = wedge_swap()
    F = W2.fixed_points((0, 1))
    assert F.levels[0] == ("v",)
    assert all(F.nondegenerate(n) == () for n in range(1, F.N + 1))
    assert all(len(l) == 0 for l in free_circle().fixed_points((0, 1)).levels)


def test_products():
    S1 = circle().base
    P, pr1, pr2 = product(point(2), S1)
    assert P.size() == S1.size()
    assert pr1.violations() == [] and pr2.violations() == []
    D, _, _ = product(standard_simplex(0, 2), standard_simplex(0, 2))
    assert D.size() == (1, 1, 1)
    SS, _, _ = product(S1, S1)
    assert len(SS.levels[1]) == 4
    assert validate(SS).ok
    with pytest.raises(SizeGuardExceeded):
        product(S1, S1, size_guard=3)


def test_fiber_products():
    T = torus().base
    idm = identity_map(T)
    P, p1, p2 = fiber_product(idm, idm)
    assert P.size() == T.size() and validate(P).ok
    for n in range(P.N + 1):
        for x in P.levels[n]:
            assert idm(p1(x)) == idm(p2(x))
    # double cover S1_2 -> S1 pulled back along the vertex
    S12 = free_circle().base
    S1 = circle().base
    cover = SimplicialMap(S12, S1, tuple(
        {x: S1.apply(*((("v" if S12.decompose(x)[0] in ("a", "b") else "e"),) + (S12.decompose(x)[1],)))
         for x in lvl} for lvl in S12.levels))
    assert cover.violations() == []
    pt = point(2)
    inc = SimplicialMap(pt, S1, tuple({x: x for x in lvl} for lvl in pt.levels))
    F, q1, q2 = fiber_product(cover, inc)
    assert [len(l) for l in F.levels] == [2, 2, 2]
    assert all(F.nondegenerate(n) == () for n in (1, 2))


def test_quotients():
    S1 = circle()
    Q = quotient(S1)
    assert Q.size() == S1.base.size()
    Q2 = quotient(free_circle())
    assert Q2.size() == S1.base.size() and validate(Q2).ok
    assert len(Q2.nondegenerate(1)) == 1
    with pytest.raises(NonFreeAction) as exc:
        quotient(wedge_swap())
    assert exc.value.simplex == "v"


def test_loader_rejects_unknown_faces():
    with pytest.raises(SimplicialError):
        from_nondegenerate(2, [["v"], {"e": ["v", "w"]}])


@given(st.integers(1, 3), st.integers(1, 4))
def test_standard_simplex_counts(n, N):
    D = standard_simplex(n, N)
    assert validate(D).ok
    from math import comb
    for q in range(N + 1):
        assert len(D.levels[q]) == comb(n + q + 1, q + 1)
        assert len(D.nondegenerate(q)) == comb(n + 1, q + 1)


def test_klein_and_torus_differ_only_in_one_face():
    assert torus().base.d(0, "L") != klein().base.d(0, "L")
