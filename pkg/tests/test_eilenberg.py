import random

import pytest
from hypothesis import given, strategies as st

from equicohom import linalg as la
from equicohom.bredon import BredonComplex
from equicohom.coefficients import NotOneVertex, constant_system, random_valid_system
from equicohom.covering import CoverSimplex, cover_action, representative
from equicohom.eilenberg import InvariantComplex, key_permutation, phi, phi_value, psi, verify_eilenberg
from equicohom.groupoid import PiWord, random_path
from equicohom.rings import GF, QQ, ZZ

from conftest import SPACES, free_circle

E = (0,)
ONE_VERTEX = ["s1", "t2", "k2", "w2", "pt"]


@pytest.mark.parametrize("name", ["s1", "s1_twisted", "w2_swap_twisted", "t2_constant", "t2_twisted",
                                  "k2_constant", "k2_orientation", "point_z2_constant", "pt"])
def test_fixture_pipelines_agree(docs, name):
    rep = verify_eilenberg(docs(name).coefficients)
    assert rep.ok, rep.failures
    assert rep.bredon.degrees == rep.invariant.degrees


def test_known_values(docs):
    rep = verify_eilenberg(docs("s1_twisted").coefficients)
    assert [str(rep.invariant[n]) for n in (0, 1)] == ["0", "ℤ/2"]
    assert verify_eilenberg(docs("t2_constant").coefficients).invariant.ranks() == (1, 2, 1)


def test_invariant_coboundary_examples(docs):
    assert la.to_lists(InvariantComplex(docs("s1").coefficients).coboundary(0)) == [[0]]
    assert la.to_lists(InvariantComplex(docs("s1_twisted").coefficients).coboundary(0)) == [[-2]]


@pytest.mark.parametrize("name", ONE_VERTEX)
def test_random_systems_give_equal_matrices(name):
    rng = random.Random(23)
    X = SPACES[name]()
    for _ in range(10):
        M = random_valid_system(X, ZZ, rng)
        B, IC = BredonComplex(M), InvariantComplex(M)
        for n in range(X.N):
            P0, P1 = key_permutation(IC, B, n), key_permutation(IC, B, n + 1)
            D = IC.coboundary(n)
            assert la.equal(ZZ, la.matrix(ZZ, [[D[i, j] for j in P0] for i in P1], B.coboundary(n).shape),
                            B.coboundary(n))


@given(st.integers(0, 5000), st.sampled_from(ONE_VERTEX), st.sampled_from([ZZ, QQ, GF(3)]))
def test_verify_on_random_systems(seed, name, R):
    M = random_valid_system(SPACES[name](), R, random.Random(seed), max_rank=2)
    assert verify_eilenberg(M, seed=seed).ok


def test_phi_is_equivariant_and_lift_independent(docs):
    M = docs("t2_twisted").coefficients
    B, IC = BredonComplex(M), InvariantComplex(M)
    rng = random.Random(4)
    XH = M.X.fixed_points(E)
    for n in range(3):
        K = B.compatible_basis(n)
        for j in range(K.shape[1]):
            f = K[:, j:j + 1]
            F = phi(IC, B, n, f)
            assert la.equal(ZZ, psi(IC, B, n, F), f)
            assert la.equal(ZZ, psi(IC, B, n, F, rng=rng), f)
            for x in XH.nondegenerate(n):
                y = representative(E, x, "v")
                assert la.equal(ZZ, phi_value(IC, B, n, f, y), f[B.block(n, E, x), :])
                u = random_path(XH, rng, "v", "v", 3)
                act = la.inverse(ZZ, M.evaluate(M.Pi.b(E, u)))
                lhs = phi_value(IC, B, n, f, cover_action(u, y))
                assert la.equal(ZZ, lhs, la.mul(ZZ, act, phi_value(IC, B, n, f, y)))
                assert la.equal(ZZ, IC.value(n, F, cover_action(u, y)), lhs)


def test_multi_vertex_rejected():
    with pytest.raises(NotOneVertex):
        verify_eilenberg(constant_system(free_circle(), ZZ))
