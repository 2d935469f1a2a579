import random

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from equicohom import linalg as la
from equicohom.homology import (ComplexError, FinCochainComplex, cohomology, cohomology_basis,
                                induced_map)
from equicohom.rings import GF, QQ, ZZ
from equicohom.spectral import FilteredComplex, FiltrationError, spectral_pages


def _complex(R, ranks, ds):
    return FinCochainComplex(R, tuple(ranks), tuple(la.matrix(R, d, (ranks[i + 1], ranks[i]))
                                                     for i, d in enumerate(ds)))


def test_circle_cellular_cohomology():
    C = _complex(ZZ, [1, 1, 0], [[[0]], []])
    assert cohomology(C).ranks() == (1, 1)
    tw = _complex(ZZ, [1, 1, 0], [[[-2]], []])
    H = cohomology(tw)
    assert H[0].rank == 0 and H[1].rank == 0 and H[1].torsion == (2,)
    assert str(H[1]) == "ℤ/2"


def test_rp2_cohomology_depends_on_ring():
    ds = [[[0]], [[2]], []]
    assert str(cohomology(_complex(ZZ, [1, 1, 1, 0], ds))[2]) == "ℤ/2"
    assert cohomology(_complex(QQ, [1, 1, 1, 0], ds)).ranks() == (1, 0, 0)
    assert cohomology(_complex(GF(2), [1, 1, 1, 0], ds)).ranks() == (1, 1, 1)


def test_complex_rejects_nonzero_square():
    with pytest.raises(ComplexError):
        _complex(ZZ, [1, 1, 1], [[[1]], [[1]]])


def _random_complex(seed, R=ZZ, top=3):
    """d = P∘(elementary pairs)∘P⁻¹ with known cohomology.

    Multipliers form a divisibility chain so they are already invariant factors.
    """
    rng = random.Random(seed)
    n_single = [rng.randint(0, 2) for _ in range(top + 1)]
    n_pairs = [rng.randint(0, 2) for _ in range(top)]
    mult = [[rng.choice([1, 2, 4]) for _ in range(k)] for k in n_pairs]
    ranks = [n_single[n] + (n_pairs[n] if n < top else 0) + (n_pairs[n - 1] if n else 0)
             for n in range(top + 1)]
    ds = []
    for n in range(top):
        D = la.zeros(R, ranks[n + 1], ranks[n])
        src0 = n_single[n]
        tgt0 = n_single[n + 1] + (n_pairs[n + 1] if n + 1 < top else 0)
        for k in range(n_pairs[n]):
            D[tgt0 + k, src0 + k] = R(mult[n][k])
        ds.append(D)
    P = [la.identity(R, r) for r in ranks]
    for n, r in enumerate(ranks):
        for _ in range(3 * r):
            if r < 2:
                break
            i, j = rng.sample(range(r), 2)
            E = la.identity(R, r)
            E[i, j] = R(rng.choice([-1, 1, 2]))
            P[n] = la.mul(R, E, P[n])
    ds = [la.mul(R, P[n + 1], ds[n], la.inverse(R, P[n])) for n in range(top)]
    expected = []
    for n in range(top):
        tors = tuple(sorted(m for m in (mult[n - 1] if n else []) if m > 1))
        expected.append((n_single[n], tors))
    return FinCochainComplex(R, tuple(ranks), tuple(ds)), expected


@given(st.integers(0, 10_000))
def test_cohomology_matches_constructed_answer(seed):
    C, expected = _random_complex(seed)
    H = cohomology(C)
    for n, (rank, tors) in enumerate(expected):
        assert H[n].rank == rank
        assert tuple(sorted(H[n].torsion)) == tors


@given(st.integers(0, 10_000))
def test_cohomology_matches_sympy_snf(seed):
    C, _ = _random_complex(seed)
    for n in range(C.top + 1):
        ker = C.ranks[n] - (sympy.Matrix(C.d[n].tolist()).rank() if C.d[n].size else 0)
        prev = C.d[n - 1] if n else None
        if prev is not None and prev.size:
            S = sympy_snf(sympy.Matrix(prev.tolist()), domain=sympy.ZZ)
            divs = [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]
        else:
            divs = []
        assert cohomology(C)[n].rank == ker - len(divs)
        assert tuple(cohomology(C)[n].torsion) == tuple(d for d in divs if d > 1)


def test_cohomology_basis_and_identity_map():
    C, _ = _random_complex(7, QQ)
    for n in range(C.top + 1):
        hb = cohomology_basis(C, n)
        assert hb.dim == cohomology(C)[n].rank
        M = induced_map(C, C, la.identity(QQ, C.ranks[n]), n)
        assert la.equal(QQ, M, la.identity(QQ, hb.dim))


# --- spectral sequences ------------------------------------------------------------------

def _filtered_pairs(seed, top=3, length=3):
    """A filtered complex built from generators with explicit filtration degrees.

    Each pair x -> y with deg x = a ≤ deg y = b dies on E_{b-a+1}; singletons live forever.
    Returns the complex (in a scrambled filtration-adapted basis) and the exact page dims.
    """
    rng = random.Random(seed)
    R = QQ
    gens = [[] for _ in range(top + 2)]
    pairs = []
    for n in range(top + 1):
        for _ in range(rng.randint(0, 2)):
            gens[n].append(rng.randint(0, length))
        for _ in range(rng.randint(0, 2)):
            a = rng.randint(0, length)
            b = rng.randint(a, length)
            pairs.append((n, len(gens[n]), len(gens[n + 1]), b - a))
            gens[n].append(a)
            gens[n + 1].append(b)
    ranks = [len(g) for g in gens]
    ds = [la.zeros(R, ranks[n + 1], ranks[n]) for n in range(top + 1)]
    for n, i, j, _ in pairs:
        ds[n][j, i] = R(rng.choice([1, -1, 3]))
    P = []
    for n, degs in enumerate(gens):
        M = la.identity(R, ranks[n])
        for i in range(ranks[n]):
            for j in range(ranks[n]):
                if i != j and degs[i] >= degs[j] and rng.random() < 0.5:
                    M[i, j] = R(rng.choice([-2, -1, 1, 2]))
        U = la.identity(R, ranks[n])
        for i in range(ranks[n]):
            for j in range(i):
                U[i, j] = M[i, j]
        L = la.identity(R, ranks[n])
        for i in range(ranks[n]):
            for j in range(i + 1, ranks[n]):
                L[i, j] = M[i, j]
        # product of unipotent pieces, each preserving the filtration
        keepU = la.identity(R, ranks[n])
        keepL = la.identity(R, ranks[n])
        for i in range(ranks[n]):
            for j in range(ranks[n]):
                if i > j and degs[i] >= degs[j]:
                    keepU[i, j] = U[i, j]
                if i < j and degs[i] >= degs[j]:
                    keepL[i, j] = L[i, j]
        P.append(la.mul(R, keepU, keepL))
    ds = [la.mul(R, P[n + 1], ds[n], la.inverse(R, P[n])) for n in range(top + 1)]
    C = FinCochainComplex(R, tuple(ranks), tuple(ds))

    def dims(r):
        out = {}
        alive = [[True] * len(g) for g in gens]
        for n, i, j, gap in pairs:
            if gap < r:
                alive[n][i] = alive[n + 1][j] = False
        for n in range(top + 1):
            for i, p in enumerate(gens[n]):
                if alive[n][i]:
                    out[p, n - p] = out.get((p, n - p), 0) + 1
        return out
    return FilteredComplex.from_degrees(C, gens), dims, length


@given(st.integers(0, 100_000))
def test_spectral_pages_match_construction(seed):
    FC, dims, length = _filtered_pairs(seed)
    ss = spectral_pages(FC, r_max=length + 2)
    top = FC.complex.top
    for r, page in enumerate(ss.pages):
        want = {k: v for k, v in dims(r).items() if sum(k) <= top}
        got = {k: v for k, v in page.dims.items() if v}
        assert got == want, r
    inf = {k: v for k, v in ss.infinity.dims.items() if v}
    assert inf == {k: v for k, v in dims(length + 5).items() if sum(k) <= top}
    for n, (a, b) in ss.convergence().items():
        assert a == b
    assert ss.page_homology_mismatches() == []


def test_trivial_filtration_collapses_on_e1():
    C, _ = _random_complex(3, QQ)
    FC = FilteredComplex.from_degrees(C, [[0] * r for r in C.ranks])
    ss = spectral_pages(FC, 3)
    H = cohomology(C)
    for n in range(C.top + 1):
        assert ss.pages[1].dim(0, n) == H[n].rank
    assert ss.collapse_page() == 1


def test_exact_complex_has_empty_abutment():
    R = QQ
    C = FinCochainComplex(R, (1, 1, 0), (la.matrix(R, [[1]]), la.zeros(R, 0, 1)))
    FC = FilteredComplex.from_degrees(C, [[0], [1], []])
    ss = spectral_pages(FC, 3)
    assert ss.pages[1].dim(0, 0) == 1 and ss.pages[1].dim(1, 0) == 1
    assert ss.pages[1].differentials[0, 0].tolist() != [[0]]
    assert ss.pages[2].dim(0, 0) == 0 and ss.infinity.total(0) == 0


def test_filtration_must_be_stable():
    R = QQ
    C = FinCochainComplex(R, (1, 1, 0), (la.matrix(R, [[1]]), la.zeros(R, 0, 1)))
    with pytest.raises(FiltrationError):
        FilteredComplex.from_degrees(C, [[1], [0], []])


def test_spectral_over_integers_rejected():
    C = FinCochainComplex(ZZ, (1, 0), (la.zeros(ZZ, 0, 1),))
    with pytest.raises(FiltrationError):
        FilteredComplex.from_degrees(C, [[0], []])
