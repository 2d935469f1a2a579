"""The eight acceptance criteria, run exactly.

Each criterion is a plain function that raises AssertionError on failure, so the
same checks back both this pytest module and ``scripts/run_acceptance.py``.
Every test prints one ``PASS``/``FAIL`` line regardless of output capture.
"""

from __future__ import annotations

import random

import pytest

from equicohom import linalg as la
from equicohom.bredon import BredonComplex, bredon_cohomology
from equicohom.cli import validation_messages
from equicohom.coefficients import build_system, check_well_defined, random_valid_system, sign_solutions
from equicohom.eilenberg import verify_eilenberg
from equicohom.groupoid import EquivariantGroupoid, random_path
from equicohom.groups import trivial_group
from equicohom.io import FIXTURES, load_fixture, load_json, parse_document
from equicohom.rings import QQ, ZZ
from equicohom.serre import Fibration, e2_compare, identity_fibration
from equicohom.simplicial import action_from_nondegenerate, quotient

from oracles import classical_cohomology

FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.json"))
E = (0,)


def _spaces():
    """Every G-simplicial set appearing in a fixture, including fibration total spaces."""
    out = {}
    for name in FIXTURE_NAMES:
        d = load_fixture(name)
        out[name] = d.complex
        if d.fibration is not None and d.fibration.kind == "map":
            out[f"{name}:total"] = d.fibration.f.source
    return out


def _ranks(res, degrees):
    return {n: (res[n].rank, tuple(res[n].torsion)) for n in degrees}


# --- criteria --------------------------------------------------------------------------

def criterion_1(systems: int = 100):
    for name, X in _spaces().items():
        rng = random.Random(f"c1:{name}")
        sol = sign_solutions(X)
        for k in range(systems):
            M = random_valid_system(X, ZZ, rng, max_rank=3, solutions=sol)
            assert check_well_defined(M).ok, (name, k)
            assert max(M.ranks.values()) <= 3, (name, k)
            B = BredonComplex(M)
            for n in range(X.N - 1):
                assert la.is_zero(ZZ, la.mul(ZZ, B.coboundary(n + 1), B.coboundary(n))), (name, k, "C", n)
                assert la.is_zero(ZZ, la.mul(ZZ, B.restricted_coboundary(n + 1),
                                             B.restricted_coboundary(n))), (name, k, "S", n)


def criterion_2():
    for name in ("s1_twisted", "w2_swap_twisted", "t2_constant", "t2_twisted", "k2_orientation"):
        M = load_fixture(name).coefficients
        rep = verify_eilenberg(M, range(M.X.N))
        assert rep.ok, (name, rep.failures)
        assert set(rep.checks) == {"coboundary_matrices", "kernels", "psi_phi", "phi_psi",
                                   "phi_chain_map", "cohomology"}
        for n in rep.degrees:
            assert (rep.bredon[n].rank, rep.bredon[n].torsion) == (rep.invariant[n].rank, rep.invariant[n].torsion)


def criterion_3():
    expected = {
        "s1_twisted": {0: (0, ()), 1: (0, (2,))},
        "t2_constant": {0: (1, ()), 1: (2, ()), 2: (1, ())},
        "k2_constant": {0: (1, ()), 1: (1, ()), 2: (0, (2,))},
    }
    for name, want in expected.items():
        M = load_fixture(name).coefficients
        X = M.X
        assert X.group.order == 1
        degrees = sorted(want)
        rank = M.rank(E, X.base.levels[0][0])
        rho = {e: la.to_lists(M.edge_matrix(E, e)) for e in X.base.nondegenerate(1)}
        assert classical_cohomology(X, rho, rank, degrees) == want, name
        assert _ranks(bredon_cohomology(M, degrees), degrees) == want, name


def criterion_4():
    M = load_fixture("s1_2").coefficients
    X = M.X
    assert X.group.order == 2 and not X.fixed_points((0, 1)).levels[0]
    Q = action_from_nondegenerate(quotient(X), trivial_group(), {})
    equivariant = bredon_cohomology(M, [0, 1])
    orbit = bredon_cohomology(build_system(Q, ZZ), [0, 1])
    assert _ranks(equivariant, [0, 1]) == _ranks(orbit, [0, 1]) == {0: (1, ()), 1: (1, ())}


def criterion_5():
    M = load_fixture("point_z2_constant").coefficients
    assert set(M.ranks.values()) == {1}
    for A in M.tau.values():
        assert la.to_lists(A) == [[1]]
    H = bredon_cohomology(M, [0, 1, 2])
    assert _ranks(H, [0, 1, 2]) == {0: (1, ()), 1: (0, ()), 2: (0, ())}


def criterion_6(triples: int = 200):
    for name in FIXTURE_NAMES:
        d = load_fixture(name)
        X, M = d.complex, d.coefficients
        R = M.ring
        Pi = EquivariantGroupoid(X)
        rng = random.Random(f"c6:{name}")
        for _ in range(triples):
            a = Pi.random_morphism(rng)
            b = Pi.random_morphism(rng, source=a.target)
            c = Pi.random_morphism(rng, source=b.target)
            lhs = M.evaluate(Pi.compose(c, Pi.compose(b, a)))
            rhs = M.evaluate(Pi.compose(Pi.compose(c, b), a))
            assert la.equal(R, lhs, rhs), (name, a, b, c)
            assert la.equal(R, M.evaluate(Pi.compose(b, a)), la.mul(R, M.evaluate(a), M.evaluate(b)))

            # mixed naturality: a path ω in X^K against an orbit arrow ĝ: G/H -> G/K
            arrow = rng.choice(Pi.orbits.all_morphisms())
            XK = Pi.fixed(arrow.target)
            if not XK.levels[0]:
                continue
            y = rng.choice(XK.levels[0])
            comp = next(cc for cc in XK.connected_components() if y in cc)
            y2 = rng.choice(sorted(comp, key=repr))
            omega = random_path(XK, rng, y, y2)
            g = arrow.rep
            one = Pi.compose(Pi.b(arrow.target, omega), Pi.structural(arrow, y))
            two = Pi.compose(Pi.structural(arrow, y2), Pi.b(arrow.source, omega.translate(X, g)))
            assert la.equal(R, M.evaluate(one), M.evaluate(two)), (name, arrow, omega)


def criterion_7():
    d = load_fixture("identity_t2", QQ)
    M = d.fibration.M_total
    rep = e2_compare(identity_fibration(M))
    H = bredon_cohomology(M)
    assert rep.ok
    for (p, q), dim in rep.e2.items():
        assert dim == (H[p].rank if q == 0 else 0), (p, q)

    d = load_fixture("product_t2_s1", QQ)
    fb = d.fibration
    rep = e2_compare(Fibration(fb.f, fb.M_total), fb.fiber_systems)
    assert rep.ok and rep.collapse_page == 2
    total = bredon_cohomology(fb.M_total, range(3))
    for n in range(3):
        assert rep.convergence[n] == (total[n].rank, total[n].rank), n

    d = load_fixture("double_cover_s1", QQ)
    fb = d.fibration
    assert 0 in fb.fiber_systems
    rep = e2_compare(Fibration(fb.f, fb.M_total), fb.fiber_systems)
    assert rep.ok
    assert {n: a for n, (a, b) in rep.convergence.items()} == {0: 1, 1: 1}


def criterion_8():
    cases = {
        "s1_2_broken_identity": "simplicial identity ∂0∂2 = ∂1∂0 fails at x",
        "t2_bad_relation": "[relation] at 2-simplex U",
        "s1_2_nonequivariant": "∂0 does not commute with t at p",
    }
    for name, witness in cases.items():
        raw = load_json(FIXTURES / "mutations" / f"{name}.json")
        msgs = validation_messages(parse_document(raw))
        assert msgs, name
        assert any(witness in m for m in msgs), (name, msgs)
    for name in ("s1_2", "t2_constant"):
        assert validation_messages(load_fixture(name)) == [], name


CRITERIA = [
    (1, "δ∘δ = 0 on C and S, every fixture × 100 random systems", criterion_1),
    (2, "Eilenberg comparison, matrices, kernels, φ/ψ and invariants", criterion_2),
    (3, "classical values against a full-complex Smith form oracle", criterion_3),
    (4, "free ℤ/2 action on s1_2 matches the quotient circle", criterion_4),
    (5, "point axiom for the ℤ/2 point", criterion_5),
    (6, "associativity and mixed naturality on 200 triples per fixture", criterion_6),
    (7, "Serre comparison over ℚ for identity, product and double cover", criterion_7),
    (8, "corrupted fixtures rejected with a located witness", criterion_8),
]


def run_criterion(number: int, title: str, fn) -> tuple[bool, str]:
    try:
        fn()
    except AssertionError as exc:
        return False, f"FAIL criterion {number}: {title} ({exc!r})"
    return True, f"PASS criterion {number}: {title}"


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line = run_criterion(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
