"""Fibers of an equivariant map, the fiber cohomology coefficient systems, the
skeletal filtration of the total space's Bredon complex, and the comparison
of its E₂ page with Bredon cohomology of the base.

Everything here is over a field.  Fiber cohomology over an equivariant
simplex σ = (H, x) is the Bredon cohomology of the pullback of f along the
characteristic map G/H × Δ[n] -> X, with the coefficients pulled back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement

from . import linalg as la
from .bredon import BredonComplex, bredon_cohomology
from .coefficients import (CoefficientError, LocalCoefficientSystem, check_well_defined,
                           pullback_system)
from .groupoid import EquivariantGroupoid, edge_endpoints, pi1_presentation, _tree_paths
from .groups import OrbitMorphism, Subgroup
from .homology import FinCochainComplex, cohomology, cohomology_basis, induced_map
from .linalg import Matrix
from .simplicial import (DEFAULT_SIZE_GUARD, GSimplicialSet, SimplicialError, SimplicialMap,
                         TruncatedSimplicialSet, _check_guard, diagonal_action, fiber_product,
                         fmt, from_tables, gproduct, identity_map)
from .spectral import FilteredComplex, SpectralSequence, spectral_pages


class NotFibrationLike(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class MonodromyNotSupplied(ValueError):
    pass


# --- G/H × Δ[n] and pullbacks ----------------------------------------------------------

def orbit_prism(G, H: Subgroup, n: int, N: int, size_guard: int = DEFAULT_SIZE_GUARD) -> GSimplicialSet:
    """G/H × Δ[n]: simplices (coset rep, nondecreasing tuple in [n])."""
    cosets = sorted({min(G.mul(g, h) for h in H) for g in range(G.order)})
    rep = lambda g: min(G.mul(g, h) for h in H)
    levels = []
    for q in range(N + 1):
        lvl = [(c, t) for c in cosets for t in combinations_with_replacement(range(n + 1), q + 1)]
        _check_guard(len(lvl), size_guard, f"G/H × Δ[{n}] level {q}")
        levels.append(lvl)
    face = [[] for _ in range(N + 1)]
    degen = [[] for _ in range(N + 1)]
    for q in range(N + 1):
        if q >= 1:
            face[q] = [{(c, t): (c, t[:i] + t[i + 1:]) for c, t in levels[q]} for i in range(q + 1)]
        if q < N:
            degen[q] = [{(c, t): (c, t[:i + 1] + t[i:]) for c, t in levels[q]} for i in range(q + 1)]
    base = from_tables(N, levels, face, degen, f"G/{G.fmt_subgroup(H)}×Δ[{n}]")
    action = tuple(tuple({(c, t): (rep(G.mul(g, c)), t) for c, t in lvl} for g in range(G.order))
                   for lvl in levels)
    return GSimplicialSet(base, G, action)


def characteristic_map(X: GSimplicialSet, H: Subgroup, x, prism: GSimplicialSet) -> SimplicialMap:
    """(c, θ) ↦ c·(x·θ)."""
    B = X.base
    maps = tuple({(c, t): X.act(c, B.apply(x, t)) for c, t in lvl} for lvl in prism.base.levels)
    return SimplicialMap(prism, X, maps, True)


@dataclass
class Pullback:
    space: GSimplicialSet
    to_total: SimplicialMap
    to_prism: SimplicialMap
    simplex: tuple


def pullback(f: SimplicialMap, H: Subgroup, x, size_guard: int = DEFAULT_SIZE_GUARD) -> Pullback:
    """(G/H × Δ[n]) ×_X Y for the equivariant simplex (H, x) and f: Y -> X."""
    X, Y = f.target, f.source
    H = tuple(H)
    n = X.base.dim(x)
    prism = orbit_prism(X.group, H, n, X.N, size_guard)
    chi = characteristic_map(X, H, x, prism)
    P, p1, p2 = fiber_product(chi, f, size_guard)
    PG = diagonal_action(P, prism, Y)
    return Pullback(PG, SimplicialMap(PG, Y, p2.maps, True), SimplicialMap(PG, prism, p1.maps, True), (H, x))


# --- cochain maps between fibers --------------------------------------------------------

def cochain_pullback(src: BredonComplex, tgt: BredonComplex, j, n: int) -> Matrix:
    """j*: C^n(tgt) -> C^n(src) for an equivariant j: src space -> tgt space along
    which the source coefficients are pulled back from the target's."""
    R = src.ring
    A = la.zeros(R, src.dim(n), tgt.dim(n))
    for i, b in enumerate(src.basis[n]):
        sl = tgt.block(n, b.subgroup, j(b.simplex))
        if sl is not None:
            A[i, sl.start + b.coord] = R.one
    return A


def induced_on_cohomology(src: BredonComplex, tgt: BredonComplex, j, q: int) -> Matrix:
    """H^q(tgt) -> H^q(src) in the representative bases of both."""
    R = src.ring
    A = cochain_pullback(src, tgt, j, q)
    on_S = la.mul(R, src.retraction(q), A, tgt.compatible_basis(q))
    return induced_map(tgt.compatible_complex(), src.compatible_complex(), on_S, q)


# --- the fibration --------------------------------------------------------------------

class Fibration:
    """An equivariant map f: Y -> X with a coefficient system M on Y over a field."""

    def __init__(self, f: SimplicialMap, M: LocalCoefficientSystem, size_guard: int = DEFAULT_SIZE_GUARD):
        if not M.ring.is_field:
            raise CoefficientError("fiber cohomology and spectral sequences need field coefficients")
        if M.X is not f.source:
            raise ValueError("coefficients must live on the source of f")
        bad = f.violations()
        if bad:
            raise SimplicialError(f"map is not an equivariant simplicial map: {bad[0]}")
        self.f, self.M = f, M
        self.X, self.Y = f.target, f.source
        self.ring = M.ring
        self.size_guard = size_guard
        self.Pi = EquivariantGroupoid(self.X)
        self._fibers: dict = {}

    @property
    def N(self) -> int:
        return self.X.N

    def fiber(self, H: Subgroup, x) -> tuple[Pullback, BredonComplex]:
        key = (tuple(H), x)
        if key not in self._fibers:
            pb = pullback(self.f, H, x, self.size_guard)
            MP = pullback_system(self.M, pb.space, pb.to_total)
            self._fibers[key] = (pb, BredonComplex(MP))
        return self._fibers[key]

    def fiber_basis(self, H: Subgroup, x, q: int):
        _, B = self.fiber(H, x)
        return cohomology_basis(B.compatible_complex(), q)

    def fiber_dims(self, q: int) -> dict:
        return {(H, v): self.fiber_basis(H, v, q).dim for H, v in self.Pi.objects()}

    def _end_inclusion(self, H, e, end: int):
        """P_(H, vertex) -> P_(H, e) for the vertex at position ``end`` of e."""
        def j(z):
            (c, t), y = z
            return ((c, tuple(end for _ in t)), y)
        return j

    def restriction(self, H: Subgroup, e, end: int, q: int) -> Matrix:
        XH = self.X.fixed_points(H)
        v = XH.vertex(e, end)
        _, Bv = self.fiber(H, v)
        _, Be = self.fiber(H, e)
        return induced_on_cohomology(Bv, Be, self._end_inclusion(H, e, end), q)

    def orbit_transfer(self, a: OrbitMorphism, y, q: int) -> Matrix:
        """H^q(P_(K,y)) -> H^q(P_(H,g·y)) induced by ((c, θ), p) ↦ ((c·g, θ), p)."""
        G = self.X.group
        H, K, g = a.source, a.target, a.rep
        _, Bs = self.fiber(H, self.X.act(g, y))
        _, Bt = self.fiber(K, y)
        rep = lambda c: min(G.mul(c, k) for k in K)

        def j(z):
            (c, t), p = z
            return ((rep(G.mul(c, g)), t), p)
        return induced_on_cohomology(Bs, Bt, j, q)

    def fiber_system(self, q: int) -> LocalCoefficientSystem:
        """h^q assembled by path lifting: ρ(e) = r₀·r₁⁻¹ from the two end restrictions."""
        R = self.ring
        ranks = self.fiber_dims(q)
        rho, tau = {}, {}
        for H in self.Pi.orbits.objects:
            XH = self.X.fixed_points(H)
            for e in (XH.nondegenerate(1) if XH.N >= 1 else ()):
                r = [self.restriction(H, e, end, q) for end in (0, 1)]
                for end, m in enumerate(r):
                    if m.shape[0] != m.shape[1] or not la.is_invertible(R, m):
                        raise NotFibrationLike(
                            f"restriction of H^{q} from the fiber over {fmt(e)} to its "
                            f"{'source' if end == 0 else 'target'} vertex is not an isomorphism",
                            (H, e, end))
                rho[(H, e)] = la.mul(R, r[0], la.inverse(R, r[1]))
        for a in self.Pi.orbits.all_morphisms():
            for y in self.X.fixed_points(a.target).levels[0]:
                T = self.orbit_transfer(a, y, q)
                if T.shape[0] != T.shape[1] or not la.is_invertible(R, T):
                    raise NotFibrationLike(
                        f"H^{q} of the fibers over ({self.X.group.fmt_subgroup(a.target)}, {fmt(y)}) and its "
                        f"image under {self.X.group.names[a.rep]} are not identified by the orbit map",
                        (a, y))
                tau[(a, y)] = T
        h = LocalCoefficientSystem(self.X, R, ranks, rho, tau)
        bad = check_well_defined(h)
        if not bad.ok:
            raise NotFibrationLike(f"assembled fiber system h^{q} is inconsistent: {bad.violations[0]}")
        return h

    def holonomy_trivial(self, h: LocalCoefficientSystem) -> bool:
        """True when every loop acts trivially: after transporting bases along a
        spanning tree of each fixed-point component all edge matrices are identities."""
        R = self.ring
        for H in self.Pi.orbits.objects:
            XH = self.X.fixed_points(H)
            if XH.N < 1:
                continue
            for comp in XH.connected_components():
                root = min(comp, key=repr)
                pres = pi1_presentation(XH, root)
                paths = _tree_paths(XH, root, set(pres.tree))
                for e in pres.generators:
                    loop = pres.loop(XH, e)
                    if not la.equal(R, h.word_matrix(H, loop), la.identity(R, h.rank(H, root))):
                        return False
        return True

    # filtration and spectral sequence ------------------------------------------------
    @cached_property
    def total(self) -> BredonComplex:
        return BredonComplex(self.M)

    def base_degree(self, y) -> int:
        fy = self.f(y)
        return self.X.base.dim(self.X.base.decompose(fy)[0])

    @cached_property
    def filtration(self) -> FilteredComplex:
        """F^p S^n: compatible cochains vanishing where the base degree is below p."""
        B, R = self.total, self.ring
        S = B.compatible_complex()
        levels = []
        for n in range(self.N + 1):
            degs = [self.base_degree(b.simplex) for b in B.basis[n]]
            K, L = B.compatible_basis(n), B.retraction(n)
            top = max(degs, default=0)
            lv = []
            for p in range(top + 1):
                E = la.identity(R, B.dim(n))[:, [i for i, d in enumerate(degs) if d >= p]]
                inter = la.intersect(R, K, E) if K.shape[1] and E.shape[1] else la.zeros(R, B.dim(n), 0)
                lv.append(la.mul(R, L, inter) if inter.shape[1] else la.zeros(R, K.shape[1], 0))
            levels.append(tuple(lv) if lv else (la.identity(R, K.shape[1]),))
        return FilteredComplex(S, tuple(levels))

    def spectral_sequence(self, r_max: int = 3) -> SpectralSequence:
        return spectral_pages(self.filtration, r_max)


@dataclass
class E2Report:
    e2: dict
    expected: dict
    mismatches: list
    convergence: dict
    collapse_page: int | None
    holonomy_trivial: dict
    pages: list = field(default_factory=list)

    @property
    def abutment_ok(self) -> bool:
        return all(a == b for a, b in self.convergence.values())

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.abutment_ok

    def as_dict(self) -> dict:
        key = lambda k: f"{k[0]},{k[1]}"
        return {"E2": {key(k): v for k, v in sorted(self.e2.items())},
                "expected": {key(k): v for k, v in sorted(self.expected.items())},
                "mismatches": [list(m) for m in self.mismatches],
                "convergence": {str(n): {"E_inf": a, "H": b} for n, (a, b) in sorted(self.convergence.items())},
                "collapse_page": self.collapse_page,
                "holonomy_trivial": {str(q): v for q, v in sorted(self.holonomy_trivial.items())},
                "pages": self.pages,
                "agree": self.ok}


def e2_compare(fib: Fibration, fiber_systems: dict[int, LocalCoefficientSystem] | None = None,
               r_max: int = 3, allow_auto: bool = False) -> E2Report:
    """Compare dim E₂^{p,q} of the skeletal filtration with dim H_G^p(X; h^q).

    For each q, a supplied system is used if present; otherwise the system
    assembled by path lifting is used when its holonomy is trivial (or when
    ``allow_auto`` is set), and MonodromyNotSupplied is raised otherwise.
    """
    fiber_systems = dict(fiber_systems or {})
    top = fib.N - 1
    ss = fib.spectral_sequence(max(2, r_max))
    e2 = {(p, q): d for (p, q), d in ss.pages[2].dims.items() if p + q <= top and q >= 0}
    expected, trivial = {}, {}
    for q in range(top + 1):
        if q in fiber_systems:
            h = fiber_systems[q]
            rep = check_well_defined(h)
            if not rep.ok:
                raise CoefficientError(f"supplied fiber system for q={q} is invalid: {rep.violations[0]}")
            dims = fib.fiber_dims(q)
            for obj, d in dims.items():
                if h.ranks.get(obj) != d:
                    raise CoefficientError(f"supplied fiber system for q={q} has rank {h.ranks.get(obj)} "
                                           f"at {fmt(obj[1])}, but the fiber cohomology has dimension {d}")
            trivial[q] = fib.holonomy_trivial(fib.fiber_system(q))
        else:
            h = fib.fiber_system(q)
            trivial[q] = fib.holonomy_trivial(h)
            if not trivial[q] and not allow_auto:
                raise MonodromyNotSupplied(f"fibers carry nontrivial monodromy in degree {q}; "
                                           "supply a fiber coefficient system")
        Hx = bredon_cohomology(h, range(top - q + 1))
        for p in range(top - q + 1):
            expected[(p, q)] = Hx[p].rank
    mismatches = [(p, q, e2.get((p, q), 0), d) for (p, q), d in sorted(expected.items())
                  if e2.get((p, q), 0) != d]
    mismatches += [(p, q, d, 0) for (p, q), d in sorted(e2.items()) if (p, q) not in expected and d]
    pages = [{"r": pg.r, "dims": {f"{p},{q}": d for (p, q), d in sorted(pg.dims.items()) if d and p + q <= top}}
             for pg in ss.pages]
    return E2Report(e2, expected, mismatches, ss.convergence(), ss.collapse_page(), trivial, pages)


# --- constructions of test fibrations ---------------------------------------------------

def identity_fibration(M: LocalCoefficientSystem) -> Fibration:
    return Fibration(identity_map(M.X), M)


def product_fibration(X: GSimplicialSet, F: GSimplicialSet, M_builder) -> Fibration:
    """pr₁: X × F -> X with coefficients ``M_builder(X × F)``."""
    Y, pr1, _ = gproduct(X, F)
    return Fibration(pr1, M_builder(Y))


def cylinder_inclusion(X: GSimplicialSet, end: int = 0):
    """X ≅ X × {end} ⊂ X × Δ[1] with trivial action on Δ[1]; returns (cylinder, inclusion, projection)."""
    from .simplicial import standard_simplex, trivial_action
    I = trivial_action(standard_simplex(1, X.N), X.group)
    Y, pr1, pr2 = gproduct(X, I)
    inc = SimplicialMap(X, Y, tuple({x: (x, tuple(end for _ in range(n + 1))) for x in lvl}
                                    for n, lvl in enumerate(X.base.levels)), True)
    return Y, inc, pr1


def induced_isomorphism_check(M_total: LocalCoefficientSystem, inc: SimplicialMap, degrees) -> dict[int, bool]:
    """For j: A -> Y and M on Y, is j*: H_G^n(Y; M) -> H_G^n(A; j*M) invertible?"""
    A = inc.source
    MA = pullback_system(M_total, A, inc)
    BA, BY = BredonComplex(MA), BredonComplex(M_total)
    out = {}
    for n in degrees:
        T = induced_on_cohomology(BA, BY, inc, n)
        out[n] = T.shape[0] == T.shape[1] and (T.shape[0] == 0 or la.is_invertible(M_total.ring, T))
    return out
