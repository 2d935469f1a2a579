"""Equivariant local coefficient systems on ΠX with free-module values.

Convention: M is contravariant, M(m₂ ∘ m₁) = M(m₁)·M(m₂), and matrices act on
column vectors.  A morphism (ĝ, w): (H, x) -> (K, y) evaluates to
ρ(w)·τ(ĝ, y), where ρ(w) multiplies the edge matrices along w in path order
(inverses for backward letters) and τ(ĝ, y) = M[ĝ, k] at the vertex y.  The
matrix ρ_H(e) of an edge e: a -> b is M of the morphism (id, e), a map
M(H, b) -> M(H, a).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import linalg as la
from .groupoid import EquivariantGroupoid, EquivariantGroupoidMorphism, GroupoidError, PiWord, edge_endpoints
from .groups import OrbitMorphism, Subgroup
from .linalg import Matrix
from .rings import GF, Ring, RingError
from .simplicial import GSimplicialSet, SimplicialMap, TruncatedSimplicialSet, fmt

Obj = tuple[Subgroup, object]


class CoefficientError(ValueError):
    pass


class NotOneVertex(CoefficientError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str          # "relation", "invertibility", "naturality", "functoriality", "rank"
    witness: str
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] at {self.witness}: {self.message}"


@dataclass(frozen=True)
class CoefficientReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


class LocalCoefficientSystem:
    """Ranks per object, ρ per (subgroup, nondegenerate edge), τ per (orbit arrow, vertex)."""

    def __init__(self, X: GSimplicialSet, ring: Ring, ranks: Mapping[Obj, int],
                 rho: Mapping[tuple[Subgroup, object], Matrix],
                 tau: Mapping[tuple[OrbitMorphism, object], Matrix],
                 supplied: dict | None = None):
        self.X = X
        self.ring = ring
        self.Pi = EquivariantGroupoid(X)
        self.ranks = dict(ranks)
        self.rho = {k: la.normalize(ring, v) for k, v in rho.items()}
        self.tau = {k: la.normalize(ring, v) for k, v in tau.items()}
        self.supplied = supplied
        self._inv: dict = {}

    # lookups ----------------------------------------------------------------
    def rank(self, H: Subgroup, v) -> int:
        return self.ranks[(tuple(H), v)]

    def edge_matrix(self, H: Subgroup, e, sign: int = 1) -> Matrix:
        H = tuple(H)
        XH = self.X.fixed_points(H)
        if XH.is_degenerate(e):
            return la.identity(self.ring, self.rank(H, XH.d(0, e)))
        if sign > 0:
            return self.rho[(H, e)]
        key = (H, e)
        if key not in self._inv:
            self._inv[key] = la.inverse(self.ring, self.rho[key])
        return self._inv[key]

    def word_matrix(self, H: Subgroup, w: PiWord) -> Matrix:
        out = la.identity(self.ring, self.rank(H, w.source))
        for e, s in w.letters:
            out = la.mul(self.ring, out, self.edge_matrix(H, e, s))
        return out

    def evaluate(self, m: EquivariantGroupoidMorphism) -> Matrix:
        (H, x), (K, y) = m.source, m.target
        t = self.tau[(m.arrow, y)]
        w = self.word_matrix(H, m.word)
        if w.shape[1] != t.shape[0]:
            raise CoefficientError(f"rank mismatch evaluating {m}")
        return la.mul(self.ring, w, t)

    def one_vertex(self):
        verts = self.X.base.levels[0]
        if len(verts) != 1:
            raise NotOneVertex(f"expected a single vertex, found {len(verts)}")
        return verts[0]

    def objects(self) -> list[Obj]:
        return self.Pi.objects()

    def arrows(self) -> list[OrbitMorphism]:
        return self.Pi.orbits.all_morphisms()


# --- relation checks ---------------------------------------------------------------

def check_well_defined(M: LocalCoefficientSystem) -> CoefficientReport:
    R, X, Pi = M.ring, M.X, M.Pi
    G = X.group
    out: list[Violation] = []
    gname = lambda H: G.fmt_subgroup(H)

    for H in Pi.orbits.objects:
        XH = X.fixed_points(H)
        for v in XH.levels[0]:
            if (H, v) not in M.ranks:
                out.append(Violation("rank", f"({gname(H)}, {fmt(v)})", "no module assigned"))
        if XH.N < 1:
            continue
        for e in XH.nondegenerate(1):
            a, b = edge_endpoints(XH, e)
            if (H, e) not in M.rho:
                out.append(Violation("rank", f"edge {fmt(e)} of X^{gname(H)}", "no matrix assigned"))
                continue
            A = M.rho[(H, e)]
            want = (M.ranks.get((H, a)), M.ranks.get((H, b)))
            if A.shape != want:
                out.append(Violation("rank", f"edge {fmt(e)} of X^{gname(H)}",
                                     f"matrix has shape {A.shape}, endpoints have ranks {want}"))
            elif not la.is_invertible(R, A):
                out.append(Violation("invertibility", f"edge {fmt(e)} of X^{gname(H)}",
                                     f"matrix is not invertible over {R}"))
    if out:
        return CoefficientReport(tuple(out))

    # (a) one relation per nondegenerate 2-simplex
    for H in Pi.orbits.objects:
        XH = X.fixed_points(H)
        if XH.N < 2:
            continue
        for x in XH.nondegenerate(2):
            lhs = M.edge_matrix(H, XH.d(1, x))
            rhs = la.mul(R, M.edge_matrix(H, XH.d(2, x)), M.edge_matrix(H, XH.d(0, x)))
            if not la.equal(R, lhs, rhs):
                out.append(Violation("relation", f"2-simplex {fmt(x)} of X^{gname(H)}",
                                     f"[∂1 {fmt(x)}] = [∂0 {fmt(x)}]∘[∂2 {fmt(x)}] fails: "
                                     f"{la.to_lists(lhs)} ≠ {la.to_lists(rhs)}"))

    # structural matrices: presence, shape, invertibility
    arrows = M.arrows()
    for a in arrows:
        for y in X.fixed_points(a.target).levels[0]:
            key = (a, y)
            wit = f"orbit map {G.names[a.rep]}: G/{gname(a.source)}→G/{gname(a.target)} at {fmt(y)}"
            if key not in M.tau:
                out.append(Violation("rank", wit, "no matrix assigned"))
                continue
            want = (M.ranks[(a.source, X.act(a.rep, y))], M.ranks[(a.target, y)])
            if M.tau[key].shape != want:
                out.append(Violation("rank", wit, f"matrix has shape {M.tau[key].shape}, expected {want}"))
            elif not la.is_invertible(R, M.tau[key]):
                out.append(Violation("invertibility", wit, f"matrix is not invertible over {R}"))
    if any(v.kind in ("rank", "invertibility") for v in out):
        return CoefficientReport(tuple(out))

    # (c) mixed naturality: τ(ĝ,y)·ρ_K(e) = ρ_H(g·e)·τ(ĝ,y')
    for a in arrows:
        XK = X.fixed_points(a.target)
        if XK.N < 1:
            continue
        for e in XK.nondegenerate(1):
            y, y2 = edge_endpoints(XK, e)
            lhs = la.mul(R, M.tau[(a, y)], M.edge_matrix(a.target, e))
            rhs = la.mul(R, M.edge_matrix(a.source, X.act(a.rep, e)), M.tau[(a, y2)])
            if not la.equal(R, lhs, rhs):
                out.append(Violation("naturality", f"edge {fmt(e)} under {G.names[a.rep]}: "
                                     f"G/{gname(a.source)}→G/{gname(a.target)}",
                                     "τ·ρ_K(e) ≠ ρ_H(g·e)·τ"))

    # (d) functoriality on O_G
    orb = Pi.orbits
    for a in arrows:
        if orb.is_identity(a):
            for y in X.fixed_points(a.target).levels[0]:
                if not la.equal(R, M.tau[(a, y)], la.identity(R, M.ranks[(a.target, y)])):
                    out.append(Violation("functoriality", f"identity of G/{gname(a.source)} at {fmt(y)}",
                                         "identity arrow is not sent to the identity"))
    for a1 in arrows:
        for a2 in arrows:
            if a1.target != a2.source:
                continue
            c = orb.compose(a1, a2)
            for z in X.fixed_points(a2.target).levels[0]:
                lhs = M.tau[(c, z)]
                rhs = la.mul(R, M.tau[(a1, X.act(a2.rep, z))], M.tau[(a2, z)])
                if not la.equal(R, lhs, rhs):
                    out.append(Violation("functoriality",
                                         f"{G.names[a1.rep]}∘{G.names[a2.rep]} through "
                                         f"G/{gname(a1.source)}→G/{gname(a1.target)}→G/{gname(a2.target)} at {fmt(z)}",
                                         "τ of a composite differs from the product"))
    return CoefficientReport(tuple(out))


# --- construction -----------------------------------------------------------------

def constant_system(X: GSimplicialSet, ring: Ring, rank: int = 1) -> LocalCoefficientSystem:
    return build_system(X, ring, default_rank=rank)


def build_system(X: GSimplicialSet, ring: Ring, default_rank: int = 1,
                 ranks: Mapping[Obj, int] | None = None,
                 edges: Mapping[tuple[Subgroup, object], object] | None = None,
                 orbit_maps: Mapping[tuple[OrbitMorphism, object], object] | None = None
                 ) -> LocalCoefficientSystem:
    """Complete partial data to a full system.

    Unspecified matrices are derived, in order of availability, from mixed
    naturality (edge matrices across orbit maps, orbit maps along edges) and
    from composition of orbit maps; whatever is still missing is set to the
    identity one entry at a time, re-propagating after each choice.  The
    result is not validated here.
    """
    Pi = EquivariantGroupoid(X)
    orb = Pi.orbits
    rk = {obj: default_rank for obj in Pi.objects()}
    for k, r in (ranks or {}).items():
        k = (tuple(k[0]), k[1])
        if k not in rk:
            raise CoefficientError(f"rank given for ({fmt(k[0])}, {fmt(k[1])}), which is not an object of ΠX")
        rk[k] = int(r)
    rho: dict = {}
    for (H, e), A in (edges or {}).items():
        H = tuple(H)
        XH = X.fixed_points(H)
        if XH.N < 1 or e not in XH.index[1] or XH.is_degenerate(e):
            raise CoefficientError(f"{fmt(e)} is not a nondegenerate edge of X^{X.group.fmt_subgroup(H)}")
        rho[(H, e)] = la.matrix(ring, A)
    tau: dict = {}
    arrows = orb.all_morphisms()
    for (a, y), A in (orbit_maps or {}).items():
        if y not in X.fixed_points(a.target).index[0]:
            raise CoefficientError(f"orbit map given at {fmt(y)}, which is not a vertex of the target fixed set")
        tau[(a, y)] = la.matrix(ring, A)

    edge_keys = [(H, e) for H in orb.objects for e in
                 (X.fixed_points(H).nondegenerate(1) if X.N >= 1 else ())]
    tau_keys = [(a, y) for a in arrows for y in X.fixed_points(a.target).levels[0]]

    def emat(H, e):
        XH = X.fixed_points(H)
        if XH.is_degenerate(e):
            return la.identity(ring, rk[(H, XH.d(0, e))])
        return rho.get((H, e))

    def inv(A):
        try:
            return la.inverse(ring, A)
        except RingError:
            return None

    def propagate():
        changed = True
        while changed:
            changed = False
            for a in arrows:
                g = a.rep
                XK = X.fixed_points(a.target)
                if XK.N < 1:
                    continue
                for e in XK.nondegenerate(1):
                    y, y2 = edge_endpoints(XK, e)
                    ge = X.act(g, e)
                    t1, t2 = tau.get((a, y)), tau.get((a, y2))
                    rK, rH = emat(a.target, e), emat(a.source, ge)
                    # τ(y)·ρ_K(e) = ρ_H(ge)·τ(y2)
                    if rH is None and t1 is not None and t2 is not None and rK is not None:
                        t2i = inv(t2)
                        if t2i is not None:
                            rho[(a.source, ge)] = la.mul(ring, t1, rK, t2i)
                            changed = True
                    elif rK is None and t1 is not None and t2 is not None and rH is not None:
                        t1i = inv(t1)
                        if t1i is not None:
                            rho[(a.target, e)] = la.mul(ring, t1i, rH, t2)
                            changed = True
                    elif t2 is None and t1 is not None and rK is not None and rH is not None:
                        rHi = inv(rH)
                        if rHi is not None:
                            tau[(a, y2)] = la.mul(ring, rHi, t1, rK)
                            changed = True
                    elif t1 is None and t2 is not None and rK is not None and rH is not None:
                        rKi = inv(rK)
                        if rKi is not None:
                            tau[(a, y)] = la.mul(ring, rH, t2, rKi)
                            changed = True
            for a1 in arrows:
                for a2 in arrows:
                    if a1.target != a2.source:
                        continue
                    c = orb.compose(a1, a2)
                    for z in X.fixed_points(a2.target).levels[0]:
                        if (c, z) in tau:
                            continue
                        t1, t2 = tau.get((a1, X.act(a2.rep, z))), tau.get((a2, z))
                        if t1 is not None and t2 is not None:
                            tau[(c, z)] = la.mul(ring, t1, t2)
                            changed = True

    for a in arrows:
        if orb.is_identity(a):
            for y in X.fixed_points(a.target).levels[0]:
                tau.setdefault((a, y), la.identity(ring, rk[(a.target, y)]))
    propagate()
    while True:
        missing = next((("t", k) for k in tau_keys if k not in tau), None) or \
                  next((("r", k) for k in edge_keys if k not in rho), None)
        if missing is None:
            break
        kind, k = missing
        if kind == "t":
            a, y = k
            r1, r2 = rk[(a.source, X.act(a.rep, y))], rk[(a.target, y)]
            if r1 != r2:
                raise CoefficientError(f"orbit map {X.group.names[a.rep]}: G/{X.group.fmt_subgroup(a.source)}→"
                                       f"G/{X.group.fmt_subgroup(a.target)} at {fmt(y)} joins modules of "
                                       f"ranks {r1} and {r2} and must be supplied")
            tau[k] = la.identity(ring, r1)
        else:
            H, e = k
            XH = X.fixed_points(H)
            r1, r2 = rk[(H, XH.d(1, e))], rk[(H, XH.d(0, e))]
            if r1 != r2:
                raise CoefficientError(f"edge {fmt(e)} joins modules of ranks {r1} and {r2} and must be supplied")
            rho[k] = la.identity(ring, r1)
        propagate()
    supplied = {"default_rank": default_rank, "ranks": dict(ranks or {}),
                "edges": dict(edges or {}), "orbit_maps": dict(orbit_maps or {})}
    return LocalCoefficientSystem(X, ring, rk, rho, tau, supplied)


# --- M₀ -----------------------------------------------------------------------------

@dataclass
class M0System:
    """Values at the basepoint of each fixed set, structure maps and the loop action."""

    M: LocalCoefficientSystem
    vertex: object
    modules: dict[Subgroup, int]
    structural: dict[OrbitMorphism, Matrix]

    def action(self, H: Subgroup, alpha: PiWord) -> Matrix:
        """Action of a loop α at the basepoint: M(b(α))⁻¹."""
        m = self.M.Pi.b(tuple(H), alpha)
        return la.inverse(self.M.ring, self.M.evaluate(m))

    def naturality_violations(self) -> list[str]:
        """M₀(ĝ)·action_K(α) = action_H(g·α)·M₀(ĝ) on edge generators."""
        R, X = self.M.ring, self.M.X
        out = []
        for a, T in self.structural.items():
            XK = X.fixed_points(a.target)
            for e in (XK.nondegenerate(1) if XK.N >= 1 else ()):
                alpha = PiWord(self.vertex, self.vertex, ((e, 1),))
                lhs = la.mul(R, T, self.action(a.target, alpha))
                rhs = la.mul(R, self.action(a.source, alpha.translate(X, a.rep)), T)
                if not la.equal(R, lhs, rhs):
                    out.append(f"action of {fmt(e)} is not natural along {X.group.names[a.rep]}")
        return out


def build_M0(M: LocalCoefficientSystem) -> M0System:
    v = M.one_vertex()
    modules = {H: M.rank(H, v) for H in M.Pi.orbits.objects}
    structural = {a: M.evaluate(M.Pi.structural(a, v)) for a in M.arrows()}
    return M0System(M, v, modules, structural)


# --- derived systems -----------------------------------------------------------------

def pullback_system(M: LocalCoefficientSystem, P: GSimplicialSet, F: SimplicialMap) -> LocalCoefficientSystem:
    """F*M for an equivariant map F: P -> X."""
    X = M.X
    Pi = EquivariantGroupoid(P)
    ranks, rho, tau = {}, {}, {}
    for H in Pi.orbits.objects:
        PH = P.fixed_points(H)
        for v in PH.levels[0]:
            ranks[(H, v)] = M.rank(H, F(v))
        for e in (PH.nondegenerate(1) if PH.N >= 1 else ()):
            rho[(H, e)] = M.edge_matrix(H, F(e))
    for a in Pi.orbits.all_morphisms():
        for y in P.fixed_points(a.target).levels[0]:
            tau[(a, y)] = M.tau[(a, F(y))]
    return LocalCoefficientSystem(P, M.ring, ranks, rho, tau)


def induced_from_quotient(X: GSimplicialSet, L: LocalCoefficientSystem, q: SimplicialMap
                          ) -> LocalCoefficientSystem:
    """Coefficients on a free G-set pulled back from a system L on its orbit complex.

    ``L`` lives on the quotient with the trivial group, ``q`` is the orbit map;
    all orbit-category matrices are identities.
    """
    triv = (L.X.group.identity,)
    Pi = EquivariantGroupoid(X)
    ranks, rho, tau = {}, {}, {}
    for H in Pi.orbits.objects:
        XH = X.fixed_points(H)
        for v in XH.levels[0]:
            ranks[(H, v)] = L.rank(triv, q(v))
        for e in (XH.nondegenerate(1) if XH.N >= 1 else ()):
            rho[(H, e)] = L.edge_matrix(triv, q(e))
    for a in Pi.orbits.all_morphisms():
        for y in X.fixed_points(a.target).levels[0]:
            tau[(a, y)] = la.identity(L.ring, ranks[(a.target, y)])
    return LocalCoefficientSystem(X, L.ring, ranks, rho, tau)


def gauge(M: LocalCoefficientSystem, P: Mapping[Obj, Matrix]) -> LocalCoefficientSystem:
    """Change of basis per object: M'(m) = P_source · M(m) · P_target⁻¹."""
    R = M.ring
    Pinv = {k: la.inverse(R, v) for k, v in P.items()}
    rho, tau = {}, {}
    for (H, e), A in M.rho.items():
        XH = M.X.fixed_points(H)
        a, b = edge_endpoints(XH, e)
        rho[(H, e)] = la.mul(R, P[(H, a)], A, Pinv[(H, b)])
    for (arr, y), A in M.tau.items():
        tau[(arr, y)] = la.mul(R, P[(arr.source, M.X.act(arr.rep, y))], A, Pinv[(arr.target, y)])
    return LocalCoefficientSystem(M.X, R, M.ranks, rho, tau)


def direct_sum(systems: list[LocalCoefficientSystem]) -> LocalCoefficientSystem:
    R, X = systems[0].ring, systems[0].X
    ranks = {k: sum(S.ranks[k] for S in systems) for k in systems[0].ranks}
    rho = {k: la.block_diag(R, [S.rho[k] for S in systems]) for k in systems[0].rho}
    tau = {k: la.block_diag(R, [S.tau[k] for S in systems]) for k in systems[0].tau}
    return LocalCoefficientSystem(X, R, ranks, rho, tau)


def sign_solutions(X: GSimplicialSet) -> tuple[list, list, Matrix]:
    """All rank-one ±1 systems: the relations, read additively over F_2.

    Returns (edge keys, orbit keys, basis of the solution space as columns).
    """
    F2 = GF(2)
    Pi = EquivariantGroupoid(X)
    orb = Pi.orbits
    ekeys = [(H, e) for H in orb.objects for e in (X.fixed_points(H).nondegenerate(1) if X.N >= 1 else ())]
    arrows = orb.all_morphisms()
    tkeys = [(a, y) for a in arrows for y in X.fixed_points(a.target).levels[0]]
    col = {k: i for i, k in enumerate(ekeys)}
    col.update({("t",) + k: len(ekeys) + i for i, k in enumerate(tkeys)})
    rows = []

    def row(terms):
        r = [0] * len(col)
        for k in terms:
            if k is not None:
                r[col[k]] ^= 1
        if any(r):
            rows.append(r)

    def ek(H, e):
        return None if X.fixed_points(H).is_degenerate(e) else (H, e)

    for H in orb.objects:
        XH = X.fixed_points(H)
        for x in (XH.nondegenerate(2) if XH.N >= 2 else ()):
            row([ek(H, XH.d(1, x)), ek(H, XH.d(2, x)), ek(H, XH.d(0, x))])
    for a in arrows:
        XK = X.fixed_points(a.target)
        if orb.is_identity(a):
            for y in XK.levels[0]:
                row([("t", a, y)])
        for e in (XK.nondegenerate(1) if XK.N >= 1 else ()):
            y, y2 = edge_endpoints(XK, e)
            row([("t", a, y), ek(a.target, e), ek(a.source, X.act(a.rep, e)), ("t", a, y2)])
    for a1 in arrows:
        for a2 in arrows:
            if a1.target == a2.source:
                c = orb.compose(a1, a2)
                for z in X.fixed_points(a2.target).levels[0]:
                    row([("t", c, z), ("t", a1, X.act(a2.rep, z)), ("t", a2, z)])
    A = la.matrix(F2, rows, (len(rows), len(col))) if rows else la.zeros(F2, 0, len(col))
    return ekeys, tkeys, la.nullspace(F2, A)


def _random_unimodular(ring: Ring, n: int, rng: random.Random) -> Matrix:
    P = la.identity(ring, n)
    for _ in range(rng.randint(0, 2 * n)):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        E = la.identity(ring, n)
        E[i, j] = ring(rng.choice((1, -1, 2, -2)))
        P = la.mul(ring, P, E)
    if rng.random() < 0.5:
        P[:, 0] = -P[:, 0]
    return la.normalize(ring, P)


def random_valid_system(X: GSimplicialSet, ring: Ring, rng: random.Random, max_rank: int = 3,
                        solutions=None) -> LocalCoefficientSystem:
    """A random sum of sign systems, gauge-transformed object by object."""
    ekeys, tkeys, basis = solutions or sign_solutions(X)
    r = rng.randint(1, max_rank)
    parts = []
    for _ in range(r):
        bits = [0] * (len(ekeys) + len(tkeys))
        for j in range(basis.shape[1]):
            if rng.random() < 0.5:
                bits = [(b + int(basis[i, j])) % 2 for i, b in enumerate(bits)]
        sign = lambda b: la.matrix(ring, [[-1 if b else 1]])
        rho = {k: sign(bits[i]) for i, k in enumerate(ekeys)}
        tau = {k: sign(bits[len(ekeys) + i]) for i, k in enumerate(tkeys)}
        ranks = {obj: 1 for obj in EquivariantGroupoid(X).objects()}
        parts.append(LocalCoefficientSystem(X, ring, ranks, rho, tau))
    S = direct_sum(parts)
    P = {obj: _random_unimodular(ring, r, rng) for obj in S.ranks}
    return gauge(S, P)
