"""Edge-path groupoids of fixed-point complexes and the equivariant groupoid ΠX.

A morphism (H, x) -> (K, y) of ΠX is a pair (ĝ, w): an orbit-category arrow
ĝ: G/H -> G/K together with an edge-path word w in X^H from x to g·y.  Words
are never compared modulo relations; consumers only evaluate coefficient
matrices along them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg as la
from .groups import OrbitCategory, OrbitMorphism, Subgroup
from .rings import ZZ
from .simplicial import GSimplicialSet, SimplicialError, TruncatedSimplicialSet, fmt

Letter = tuple[object, int]   # (nondegenerate edge, ±1)


class GroupoidError(ValueError):
    pass


class EmptyFixedPointComplex(GroupoidError):
    pass


@dataclass(frozen=True)
class PiWord:
    """An edge path; letters are traversed left to right."""

    source: object
    target: object
    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def then(self, other: "PiWord") -> "PiWord":
        if self.target != other.source:
            raise GroupoidError(f"path ending at {fmt(self.target)} cannot continue from {fmt(other.source)}")
        return PiWord(self.source, other.target, self.letters + other.letters)

    def inverse(self) -> "PiWord":
        return PiWord(self.target, self.source, tuple((e, -s) for e, s in reversed(self.letters)))

    def reduced(self) -> "PiWord":
        out: list[Letter] = []
        for e, s in self.letters:
            if out and out[-1] == (e, -s):
                out.pop()
            else:
                out.append((e, s))
        return PiWord(self.source, self.target, tuple(out))

    def translate(self, X: GSimplicialSet, g: int) -> "PiWord":
        """Letterwise left translation by a group element."""
        return PiWord(X.act(g, self.source), X.act(g, self.target),
                      tuple((X.act(g, e), s) for e, s in self.letters))

    def __str__(self) -> str:
        if not self.letters:
            return f"1_{fmt(self.source)}"
        return "·".join(fmt(e) + ("" if s > 0 else "⁻¹") for e, s in self.letters)


def edge_endpoints(X: TruncatedSimplicialSet, e) -> tuple:
    """(source, target) = (∂₁e, ∂₀e)."""
    return X.d(1, e), X.d(0, e)


def edge_word(X: TruncatedSimplicialSet, e, sign: int = 1) -> PiWord:
    """The word of a single edge; degenerate edges give the empty word."""
    a, b = edge_endpoints(X, e)
    if X.is_degenerate(e):
        return PiWord(a, a)
    return PiWord(a, b, ((e, 1),)) if sign > 0 else PiWord(b, a, ((e, -1),))


def check_word(X: TruncatedSimplicialSet, w: PiWord) -> None:
    """Raise unless w is a composable path of nondegenerate edges of X."""
    at = w.source
    if at not in X.index[0]:
        raise GroupoidError(f"{fmt(at)} is not a vertex")
    for e, s in w.letters:
        if X.N < 1 or e not in X.index[1] or X.is_degenerate(e):
            raise GroupoidError(f"{fmt(e)} is not a nondegenerate edge")
        a, b = edge_endpoints(X, e)
        start, end = (a, b) if s > 0 else (b, a)
        if start != at:
            raise GroupoidError(f"letter {fmt(e)}^{s} does not start at {fmt(at)}")
        at = end
    if at != w.target:
        raise GroupoidError(f"word ends at {fmt(at)}, not {fmt(w.target)}")


@dataclass(frozen=True)
class Presentation:
    basepoint: object
    tree: tuple
    generators: tuple
    relators: tuple[tuple[Letter, ...], ...]

    def loop(self, X: TruncatedSimplicialSet, e) -> PiWord:
        """The basepoint loop tree-path · e · tree-path⁻¹ standing for generator e."""
        paths = _tree_paths(X, self.basepoint, set(self.tree))
        a, b = edge_endpoints(X, e)
        return paths[a].then(edge_word(X, e)).then(paths[b].inverse())

    def abelianization(self) -> tuple[int, tuple[int, ...]]:
        """(free rank, torsion divisors) of the abelianized group."""
        idx = {g: k for k, g in enumerate(self.generators)}
        if not self.generators:
            return 0, ()
        rows = []
        for rel in self.relators:
            row = [0] * len(idx)
            for e, s in rel:
                row[idx[e]] += s
            rows.append(row)
        if not rows:
            return len(idx), ()
        A = la.matrix(ZZ, rows, (len(rows), len(idx)))
        divs = la.smith_normal_form(A).divisors
        return len(idx) - len(divs), tuple(d for d in divs if d > 1)

    def describe(self) -> str:
        gens = ", ".join(fmt(g) for g in self.generators)
        rels = ", ".join("·".join(fmt(e) + ("" if s > 0 else "⁻¹") for e, s in r) for r in self.relators)
        return f"⟨ {gens} | {rels} ⟩"


def _tree_paths(X: TruncatedSimplicialSet, root, tree: set) -> dict:
    """Paths from root to every vertex of its component along tree edges."""
    paths = {root: PiWord(root, root)}
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for e in tree:
                a, b = edge_endpoints(X, e)
                if a == v and b not in paths:
                    paths[b] = paths[v].then(edge_word(X, e))
                    nxt.append(b)
                elif b == v and a not in paths:
                    paths[a] = paths[v].then(edge_word(X, e, -1))
                    nxt.append(a)
        frontier = nxt
    return paths


def pi1_presentation(X: TruncatedSimplicialSet, basepoint=None) -> Presentation:
    """π₁ of the component of ``basepoint``: BFS spanning tree, non-tree edges as
    generators, one relator ∂₂x·∂₀x·(∂₁x)⁻¹ per nondegenerate 2-simplex."""
    if not X.levels[0]:
        raise EmptyFixedPointComplex("the fixed-point complex has no vertices")
    if basepoint is None:
        basepoint = X.levels[0][0]
    if basepoint not in X.index[0]:
        raise GroupoidError(f"{fmt(basepoint)} is not a vertex")
    edges = list(X.nondegenerate(1)) if X.N >= 1 else []
    seen = {basepoint}
    tree = []
    frontier = [basepoint]
    while frontier:
        nxt = []
        for v in frontier:
            for e in edges:
                a, b = edge_endpoints(X, e)
                for u, w in ((a, b), (b, a)):
                    if u == v and w not in seen:
                        seen.add(w)
                        tree.append(e)
                        nxt.append(w)
        frontier = nxt
    tset = set(tree)
    comp_edges = [e for e in edges if edge_endpoints(X, e)[0] in seen]
    gens = tuple(e for e in comp_edges if e not in tset)
    relators = []
    if X.N >= 2:
        for x in X.nondegenerate(2):
            if X.vertex(x, 0) not in seen:
                continue
            rel = []
            for e, s in ((X.d(2, x), 1), (X.d(0, x), 1), (X.d(1, x), -1)):
                if not X.is_degenerate(e) and e not in tset:
                    rel.append((e, s))
            relators.append(tuple(rel))
    return Presentation(basepoint, tuple(tree), gens, tuple(relators))


# --- ΠX ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivariantGroupoidMorphism:
    source: tuple[Subgroup, object]
    target: tuple[Subgroup, object]
    arrow: OrbitMorphism
    word: PiWord

    def __str__(self) -> str:
        return f"({self.arrow.rep}, {self.word})"


class EquivariantGroupoid:
    """ΠX for a G-simplicial set in pair encoding."""

    def __init__(self, X: GSimplicialSet):
        self.X = X
        self.G = X.group
        self.orbits = OrbitCategory(X.group)

    def fixed(self, H: Subgroup) -> TruncatedSimplicialSet:
        return self.X.fixed_points(H)

    def objects(self) -> list[tuple[Subgroup, object]]:
        return [(H, v) for H in self.orbits.objects for v in self.fixed(H).levels[0]]

    def check(self, m: EquivariantGroupoidMorphism) -> None:
        (H, x), (K, y) = m.source, m.target
        if (m.arrow.source, m.arrow.target) != (H, K):
            raise GroupoidError("orbit arrow does not match the objects")
        if not self.orbits.is_morphism(H, K, m.arrow.rep):
            raise GroupoidError("orbit arrow violates subconjugacy")
        XH = self.fixed(H)
        if y not in self.fixed(K).index[0]:
            raise GroupoidError(f"{fmt(y)} is not a vertex of X^K")
        gy = self.X.act(m.arrow.rep, y)
        if m.word.source != x or m.word.target != gy:
            raise GroupoidError(f"word must run from {fmt(x)} to {fmt(gy)}")
        check_word(XH, m.word)

    def identity(self, H: Subgroup, x) -> EquivariantGroupoidMorphism:
        H = tuple(H)
        return EquivariantGroupoidMorphism((H, x), (H, x), self.orbits.identity(H), PiWord(x, x))

    def compose(self, m2: EquivariantGroupoidMorphism, m1: EquivariantGroupoidMorphism
                ) -> EquivariantGroupoidMorphism:
        """m2 ∘ m1 = (ĝ₁ĝ₂, w₁ followed by g₁·w₂)."""
        if m1.target != m2.source:
            raise GroupoidError(f"cannot compose: {m1.target} ≠ {m2.source}")
        arrow = self.orbits.compose(m1.arrow, m2.arrow)
        w2 = m2.word.translate(self.X, m1.arrow.rep)
        return EquivariantGroupoidMorphism(m1.source, m2.target, arrow, m1.word.then(w2))

    def b(self, H: Subgroup, alpha: PiWord) -> EquivariantGroupoidMorphism:
        H = tuple(H)
        return EquivariantGroupoidMorphism((H, alpha.source), (H, alpha.target),
                                           self.orbits.identity(H), alpha)

    def structural(self, arrow: OrbitMorphism, y) -> EquivariantGroupoidMorphism:
        """[ĝ, k]: (H, g·y) -> (K, y) with the constant path."""
        H, K = arrow.source, arrow.target
        if y not in self.fixed(K).index[0]:
            raise GroupoidError(f"{fmt(y)} is not a vertex of X^K")
        gy = self.X.act(arrow.rep, y)
        return EquivariantGroupoidMorphism((H, gy), (K, y), arrow, PiWord(gy, gy))

    def sigma_star(self, H: Subgroup, x) -> EquivariantGroupoidMorphism:
        """σ_*: from the 0th vertex of x to its 1st vertex along the leading edge."""
        XH = self.fixed(H)
        if XH.dim(x) < 1:
            raise GroupoidError("σ_* needs a simplex of dimension at least 1")
        w = edge_word(XH, XH.leading_edge(x))
        return self.b(H, w)

    def g_star(self, arrow: OrbitMorphism, tau: tuple[Subgroup, object], eta: tuple[Subgroup, object]
               ) -> EquivariantGroupoidMorphism:
        """g_*: η_H -> τ_K for η = g·τ, as the structural arrow at basepoints."""
        (K, t), (H, s) = tau, eta
        if (arrow.source, arrow.target) != (tuple(H), tuple(K)):
            raise GroupoidError("orbit arrow does not run from η's subgroup to τ's")
        if self.X.act(arrow.rep, t) != s:
            raise GroupoidError(f"{fmt(s)} is not {self.G.names[arrow.rep]}·{fmt(t)}")
        return self.structural(arrow, self.X.base.basepoint(t))

    def random_morphism(self, rng, source=None, target=None, max_len: int = 4
                        ) -> EquivariantGroupoidMorphism:
        """A random morphism with a random walk word; used by the property suites."""
        if source is None:
            H, x = rng.choice(self.objects())
        else:
            H, x = source
        targets = [(K, y) for K in self.orbits.objects for m in self.orbits.hom_set(H, K)
                   for y in self.fixed(K).levels[0]] if target is None else [target]
        rng.shuffle(targets)
        XH = self.fixed(H)
        comp = next(c for c in XH.connected_components() if x in c)
        for K, y in targets:
            arrows = self.orbits.hom_set(H, K)
            rng.shuffle(arrows)
            for a in arrows:
                gy = self.X.act(a.rep, y)
                if gy in comp:
                    w = random_path(XH, rng, x, gy, max_len)
                    return EquivariantGroupoidMorphism((H, x), (K, y), a, w)
        raise GroupoidError("no morphism with the requested endpoints")


def random_path(X: TruncatedSimplicialSet, rng, start, end, max_len: int = 4) -> PiWord:
    """A random walk of ≤ max_len steps from start, then a tree path to end."""
    edges = list(X.nondegenerate(1)) if X.N >= 1 else []
    w = PiWord(start, start)
    for _ in range(rng.randint(0, max_len)):
        options = [(e, s) for e in edges for s in (1, -1)
                   if edge_endpoints(X, e)[0 if s > 0 else 1] == w.target]
        if not options:
            break
        e, s = rng.choice(options)
        w = w.then(edge_word(X, e, s))
    pres = pi1_presentation(X, w.target)
    paths = _tree_paths(X, w.target, set(pres.tree))
    if end not in paths:
        raise GroupoidError(f"{fmt(end)} is not reachable from {fmt(start)}")
    return w.then(paths[end])
