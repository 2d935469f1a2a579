"""Symbolic universal covers of one-vertex fixed-point complexes.

A simplex of the cover of X^H is a pair (γ, x): a loop word γ at the vertex
and a simplex x of X^H.  Words are kept freely reduced.  The cover is never
enumerated; callers work with the representatives (empty word, x).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .groupoid import PiWord, edge_word
from .groups import OrbitMorphism, Subgroup
from .simplicial import GSimplicialSet, fmt


@dataclass(frozen=True)
class CoverSimplex:
    subgroup: Subgroup
    word: PiWord
    simplex: object

    def __str__(self) -> str:
        return f"({self.word}, {fmt(self.simplex)})"


def representative(H: Subgroup, x, v) -> CoverSimplex:
    return CoverSimplex(tuple(H), PiWord(v, v), x)


def twisting_word(X: GSimplicialSet, H: Subgroup, x) -> PiWord:
    """The class of ∂_(2,…,n)x (x itself when n = 1)."""
    XH = X.fixed_points(H)
    return edge_word(XH, XH.leading_edge(x))


def cover_face(X: GSimplicialSet, i: int, c: CoverSimplex) -> CoverSimplex:
    XH = X.fixed_points(c.subgroup)
    x = c.simplex
    if XH.dim(x) < 1:
        raise ValueError("vertices have no faces")
    if i > 0:
        return CoverSimplex(c.subgroup, c.word, XH.d(i, x))
    w = c.word.then(twisting_word(X, c.subgroup, x)).reduced()
    return CoverSimplex(c.subgroup, w, XH.d(0, x))


def cover_degeneracy(X: GSimplicialSet, i: int, c: CoverSimplex) -> CoverSimplex:
    return CoverSimplex(c.subgroup, c.word, X.fixed_points(c.subgroup).s(i, c.simplex))


def cover_action(sigma: PiWord, c: CoverSimplex) -> CoverSimplex:
    """σ·(γ, x) = (γσ⁻¹, x): the path σ⁻¹ followed by γ."""
    return CoverSimplex(c.subgroup, sigma.inverse().then(c.word).reduced(), c.simplex)


def xi(c: CoverSimplex) -> PiWord:
    """The class of the path from the base lift to a cover vertex."""
    return c.word


def project(c: CoverSimplex):
    return c.simplex


def cover_map(X: GSimplicialSet, arrow: OrbitMorphism, c: CoverSimplex) -> CoverSimplex:
    """ã: cover of X^K -> cover of X^H for ĝ: G/H -> G/K."""
    if c.subgroup != arrow.target:
        raise ValueError("cover simplex does not live over the arrow's target")
    g = arrow.rep
    return CoverSimplex(arrow.source, c.word.translate(X, g), X.act(g, c.simplex))


def _cyclic_reduce(letters):
    letters = list(letters)
    while len(letters) >= 2 and letters[0] == (letters[-1][0], -letters[-1][1]):
        letters = letters[1:-1]
    return tuple(letters)


def _rotations(letters):
    return {letters[k:] + letters[:k] for k in range(len(letters))} if letters else {()}


def triangle_relator(X: GSimplicialSet, H: Subgroup, y) -> tuple:
    """∂₂y·∂₀y·(∂₁y)⁻¹ with degenerate edges dropped, freely reduced."""
    XH = X.fixed_points(H)
    v = XH.levels[0][0]
    w = PiWord(v, v)
    for e, s in ((XH.d(2, y), 1), (XH.d(0, y), 1), (XH.d(1, y), -1)):
        w = w.then(edge_word(XH, e, s))
    return w.reduced().letters


def identity_failures(X: GSimplicialSet, H: Subgroup, words, max_level: int | None = None) -> list[str]:
    """Check the simplicial identities on cover simplices (γ, x) for the given words.

    Equalities are tested on freely reduced words.  The one exception is
    ∂₀∂₁ = ∂₀∂₀, where the two words differ by the relator of the triangle
    on vertices 0, 1, 2 of x; there the discrepancy must be that relator up
    to cyclic rotation and inversion.
    """
    XH = X.fixed_points(H)
    N = XH.N if max_level is None else min(max_level, XH.N)
    H = tuple(H)
    out = []
    d = lambda i, c: cover_face(X, i, c)
    s = lambda i, c: cover_degeneracy(X, i, c)
    for n in range(N + 1):
        for x, g in iproduct(XH.levels[n], words):
            c = CoverSimplex(H, g.reduced(), x)
            if n >= 2:
                for j in range(n + 1):
                    for i in range(j):
                        a, b = d(i, d(j, c)), d(j - 1, d(i, c))
                        if a == b:
                            continue
                        if (i, j) == (0, 1) and a.simplex == b.simplex:
                            disc = _cyclic_reduce(b.word.inverse().then(a.word).reduced().letters)
                            tri = XH.faces(x, tuple(range(3, n + 1)))
                            rel = triangle_relator(X, H, tri)
                            inv = PiWord(None, None, rel).inverse().letters
                            if disc in _rotations(_cyclic_reduce(rel)) | _rotations(_cyclic_reduce(inv)):
                                continue
                        out.append(f"∂{i}∂{j} = ∂{j - 1}∂{i} fails on {c}: {a} vs {b}")
            if n < XH.N:
                for j in range(n + 1):
                    sc = s(j, c)
                    for i in range(n + 2):
                        lhs = d(i, sc)
                        if i in (j, j + 1):
                            rhs = c
                        elif n == 0:
                            continue
                        elif i < j:
                            rhs = s(j - 1, d(i, c))
                        else:
                            rhs = s(j, d(i - 1, c))
                        if lhs != rhs:
                            out.append(f"∂{i}s{j} identity fails on {c}: {lhs} vs {rhs}")
            if n + 2 <= XH.N:
                for j in range(n + 1):
                    for i in range(j + 1):
                        if s(i, s(j, c)) != s(j + 1, s(i, c)):
                            out.append(f"s{i}s{j} = s{j + 1}s{i} fails on {c}")
    return out


def action_failures(X: GSimplicialSet, H: Subgroup, words, sigmas) -> list[str]:
    """The loop action commutes with cover faces and degeneracies and is free."""
    XH = X.fixed_points(H)
    H = tuple(H)
    out = []
    for n in range(XH.N + 1):
        for x, g, sg in iproduct(XH.levels[n], words, sigmas):
            c = CoverSimplex(H, g.reduced(), x)
            moved = cover_action(sg, c)
            if moved == c and sg.reduced().letters:
                out.append(f"{sg} fixes {c}")
            for i in range(n + 1 if n else 0):
                if cover_face(X, i, moved) != cover_action(sg, cover_face(X, i, c)):
                    out.append(f"action of {sg} does not commute with ∂{i} on {c}")
            if n < XH.N:
                for i in range(n + 1):
                    if cover_degeneracy(X, i, moved) != cover_action(sg, cover_degeneracy(X, i, c)):
                        out.append(f"action of {sg} does not commute with s{i} on {c}")
    return out


def words_up_to(X: GSimplicialSet, H: Subgroup, length: int) -> list[PiWord]:
    """All freely reduced loop words of at most the given length."""
    XH = X.fixed_points(H)
    v = XH.levels[0][0]
    letters = [(e, s) for e in (XH.nondegenerate(1) if XH.N >= 1 else ()) for s in (1, -1)]
    out = [PiWord(v, v)]
    layer = [()]
    for _ in range(length):
        nxt = []
        for w in layer:
            for l in letters:
                if w and w[-1] == (l[0], -l[1]):
                    continue
                nxt.append(w + (l,))
        out += [PiWord(v, v, w) for w in nxt]
        layer = nxt
    return out
