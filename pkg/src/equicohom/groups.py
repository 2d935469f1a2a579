"""Finite groups from multiplication tables, subgroup lattices, and the orbit category."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

Subgroup = tuple[int, ...]


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Elements ``0..order-1`` with names; ``table[a][b]`` is the index of ``a·b``."""

    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    name: str = "G"

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise GroupError("a group needs at least one element")
        if len(set(self.names)) != n:
            raise GroupError("element names must be distinct")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupError(f"multiplication table must be {n}×{n}")
        for row in self.table:
            for c in row:
                if not (isinstance(c, int) and 0 <= c < n):
                    raise GroupError(f"table entry {c!r} is not an element")
        ids = [e for e in range(n) if all(self.table[e][a] == a and self.table[a][e] == a for a in range(n))]
        if not ids:
            raise GroupError("no identity element")
        for a in range(n):
            if sorted(self.table[a]) != list(range(n)):
                raise GroupError(f"row of {self.names[a]} is not a permutation, so inverses fail")
        t = self.table
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise GroupError(f"associativity fails at ({self.names[a]}, {self.names[b]}, {self.names[c]})")

    @classmethod
    def from_names(cls, names: Sequence[str], table: Sequence[Sequence[str]], name: str = "G") -> "FiniteGroup":
        idx = {s: k for k, s in enumerate(names)}
        try:
            tbl = tuple(tuple(idx[c] for c in row) for row in table)
        except KeyError as exc:
            raise GroupError(f"unknown element {exc.args[0]!r} in the multiplication table") from None
        return cls(tuple(names), tbl, name)

    @property
    def order(self) -> int:
        return len(self.names)

    @cached_property
    def identity(self) -> int:
        return next(e for e in range(self.order) if self.table[e][e] == e)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def _inverse(self) -> tuple[int, ...]:
        return tuple(next(b for b in range(self.order) if self.table[a][b] == self.identity)
                     for a in range(self.order))

    def inv(self, a: int) -> int:
        return self._inverse[a]

    def element(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GroupError(f"unknown group element {name!r}") from None

    def conjugate(self, H: Subgroup, g: int) -> Subgroup:
        """g⁻¹ H g."""
        gi = self.inv(g)
        return tuple(sorted({self.mul(self.mul(gi, h), g) for h in H}))

    def fmt_subgroup(self, H: Subgroup) -> str:
        if len(H) == 1:
            return "{e}" if H == (self.identity,) else "{" + self.names[H[0]] + "}"
        if len(H) == self.order:
            return self.name
        return "{" + ",".join(self.names[h] for h in H) + "}"

    def generated(self, gens) -> Subgroup:
        out = {self.identity}
        frontier = list(out)
        gens = list(gens)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.mul(a, g)
                    if b not in out:
                        out.add(b)
                        nxt.append(b)
            frontier = nxt
        return tuple(sorted(out))

    def is_subgroup(self, S) -> bool:
        S = set(S)
        return self.identity in S and all(self.mul(a, self.inv(b)) in S for a in S for b in S)


def cyclic(n: int) -> FiniteGroup:
    """ℤ/n with elements e, g1, …; for n = 2 the generator is called t."""
    names = ("e", "t") if n == 2 else ("e",) + tuple(f"g{k}" for k in range(1, n))
    return FiniteGroup(names, tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z/{n}")


def trivial_group() -> FiniteGroup:
    return FiniteGroup(("e",), ((0,),), "1")


def symmetric3() -> FiniteGroup:
    from itertools import permutations
    perms = sorted(permutations(range(3)))
    names = ["".join(map(str, p)) for p in perms]
    names[0] = "e"
    idx = {p: k for k, p in enumerate(perms)}
    table = tuple(tuple(idx[tuple(p[q[i]] for i in range(3))] for q in perms) for p in perms)
    return FiniteGroup(tuple(names), table, "S3")


def subgroups(G: FiniteGroup) -> list[Subgroup]:
    """All subgroups, ordered by size then lexicographically.

    Every subgroup is generated by its cyclic subgroups, so closing the set of
    cyclic subgroups under joins finds them all.
    """
    found = {G.generated([g]) for g in range(G.order)}
    found.add((G.identity,))
    frontier = set(found)
    while frontier:
        new = set()
        for A in frontier:
            for B in list(found):
                J = G.generated(set(A) | set(B))
                if J not in found and J not in new:
                    new.add(J)
        found |= new
        frontier = new
    for S in found:
        if not G.is_subgroup(S):
            raise GroupError(f"internal: {S} is not closed")
    return sorted(found, key=lambda S: (len(S), S))


@dataclass(frozen=True)
class OrbitMorphism:
    """The G-map G/H -> G/K, gH ↦ (g·rep)K, for a coset rep·K with rep⁻¹ H rep ⊆ K."""

    source: Subgroup
    target: Subgroup
    rep: int


class OrbitCategory:
    def __init__(self, G: FiniteGroup):
        self.G = G
        self.objects = subgroups(G)

    def coset_rep(self, g: int, K: Subgroup) -> int:
        return min(self.G.mul(g, k) for k in K)

    def is_morphism(self, H: Subgroup, K: Subgroup, g: int) -> bool:
        return set(self.G.conjugate(H, g)) <= set(K)

    def hom_set(self, H: Subgroup, K: Subgroup) -> list[OrbitMorphism]:
        reps = sorted({self.coset_rep(g, K) for g in range(self.G.order) if self.is_morphism(H, K, g)})
        return [OrbitMorphism(tuple(H), tuple(K), r) for r in reps]

    def morphism(self, H: Subgroup, K: Subgroup, g: int) -> OrbitMorphism:
        if not self.is_morphism(H, K, g):
            raise GroupError(f"{self.G.names[g]}⁻¹ H {self.G.names[g]} ⊄ K for H={self.G.fmt_subgroup(H)}, "
                             f"K={self.G.fmt_subgroup(K)}")
        return OrbitMorphism(tuple(H), tuple(K), self.coset_rep(g, K))

    def identity(self, H: Subgroup) -> OrbitMorphism:
        return OrbitMorphism(tuple(H), tuple(H), self.coset_rep(self.G.identity, H))

    def compose(self, m1: OrbitMorphism, m2: OrbitMorphism) -> OrbitMorphism:
        """m1: G/H -> G/K followed by m2: G/K -> G/L, i.e. the coset g₁g₂L."""
        if m1.target != m2.source:
            raise GroupError("orbit morphisms are not composable")
        return OrbitMorphism(m1.source, m2.target, self.coset_rep(self.G.mul(m1.rep, m2.rep), m2.target))

    def all_morphisms(self) -> list[OrbitMorphism]:
        return [m for H in self.objects for K in self.objects for m in self.hom_set(H, K)]

    def is_identity(self, m: OrbitMorphism) -> bool:
        return m.source == m.target and m.rep == self.coset_rep(self.G.identity, m.source)
