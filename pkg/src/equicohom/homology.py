"""Finite cochain complexes of free modules and their cohomology."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .linalg import Matrix
from .rings import Ring


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class FinCochainComplex:
    """Free modules R^{ranks[n]} with differentials ``d[n]: C^n -> C^{n+1}``.

    ``d[n]`` has shape ``(ranks[n+1], ranks[n])``; there is one fewer
    differential than there are ranks, so the top degree carries no outgoing
    map and its cohomology is not defined.
    """

    ring: Ring
    ranks: tuple[int, ...]
    d: tuple[Matrix, ...]

    def __post_init__(self):
        if len(self.d) != len(self.ranks) - 1:
            raise ComplexError("need exactly one differential between consecutive degrees")
        for n, dn in enumerate(self.d):
            if dn.shape != (self.ranks[n + 1], self.ranks[n]):
                raise ComplexError(f"d[{n}] has shape {dn.shape}, expected "
                                   f"{(self.ranks[n + 1], self.ranks[n])}")
        for n in range(len(self.d) - 1):
            if not la.is_zero(self.ring, la.mul(self.ring, self.d[n + 1], self.d[n])):
                raise ComplexError(f"d[{n + 1}] ∘ d[{n}] ≠ 0")

    @property
    def top(self) -> int:
        """Highest degree whose cohomology is computable."""
        return len(self.d) - 1


@dataclass(frozen=True)
class DegreeCohomology:
    rank: int
    torsion: tuple[int, ...] = ()

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("ℤ" if self.rank == 1 else f"ℤ^{self.rank}")
        parts += [f"ℤ/{t}" for t in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"

    def as_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class CohomologyResult:
    ring: Ring
    degrees: dict[int, DegreeCohomology] = field(default_factory=dict)

    def __getitem__(self, n: int) -> DegreeCohomology:
        return self.degrees[n]

    def ranks(self) -> tuple[int, ...]:
        return tuple(self.degrees[n].rank for n in sorted(self.degrees))

    def describe(self, n: int) -> str:
        h = self.degrees[n]
        if self.ring.is_field:
            return "0" if h.rank == 0 else f"{self.ring}^{h.rank}" if h.rank > 1 else str(self.ring)
        return str(h)

    def as_dict(self) -> dict:
        return {str(n): h.as_dict() for n, h in sorted(self.degrees.items())}


def _rank_and_divisors(ring: Ring, A: Matrix) -> tuple[int, tuple[int, ...]]:
    if A.size == 0:
        return 0, ()
    if ring.kind == "Z":
        divs = la.smith_normal_form(A).divisors
        return len(divs), tuple(d for d in divs if d > 1)
    return la.rank(ring, A), ()


def cohomology(C: FinCochainComplex, degrees=None) -> CohomologyResult:
    """H^n = ker d_n / im d_{n-1}; free rank and torsion over ℤ, dimension over a field."""
    if degrees is None:
        degrees = range(C.top + 1)
    out = {}
    cache: dict[int, tuple[int, tuple[int, ...]]] = {}

    def rk(n):
        if n < 0 or n > C.top:
            return 0, ()
        if n not in cache:
            cache[n] = _rank_and_divisors(C.ring, C.d[n])
        return cache[n]

    for n in degrees:
        if n < 0 or n > C.top:
            raise ComplexError(f"degree {n} outside the computable range 0..{C.top}")
        r_out, _ = rk(n)
        r_in, tors = rk(n - 1)
        out[n] = DegreeCohomology(C.ranks[n] - r_out - r_in, tors)
    return CohomologyResult(C.ring, out)


@dataclass(frozen=True)
class CohomologyBasis:
    """Explicit representatives for H^n over a field.

    ``reps`` are cocycle columns whose classes form a basis; ``coords`` sends
    a cocycle to its coordinates in that basis.
    """

    ring: Ring
    boundaries: Matrix
    reps: Matrix

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    def coords(self, z: Matrix) -> Matrix:
        nb = self.boundaries.shape[1]
        big = np.concatenate([self.boundaries, self.reps], axis=1) if nb else self.reps
        sol = la.solve(self.ring, big, z)
        if sol is None:
            raise ComplexError("vector is not a cocycle")
        return sol[nb:, :]


def cohomology_basis(C: FinCochainComplex, n: int) -> CohomologyBasis:
    if not C.ring.is_field:
        raise ComplexError("explicit cohomology bases are only provided over fields")
    R = C.ring
    Z = la.nullspace(R, C.d[n]) if n <= C.top else None
    if Z is None:
        raise ComplexError(f"degree {n} outside the computable range")
    B = la.column_basis(R, C.d[n - 1]) if n > 0 else la.zeros(R, C.ranks[n], 0)
    reps = []
    span = B
    for j in range(Z.shape[1]):
        z = Z[:, j:j + 1]
        if span.shape[1] == 0 or not la.in_span(R, span, z):
            reps.append(z)
            span = np.concatenate([span, z], axis=1) if span.shape[1] else z
    reps_m = np.concatenate(reps, axis=1) if reps else la.zeros(R, C.ranks[n], 0)
    return CohomologyBasis(R, B, reps_m)


def induced_map(source: FinCochainComplex, target: FinCochainComplex,
                chain_map: Matrix, n: int) -> Matrix:
    """Matrix of H^n(source) -> H^n(target) for a cochain map given in degree n."""
    hs = cohomology_basis(source, n)
    ht = cohomology_basis(target, n)
    images = la.mul(source.ring, chain_map, hs.reps)
    return ht.coords(images) if hs.dim else la.zeros(source.ring, ht.dim, 0)
