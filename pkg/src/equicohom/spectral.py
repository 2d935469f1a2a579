"""Spectral sequences of finite filtered cochain complexes over a field.

For a decreasing filtration F^0 = C ⊇ F^1 ⊇ … ⊇ F^{P+1} = 0 stable under d,
the pages are the subquotients

    Z_r^p = F^p ∩ d⁻¹(F^{p+r}),   B_r^p = F^p ∩ d(F^{p-r}),
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + B_{r-1}^p),

graded by total degree n = p + q.  Each page carries explicit representative
cocycles so the differential d_r can be written down as a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg as la
from .homology import FinCochainComplex, cohomology
from .linalg import Matrix


class FiltrationError(ValueError):
    pass


@dataclass(frozen=True)
class FilteredComplex:
    """A cochain complex over a field with a decreasing, d-stable filtration.

    ``levels[n][p]`` is a matrix whose columns span F^p C^n for
    ``p = 0..length``; F^0 must be everything and F^{length+1} is zero.
    """

    complex: FinCochainComplex
    levels: tuple[tuple[Matrix, ...], ...]

    def __post_init__(self):
        C = self.complex
        if not C.ring.is_field:
            raise FiltrationError("spectral sequences are computed over fields only")
        if len(self.levels) != len(C.ranks):
            raise FiltrationError("one filtration per degree is required")
        for n, lv in enumerate(self.levels):
            if la.rank(C.ring, lv[0]) != C.ranks[n]:
                raise FiltrationError(f"F^0 C^{n} is not all of C^{n}")
            for p in range(1, len(lv)):
                if not _contained(C.ring, lv[p], lv[p - 1]):
                    raise FiltrationError(f"F^{p} C^{n} is not contained in F^{p - 1} C^{n}")
        bad = self.stability_violation()
        if bad is not None:
            raise FiltrationError(f"filtration not d-stable: d(F^{bad[1]} C^{bad[0]}) ⊄ F^{bad[1]}")

    @classmethod
    def from_degrees(cls, C: FinCochainComplex, degrees) -> "FilteredComplex":
        """Filtration by an adapted basis: basis vector i of C^n has degree ``degrees[n][i]``."""
        length = max((max(ds) for ds in degrees if len(ds)), default=0)
        levels = []
        for n, ds in enumerate(degrees):
            eye = la.identity(C.ring, C.ranks[n])
            levels.append(tuple(eye[:, [i for i, d in enumerate(ds) if d >= p]]
                                for p in range(length + 1)))
        return cls(C, tuple(levels))

    @property
    def length(self) -> int:
        return max(len(lv) for lv in self.levels) - 1

    def F(self, p: int, n: int) -> Matrix:
        lv = self.levels[n]
        if p <= 0:
            return lv[0]
        if p >= len(lv):
            return la.zeros(self.complex.ring, self.complex.ranks[n], 0)
        return lv[p]

    def stability_violation(self):
        C = self.complex
        for n, dn in enumerate(C.d):
            for p in range(len(self.levels[n])):
                img = la.mul(C.ring, dn, self.F(p, n))
                if not _contained(C.ring, img, self.F(p, n + 1)):
                    return n, p
        return None


def _contained(ring, A: Matrix, B: Matrix) -> bool:
    if A.shape[1] == 0 or la.is_zero(ring, A):
        return True
    if B.shape[1] == 0:
        return False
    return la.rank(ring, np.concatenate([B, A], axis=1)) == la.rank(ring, B)


@dataclass
class SpectralPage:
    """E_r with dimensions and differentials d_r: E_r^{p,q} -> E_r^{p+r,q-r+1}."""

    r: int
    dims: dict[tuple[int, int], int] = field(default_factory=dict)
    differentials: dict[tuple[int, int], Matrix] = field(default_factory=dict)

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def total(self, n: int) -> int:
        return sum(d for (p, q), d in self.dims.items() if p + q == n)

    def is_degenerate(self) -> bool:
        """True when every differential on this page vanishes."""
        return all(M.size == 0 or not any(x for x in M.flat)
                   for M in self.differentials.values())


class _Subquotients:
    def __init__(self, FC: FilteredComplex):
        self.FC = FC
        self.C = FC.complex
        self.R = FC.complex.ring
        self._z: dict = {}
        self._b: dict = {}

    def Z(self, r: int, p: int, n: int) -> Matrix:
        key = (r, p, n)
        if key not in self._z:
            Fp = self.FC.F(p, n)
            if n > self.C.top:
                raise FiltrationError(f"degree {n} has no outgoing differential")
            self._z[key] = la.preimage(self.R, self.C.d[n], self.FC.F(p + r, n + 1), Fp)
        return self._z[key]

    def B(self, r: int, p: int, n: int) -> Matrix:
        key = (r, p, n)
        if key not in self._b:
            if n == 0:
                self._b[key] = la.zeros(self.R, self.C.ranks[0], 0)
            else:
                img = la.column_basis(self.R, la.mul(self.R, self.C.d[n - 1], self.FC.F(p - r, n - 1)))
                self._b[key] = la.intersect(self.R, self.FC.F(p, n), img)
        return self._b[key]

    def denominator(self, r: int, p: int, n: int) -> Matrix:
        return la.span_sum(self.R, self.Z(r - 1, p + 1, n), self.B(r - 1, p, n))

    def term(self, r: int, p: int, n: int) -> tuple[Matrix, Matrix]:
        """(denominator basis, representatives completing it to a basis of Z_r^p)."""
        den = self.denominator(r, p, n)
        Z = self.Z(r, p, n)
        span = den
        reps = []
        for j in range(Z.shape[1]):
            z = Z[:, j:j + 1]
            if span.shape[1] == 0 or not la.in_span(self.R, span, z):
                reps.append(z)
                span = np.concatenate([span, z], axis=1) if span.shape[1] else z
        reps_m = np.concatenate(reps, axis=1) if reps else la.zeros(self.R, self.C.ranks[n], 0)
        return den, reps_m

    def dim(self, r: int, p: int, n: int) -> int:
        return self.Z(r, p, n).shape[1] - self.denominator(r, p, n).shape[1]


def spectral_pages(FC: FilteredComplex, r_max: int, with_differentials: bool = True
                   ) -> "SpectralSequence":
    """Pages E_0..E_{r_max} and E_∞ for total degrees 0..top."""
    return SpectralSequence(FC, r_max, with_differentials)


class SpectralSequence:
    def __init__(self, FC: FilteredComplex, r_max: int, with_differentials: bool = True):
        self.FC = FC
        self.r_max = r_max
        self._sq = _Subquotients(FC)
        self.top = FC.complex.top
        self.pages = [self._page(r, with_differentials) for r in range(r_max + 1)]

    def _page(self, r: int, with_differentials: bool) -> SpectralPage:
        sq = self._sq
        page = SpectralPage(r)
        terms = {}
        for n in range(self.top + 1):
            for p in range(self.FC.length + 1):
                den, reps = sq.term(r, p, n)
                terms[p, n] = (den, reps)
                page.dims[p, n - p] = reps.shape[1]
        if with_differentials:
            R = self.FC.complex.ring
            for (p, n), (den, reps) in terms.items():
                if n + 1 > self.top or reps.shape[1] == 0:
                    continue
                if (p + r, n + 1) not in terms:
                    continue
                tden, treps = terms[p + r, n + 1]
                if treps.shape[1] == 0:
                    continue
                img = la.mul(R, self.FC.complex.d[n], reps)
                big = np.concatenate([tden, treps], axis=1) if tden.shape[1] else treps
                sol = la.solve(R, big, img)
                if sol is None:
                    raise FiltrationError(f"d_{r} image escapes Z_{r} at ({p},{n - p})")
                page.differentials[p, n - p] = sol[tden.shape[1]:, :]
        return page

    @cached_property
    def infinity(self) -> SpectralPage:
        r = self.FC.length + 2
        page = SpectralPage(r)
        for n in range(self.top + 1):
            for p in range(self.FC.length + 1):
                page.dims[p, n - p] = self._sq.dim(r, p, n)
        return page

    def collapse_page(self) -> int | None:
        """First r ≥ 1 from which every computed differential vanishes."""
        for r in range(1, self.r_max + 1):
            if all(pg.is_degenerate() for pg in self.pages[r:]):
                inf = self.infinity
                if all(self.pages[r].dims.get(k, 0) == inf.dims.get(k, 0)
                       for k in set(inf.dims) | set(self.pages[r].dims)
                       if k[0] + k[1] <= self.top - 1):
                    return r
        return None

    def convergence(self) -> dict[int, tuple[int, int]]:
        """n -> (Σ_{p+q=n} dim E_∞^{p,q}, dim H^n(total))."""
        H = cohomology(self.FC.complex)
        return {n: (self.infinity.total(n), H[n].rank) for n in range(self.top + 1)}

    def page_homology_mismatches(self) -> list[tuple[int, int, int, int, int]]:
        """Compare dim E_{r+1} from the subquotient formula with H(E_r, d_r).

        Only bidegrees whose incoming and outgoing differentials are both
        available are compared.  Returns (r, p, q, direct, via-homology).
        """
        bad = []
        R = self.FC.complex.ring
        for r in range(len(self.pages) - 1):
            pg, nxt = self.pages[r], self.pages[r + 1]
            for (p, q), d in pg.dims.items():
                n = p + q
                if n + 1 > self.top:
                    continue
                out = pg.differentials.get((p, q))
                inc = pg.differentials.get((p - r, q + r - 1))
                k = d - (la.rank(R, out) if out is not None and out.size else 0)
                im = la.rank(R, inc) if inc is not None and inc.size else 0
                if k - im != nxt.dim(p, q):
                    bad.append((r, p, q, nxt.dim(p, q), k - im))
        return bad
