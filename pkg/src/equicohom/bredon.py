"""The Bredon–Illman cochain complex C_G^•(X; M), its compatibility subcomplex
S_G^•(X; M) and the cohomology H_G^•(X; M).

Equivariant n-simplices are pairs (H, x) with x an n-simplex of X^H.  A
cochain assigns to each nondegenerate one a vector in M at its 0th vertex;
degenerate simplices carry the value zero and are left out of the basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .coefficients import LocalCoefficientSystem
from .groups import Subgroup
from .homology import CohomologyResult, FinCochainComplex, cohomology
from .linalg import Matrix
from .simplicial import fmt


class TruncationTooLow(ValueError):
    pass


EquivariantSimplex = tuple[Subgroup, object]


def basepoint(M: LocalCoefficientSystem, sigma: EquivariantSimplex) -> tuple[Subgroup, object]:
    H, x = sigma
    return tuple(H), M.X.base.basepoint(x)


def face(M: LocalCoefficientSystem, sigma: EquivariantSimplex, j: int) -> EquivariantSimplex:
    H, x = sigma
    return tuple(H), M.X.base.d(j, x)


@dataclass(frozen=True)
class BasisEntry:
    subgroup: Subgroup
    simplex: object
    coord: int


class BredonComplex:
    """Cochains in degrees 0..N with coboundaries δ_0..δ_{N-1}."""

    def __init__(self, M: LocalCoefficientSystem):
        self.M = M
        self.ring = M.ring
        self.X = M.X
        self.N = M.X.N
        self.subgroups = M.Pi.orbits.objects
        self.basis: list[list[BasisEntry]] = []
        self.offset: list[dict] = []
        for n in range(self.N + 1):
            entries, off = [], {}
            for H in self.subgroups:
                XH = self.X.fixed_points(H)
                for x in XH.nondegenerate(n):
                    off[(H, x)] = len(entries)
                    r = M.rank(H, XH.basepoint(x))
                    entries.extend(BasisEntry(H, x, k) for k in range(r))
            self.basis.append(entries)
            self.offset.append(off)

    def dim(self, n: int) -> int:
        return len(self.basis[n])

    def block(self, n: int, H: Subgroup, x) -> slice | None:
        off = self.offset[n].get((tuple(H), x))
        if off is None:
            return None
        r = self.M.rank(H, self.X.base.basepoint(x))
        return slice(off, off + r)

    # δ ---------------------------------------------------------------------------
    def coboundary(self, n: int) -> Matrix:
        """δ_n: C^n -> C^{n+1}, one block row per nondegenerate (H, x) of dimension n+1."""
        self._check(n + 1, allow_top=True)
        return self._coboundaries[n]

    @cached_property
    def _coboundaries(self) -> list[Matrix]:
        R, M = self.ring, self.M
        out = []
        for n in range(self.N):
            D = la.zeros(R, self.dim(n + 1), self.dim(n))
            for H in self.subgroups:
                XH = self.X.fixed_points(H)
                for x in XH.nondegenerate(n + 1):
                    rows = self.block(n + 1, H, x)
                    for j in range(n + 2):
                        cols = self.block(n, H, XH.d(j, x))
                        if cols is None:
                            continue   # degenerate face
                        if j == 0:
                            A = M.evaluate(M.Pi.sigma_star(H, x))
                        else:
                            A = la.identity(R, rows.stop - rows.start) * ((-1) ** j)
                        D[rows, cols] = la.normalize(R, D[rows, cols] + A)
            out.append(la.normalize(R, D))
        return out

    # compatibility ----------------------------------------------------------------
    def defect(self, n: int) -> Matrix:
        """Rows f(H, g·t) − τ(ĝ, basepoint t)·f(K, t) for every non-identity orbit
        arrow ĝ: G/H -> G/K and nondegenerate n-simplex t of X^K."""
        return self._defects[n]

    @cached_property
    def _defects(self) -> list[Matrix]:
        R, M, X = self.ring, self.M, self.X
        orb = M.Pi.orbits
        arrows = [a for a in orb.all_morphisms() if not orb.is_identity(a)]
        out = []
        for n in range(self.N + 1):
            blocks = []
            for a in arrows:
                XK = X.fixed_points(a.target)
                for t in XK.nondegenerate(n):
                    gt = X.act(a.rep, t)
                    rows_H = self.block(n, a.source, gt)
                    cols_K = self.block(n, a.target, t)
                    B = la.zeros(R, rows_H.stop - rows_H.start, self.dim(n))
                    B[:, rows_H] = la.identity(R, rows_H.stop - rows_H.start)
                    T = M.tau[(a, X.base.basepoint(t))]
                    B[:, cols_K] = la.normalize(R, B[:, cols_K] - T)
                    blocks.append(B)
            out.append(np.concatenate(blocks, axis=0) if blocks else la.zeros(R, 0, self.dim(n)))
        return out

    @cached_property
    def _kernels(self) -> list[tuple[Matrix, Matrix]]:
        return [la.kernel_with_retraction(self.ring, self._defects[n]) for n in range(self.N + 1)]

    def compatible_basis(self, n: int) -> Matrix:
        """Columns spanning S_G^n (a lattice basis over ℤ)."""
        return self._kernels[n][0]

    def retraction(self, n: int) -> Matrix:
        """L with L·K = I for K = compatible_basis(n)."""
        return self._kernels[n][1]

    @cached_property
    def _restricted(self) -> list[Matrix]:
        R = self.ring
        out = []
        for n in range(self.N):
            K0, K1, L1 = self._kernels[n][0], self._kernels[n + 1][0], self._kernels[n + 1][1]
            img = la.mul(R, self._coboundaries[n], K0)
            D = la.mul(R, L1, img)
            if not la.equal(R, la.mul(R, K1, D), img):
                raise ArithmeticError(f"δ does not preserve the compatibility subgroup in degree {n}")
            out.append(D)
        return out

    def restricted_coboundary(self, n: int) -> Matrix:
        return self._restricted[n]

    # complexes ---------------------------------------------------------------------
    def full_complex(self) -> FinCochainComplex:
        return FinCochainComplex(self.ring, tuple(self.dim(n) for n in range(self.N + 1)),
                                 tuple(self._coboundaries))

    def compatible_complex(self) -> FinCochainComplex:
        return FinCochainComplex(self.ring, tuple(self._kernels[n][0].shape[1] for n in range(self.N + 1)),
                                 tuple(self._restricted))

    def cohomology(self, degrees=None) -> CohomologyResult:
        degrees = list(range(self.N)) if degrees is None else list(degrees)
        for n in degrees:
            self._check(n, allow_top=False)
        return cohomology(self.compatible_complex(), degrees)

    def _check(self, n: int, allow_top: bool):
        limit = self.N if allow_top else self.N - 1
        if n < 0 or n > limit:
            raise TruncationTooLow(f"degree {n} needs simplices up to level {n + 1}, "
                                   f"but the input is truncated at N={self.N}")

    def describe_entry(self, n: int, i: int) -> str:
        b = self.basis[n][i]
        return f"({self.X.group.fmt_subgroup(b.subgroup)}, {fmt(b.simplex)})[{b.coord}]"


def coboundary(M: LocalCoefficientSystem, n: int) -> Matrix:
    return BredonComplex(M).coboundary(n)


def compatibility_defect(M: LocalCoefficientSystem, n: int) -> Matrix:
    return BredonComplex(M).defect(n)


def bredon_cohomology(M: LocalCoefficientSystem, degrees=None) -> CohomologyResult:
    return BredonComplex(M).cohomology(degrees)
