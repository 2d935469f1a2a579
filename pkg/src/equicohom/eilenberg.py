"""The invariant cochain complex of the universal O_G-cover and the comparison
maps φ, ψ with the Bredon complex, for one-vertex G-simplicial sets.

This pipeline is assembled from the cover face maps and the loop action on
M₀ only; it shares no code with :mod:`equicohom.bredon` beyond linear
algebra, so agreement of the two is a genuine cross-check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg as la
from .bredon import BredonComplex
from .coefficients import LocalCoefficientSystem, M0System, NotOneVertex, build_M0
from .covering import CoverSimplex, cover_action, cover_face, cover_map, representative
from .groupoid import PiWord, random_path
from .homology import CohomologyResult, FinCochainComplex, cohomology
from .linalg import Matrix
from .simplicial import fmt


class InvariantComplex:
    """Invariant cochains on the cover, stored by their values on representatives."""

    def __init__(self, M: LocalCoefficientSystem):
        self.M = M
        self.M0: M0System = build_M0(M)
        self.v = self.M0.vertex
        self.X = M.X
        self.R = M.ring
        self.N = M.X.N
        self.subgroups = list(self.M0.modules)
        self.keys: list[list[tuple]] = []
        self.pos: list[dict] = []
        for n in range(self.N + 1):
            keys = [(H, x, k) for H in self.subgroups
                    for x in self.X.fixed_points(H).nondegenerate(n)
                    for k in range(self.M0.modules[H])]
            self.keys.append(keys)
            self.pos.append({k: i for i, k in enumerate(keys)})

    def dim(self, n: int) -> int:
        return len(self.keys[n])

    # values of an invariant cochain ---------------------------------------------
    def value(self, n: int, F: Matrix, c: CoverSimplex) -> Matrix | None:
        """F(γ, x) from the representative values via equivariance; None on
        degenerate simplices (normalized cochains vanish there)."""
        H, x = c.subgroup, c.simplex
        XH = self.X.fixed_points(H)
        if XH.is_degenerate(x):
            return None
        r = self.M0.modules[H]
        rep = la.zeros(self.R, r, 1)
        for k in range(r):
            rep[k, 0] = F[self.pos[n][(H, x, k)], 0]
        # (γ, x) = u·(e, x) with u = γ⁻¹
        u = c.word.inverse()
        return la.mul(self.R, self.M0.action(H, u), rep)

    # coboundary ----------------------------------------------------------------
    @cached_property
    def _coboundaries(self) -> list[Matrix]:
        R = self.R
        out = []
        for n in range(self.N):
            D = la.zeros(R, self.dim(n + 1), self.dim(n))
            for H in self.subgroups:
                XH = self.X.fixed_points(H)
                r = self.M0.modules[H]
                for x in XH.nondegenerate(n + 1):
                    rows = [self.pos[n + 1][(H, x, k)] for k in range(r)]
                    c = representative(H, x, self.v)
                    for i in range(n + 2):
                        f = cover_face(self.X, i, c)
                        if XH.is_degenerate(f.simplex):
                            continue
                        cols = [self.pos[n][(H, f.simplex, k)] for k in range(r)]
                        # transport from (γ, y) back to (e, y)
                        A = self.M0.action(H, f.word.inverse())
                        D[np.ix_(rows, cols)] = la.normalize(R, D[np.ix_(rows, cols)] + A * ((-1) ** i))
            out.append(la.normalize(R, D))
        return out

    def coboundary(self, n: int) -> Matrix:
        return self._coboundaries[n]

    # naturality over O_G ---------------------------------------------------------
    @cached_property
    def _defects(self) -> list[Matrix]:
        R = self.R
        orb = self.M.Pi.orbits
        out = []
        for n in range(self.N + 1):
            rows = []
            for a, T in self.M0.structural.items():
                if orb.is_identity(a):
                    continue
                XK = self.X.fixed_points(a.target)
                for t in XK.nondegenerate(n):
                    img = cover_map(self.X, a, representative(a.target, t, self.v))
                    rH = self.M0.modules[a.source]
                    block = la.zeros(R, rH, self.dim(n))
                    for k in range(rH):
                        block[k, self.pos[n][(a.source, img.simplex, k)]] += R.one
                    for k in range(T.shape[1]):
                        j = self.pos[n][(a.target, t, k)]
                        block[:, j] = la.normalize(R, block[:, j] - T[:, k])
                    rows.append(block)
            out.append(np.concatenate(rows, axis=0) if rows else la.zeros(R, 0, self.dim(n)))
        return out

    def defect(self, n: int) -> Matrix:
        return self._defects[n]

    @cached_property
    def _kernels(self):
        return [la.kernel_with_retraction(self.R, self._defects[n]) for n in range(self.N + 1)]

    def natural_basis(self, n: int) -> Matrix:
        return self._kernels[n][0]

    @cached_property
    def _restricted(self) -> list[Matrix]:
        out = []
        for n in range(self.N):
            K0, (K1, L1) = self._kernels[n][0], self._kernels[n + 1]
            img = la.mul(self.R, self._coboundaries[n], K0)
            D = la.mul(self.R, L1, img)
            if not la.equal(self.R, la.mul(self.R, K1, D), img):
                raise ArithmeticError(f"coboundary leaves the natural cochains in degree {n}")
            out.append(D)
        return out

    def full_complex(self) -> FinCochainComplex:
        return FinCochainComplex(self.R, tuple(self.dim(n) for n in range(self.N + 1)), tuple(self._coboundaries))

    def natural_complex(self) -> FinCochainComplex:
        return FinCochainComplex(self.R, tuple(self._kernels[n][0].shape[1] for n in range(self.N + 1)),
                                 tuple(self._restricted))

    def cohomology(self, degrees=None) -> CohomologyResult:
        return cohomology(self.natural_complex(), range(self.N) if degrees is None else degrees)


# --- φ and ψ ----------------------------------------------------------------------------

def phi_value(IC: InvariantComplex, B: BredonComplex, n: int, f: Matrix, c: CoverSimplex) -> Matrix | None:
    """φ(f)(γ, x) = M(b ξ(∂_(1,…,n)(γ, x)))·f(H, x)."""
    H, x = c.subgroup, c.simplex
    sl = B.block(n, H, x)
    if sl is None:
        return None
    base = c
    for _ in range(n):
        base = cover_face(IC.X, 1, base)
    xi_word = base.word
    A = IC.M.evaluate(IC.M.Pi.b(H, xi_word))
    return la.mul(IC.R, A, f[sl, :])


def phi(IC: InvariantComplex, B: BredonComplex, n: int, f: Matrix) -> Matrix:
    """Representative coordinates of φ(f)."""
    out = la.zeros(IC.R, IC.dim(n), 1)
    for H in IC.subgroups:
        for x in IC.X.fixed_points(H).nondegenerate(n):
            val = phi_value(IC, B, n, f, representative(H, x, IC.v))
            for k in range(val.shape[0]):
                out[IC.pos[n][(H, x, k)], 0] = val[k, 0]
    return out


def psi(IC: InvariantComplex, B: BredonComplex, n: int, F: Matrix, rng: random.Random | None = None,
        lift_length: int = 3) -> Matrix:
    """ψ(F)(σ) = M(b ξ(∂_(1,…,n) y))⁻¹·F(y) for a lift y of σ.

    With an rng each σ is lifted to a random (γ, x) instead of the representative.
    """
    out = la.zeros(IC.R, B.dim(n), 1)
    for H in IC.subgroups:
        XH = IC.X.fixed_points(H)
        for x in XH.nondegenerate(n):
            gamma = PiWord(IC.v, IC.v)
            if rng is not None:
                gamma = random_path(XH, rng, IC.v, IC.v, lift_length).reduced()
            y = CoverSimplex(H, gamma, x)
            base = y
            for _ in range(n):
                base = cover_face(IC.X, 1, base)
            A = la.inverse(IC.R, IC.M.evaluate(IC.M.Pi.b(H, base.word)))
            val = la.mul(IC.R, A, IC.value(n, F, y))
            out[B.block(n, H, x), :] = val
    return out


# --- verification -----------------------------------------------------------------------

@dataclass
class EilenbergReport:
    degrees: list[int]
    bredon: CohomologyResult
    invariant: CohomologyResult
    checks: dict[str, bool] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and not self.failures

    def as_dict(self) -> dict:
        return {"degrees": self.degrees, "bredon": self.bredon.as_dict(),
                "invariant": self.invariant.as_dict(), "checks": dict(self.checks),
                "failures": list(self.failures), "agree": self.ok}


def key_permutation(IC: InvariantComplex, B: BredonComplex, n: int) -> list[int]:
    """perm[i] = index in IC's basis of B's i-th basis entry."""
    return [IC.pos[n][(b.subgroup, b.simplex, b.coord)] for b in B.basis[n]]


def verify_eilenberg(M: LocalCoefficientSystem, degrees=None, seed: int = 0, samples: int = 3
                     ) -> EilenbergReport:
    if len(M.X.base.levels[0]) != 1:
        raise NotOneVertex("the comparison needs a one-vertex G-simplicial set")
    rng = random.Random(seed)
    R = M.ring
    B = BredonComplex(M)
    IC = InvariantComplex(M)
    N = M.X.N
    degrees = list(range(N)) if degrees is None else list(degrees)
    B.cohomology(degrees)   # truncation check
    fails: list[str] = []
    checks = {"coboundary_matrices": True, "kernels": True, "psi_phi": True, "phi_psi": True,
              "phi_chain_map": True, "cohomology": True}

    perms = [key_permutation(IC, B, n) for n in range(N + 1)]
    for n in range(N):
        if IC.dim(n) != B.dim(n):
            checks["coboundary_matrices"] = False
            fails.append(f"degree {n}: bases differ in size")
            continue
        P0, P1 = perms[n], perms[n + 1]
        D_inv = IC.coboundary(n)[np.ix_(P1, P0)] if B.dim(n + 1) and B.dim(n) else IC.coboundary(n)
        if not la.equal(R, D_inv, B.coboundary(n)):
            checks["coboundary_matrices"] = False
            fails.append(f"degree {n}: coboundary matrices differ")

    for n in range(N + 1):
        Kb, Ki = B.compatible_basis(n), IC.natural_basis(n)
        Kb_in_ic = la.zeros(R, IC.dim(n), Kb.shape[1])
        Kb_in_ic[perms[n], :] = Kb
        Ki_in_b = Ki[perms[n], :]
        same = (Kb.shape[1] == Ki.shape[1]
                and la.is_zero(R, la.mul(R, IC.defect(n), Kb_in_ic))
                and la.is_zero(R, la.mul(R, B.defect(n), Ki_in_b)))
        if not same:
            checks["kernels"] = False
            fails.append(f"degree {n}: compatibility and naturality kernels differ")
            continue
        for j in range(Kb.shape[1]):
            f = Kb[:, j:j + 1]
            F = phi(IC, B, n, f)
            for _ in range(samples):
                back = psi(IC, B, n, F, rng)
                if not la.equal(R, back, f):
                    checks["psi_phi"] = False
                    fails.append(f"degree {n}: ψφ(f) ≠ f for basis cochain {j}")
                    break
        for j in range(Ki.shape[1]):
            F = Ki[:, j:j + 1]
            f = psi(IC, B, n, F, rng)
            for H in IC.subgroups:
                XH = M.X.fixed_points(H)
                for x in XH.nondegenerate(n):
                    for _ in range(samples):
                        gamma = random_path(XH, rng, IC.v, IC.v, 3).reduced()
                        y = CoverSimplex(H, gamma, x)
                        if not la.equal(R, phi_value(IC, B, n, f, y), IC.value(n, F, y)):
                            checks["phi_psi"] = False
                            fails.append(f"degree {n}: φψ(F) ≠ F at {y}")
        if n < N:
            D = B.coboundary(n)
            for j in range(Kb.shape[1]):
                f = Kb[:, j:j + 1]
                df = la.mul(R, D, f)
                for H in IC.subgroups:
                    XH = M.X.fixed_points(H)
                    for x in XH.nondegenerate(n + 1):
                        gamma = random_path(XH, rng, IC.v, IC.v, 3).reduced()
                        y = CoverSimplex(H, gamma, x)
                        lhs = phi_value(IC, B, n + 1, df, y)
                        rhs = la.zeros(R, lhs.shape[0], 1)
                        for i in range(n + 2):
                            val = phi_value(IC, B, n, f, cover_face(M.X, i, y))
                            if val is not None:
                                rhs = la.normalize(R, rhs + val * ((-1) ** i))
                        if not la.equal(R, lhs, rhs):
                            checks["phi_chain_map"] = False
                            fails.append(f"degree {n}: φ(δf) ≠ δφ(f) at {y}")

    hb = B.cohomology(degrees)
    hi = IC.cohomology(degrees)
    for n in degrees:
        if hb[n] != hi[n]:
            checks["cohomology"] = False
            fails.append(f"degree {n}: {hb[n]} vs {hi[n]}")
    return EilenbergReport(degrees, hb, hi, checks, fails)
