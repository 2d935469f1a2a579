"""Dense exact linear algebra over ℤ, ℚ and F_p.

Matrices are numpy ``object`` arrays whose entries are ring elements (Python
ints or Fractions), so arithmetic never overflows and never rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rings import ZZ, QQ, Ring, RingError

Matrix = np.ndarray


def zeros(ring: Ring, m: int, n: int) -> Matrix:
    A = np.empty((m, n), dtype=object)
    A.fill(ring.zero)
    return A


def identity(ring: Ring, n: int) -> Matrix:
    A = zeros(ring, n, n)
    for i in range(n):
        A[i, i] = ring.one
    return A


def matrix(ring: Ring, rows, shape: tuple[int, int] | None = None) -> Matrix:
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    A = zeros(ring, *shape)
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise ValueError(f"matrix rows do not match shape {shape}")
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            A[i, j] = ring(x)
    return A


def normalize(ring: Ring, A: Matrix) -> Matrix:
    if ring.kind == "F" and A.size:
        return A % ring.p
    return A


def mul(ring: Ring, *mats: Matrix) -> Matrix:
    out = mats[0]
    for B in mats[1:]:
        if out.shape[1] != B.shape[0]:
            raise ValueError(f"shape mismatch {out.shape} @ {B.shape}")
        if out.shape[1] == 0:
            out = zeros(ring, out.shape[0], B.shape[1])
        else:
            out = normalize(ring, out.dot(B))
    return out


def is_zero(ring: Ring, A: Matrix) -> bool:
    return all(ring.is_zero(x) for x in A.flat)


def equal(ring: Ring, A: Matrix, B: Matrix) -> bool:
    return A.shape == B.shape and is_zero(ring, normalize(ring, A - B))


def to_lists(A: Matrix) -> list[list]:
    return [[_plain(x) for x in row] for row in A]


def _plain(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else [x.numerator, x.denominator]
    return int(x)


def block_diag(ring: Ring, blocks: list[Matrix]) -> Matrix:
    m = sum(b.shape[0] for b in blocks)
    n = sum(b.shape[1] for b in blocks)
    out = zeros(ring, m, n)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


# --- elimination over fields ------------------------------------------------

def _field_view(ring: Ring) -> Ring:
    # Determinants and inverses over ℤ are computed in ℚ and checked afterwards.
    return QQ if ring.kind == "Z" else ring


def rref(ring: Ring, A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over a field and the pivot columns."""
    F = _field_view(ring)
    R = [[F(x) for x in row] for row in A]
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if not F.is_zero(R[i][c])), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = F.inv(R[r][c])
        R[r] = [F.norm(x * inv) for x in R[r]]
        for i in range(m):
            if i != r and not F.is_zero(R[i][c]):
                f = R[i][c]
                R[i] = [F.norm(a - f * b) for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    out = zeros(F, m, n)
    for i in range(m):
        for j in range(n):
            out[i, j] = R[i][j]
    return out, pivots


def rank(ring: Ring, A: Matrix) -> int:
    if A.size == 0:
        return 0
    return len(rref(ring, A)[1])


def nullspace(ring: Ring, A: Matrix) -> Matrix:
    """Columns spanning the kernel of ``A`` over a field."""
    F = _field_view(ring)
    m, n = A.shape
    R, pivots = rref(F, A)
    free = [j for j in range(n) if j not in pivots]
    N = zeros(F, n, len(free))
    for k, j in enumerate(free):
        N[j, k] = F.one
        for r, pc in enumerate(pivots):
            N[pc, k] = F.norm(-R[r, j])
    return N


def column_basis(ring: Ring, A: Matrix) -> Matrix:
    """A linearly independent subset of the columns of ``A`` with the same span."""
    if A.shape[1] == 0:
        return A
    _, pivots = rref(ring, A)
    return A[:, pivots]


def solve(ring: Ring, A: Matrix, B: Matrix) -> Matrix | None:
    """Some X with A·X = B over a field, or None when inconsistent."""
    F = _field_view(ring)
    m, n = A.shape
    aug = np.concatenate([A, B], axis=1) if B.shape[1] else A
    R, pivots = rref(F, aug)
    if any(p >= n for p in pivots):
        return None
    X = zeros(F, n, B.shape[1])
    for r, pc in enumerate(pivots):
        for k in range(B.shape[1]):
            X[pc, k] = R[r, n + k]
    return X


def det(ring: Ring, A: Matrix):
    n, n2 = A.shape
    if n != n2:
        raise ValueError("determinant of a non-square matrix")
    F = _field_view(ring)
    M = [[F(x) for x in row] for row in A]
    d = F.one
    for c in range(n):
        piv = next((i for i in range(c, n) if not F.is_zero(M[i][c])), None)
        if piv is None:
            return ring.zero
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d = F.norm(d * M[c][c])
        inv = F.inv(M[c][c])
        for i in range(c + 1, n):
            if not F.is_zero(M[i][c]):
                f = F.norm(M[i][c] * inv)
                M[i] = [F.norm(a - f * b) for a, b in zip(M[i], M[c])]
    return ring(d)


def is_invertible(ring: Ring, A: Matrix) -> bool:
    return A.shape[0] == A.shape[1] and ring.is_unit(det(ring, A))


def inverse(ring: Ring, A: Matrix) -> Matrix:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    F = _field_view(ring)
    aug = np.concatenate([A, identity(F, n)], axis=1)
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise RingError("matrix is singular")
    inv = R[:, n:]
    try:
        out = zeros(ring, n, n)
        for i in range(n):
            for j in range(n):
                out[i, j] = ring(inv[i, j])
    except RingError as exc:
        raise RingError("matrix is not invertible over the ring") from exc
    return out


# --- Smith normal form over ℤ -----------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == S`` with ``S`` diagonal, ``U``, ``V`` unimodular."""

    S: Matrix
    U: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    @property
    def divisors(self) -> list[int]:
        """The nonzero diagonal entries d₁ | d₂ | … (all positive)."""
        k = min(self.S.shape)
        return [int(self.S[i, i]) for i in range(k) if self.S[i, i] != 0]

    @property
    def rank(self) -> int:
        return len(self.divisors)


def smith_normal_form(A: Matrix) -> SmithForm:
    """Smith normal form of an integer matrix by elementary operations.

    The pivot is always the entry of least absolute value in the active
    block, which keeps intermediate entries small; Python ints guard the rest.
    """
    m, n = A.shape
    S = [[int(x) for x in row] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(dst, src, c):  # row_dst += c * row_src
        S[dst] = [a + c * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]
        for row in Ui:
            row[src] -= c * row[dst]

    def row_swap(a, b):
        S[a], S[b] = S[b], S[a]
        U[a], U[b] = U[b], U[a]
        for row in Ui:
            row[a], row[b] = row[b], row[a]

    def row_neg(a):
        S[a] = [-x for x in S[a]]
        U[a] = [-x for x in U[a]]
        for row in Ui:
            row[a] = -row[a]

    def col_add(dst, src, c):  # col_dst += c * col_src
        for row in S:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]
        Vi[src] = [a - c * b for a, b in zip(Vi[src], Vi[dst])]

    def col_swap(a, b):
        for row in S:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        while True:
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    row_add(i, t, -(S[i][t] // p))
                    dirty = dirty or S[i][t] != 0
            for j in range(t + 1, n):
                if S[t][j]:
                    col_add(j, t, -(S[t][j] // p))
                    dirty = dirty or S[t][j] != 0
            if dirty:
                cands = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
                cands += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
                _, i, j = min(cands)
                if i != t:
                    row_swap(t, i)
                else:
                    col_swap(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if S[t][t] < 0:
            row_neg(t)

    def arr(rows, r, c):
        out = zeros(ZZ, r, c)
        for i in range(r):
            for j in range(c):
                out[i, j] = rows[i][j]
        return out

    return SmithForm(arr(S, m, n), arr(U, m, m), arr(V, n, n), arr(Ui, m, m), arr(Vi, n, n))


# --- kernels -----------------------------------------------------------------

def kernel_with_retraction(ring: Ring, A: Matrix) -> tuple[Matrix, Matrix]:
    """A kernel basis ``K`` (columns) and a matrix ``L`` with ``L @ K == 1``.

    Over ℤ the columns of ``K`` are a basis of the (saturated) kernel lattice
    and ``L`` has integer entries, so ``L`` recovers exact coordinates of any
    lattice vector that lies in the kernel.
    """
    n = A.shape[1]
    if ring.kind == "Z":
        if A.shape[0] == 0:
            return identity(ZZ, n), identity(ZZ, n)
        snf = smith_normal_form(A)
        r = snf.rank
        return snf.V[:, r:], snf.V_inv[r:, :]
    if A.shape[0] == 0:
        return identity(ring, n), identity(ring, n)
    K = nullspace(ring, A)
    return K, left_inverse(ring, K)


def kernel_basis(ring: Ring, A: Matrix) -> Matrix:
    return kernel_with_retraction(ring, A)[0]


def left_inverse(ring: Ring, K: Matrix) -> Matrix:
    """A left inverse of a full-column-rank matrix over a field."""
    n, k = K.shape
    if k == 0:
        return zeros(ring, 0, n)
    _, pivots = rref(ring, K.T)
    # rows of K indexed by pivots form an invertible k×k block
    sub = np.array([K[i, :] for i in pivots], dtype=object)
    inv = inverse(ring, sub)
    L = zeros(ring, k, n)
    for c, i in enumerate(pivots):
        L[:, i] = inv[:, c]
    return L


def in_span(ring: Ring, B: Matrix, v: Matrix) -> bool:
    return solve(ring, B, v) is not None


def intersect(ring: Ring, A: Matrix, B: Matrix) -> Matrix:
    """Basis of span(A) ∩ span(B) over a field (columns)."""
    if A.shape[1] == 0 or B.shape[1] == 0:
        return zeros(ring, A.shape[0], 0)
    N = nullspace(ring, np.concatenate([A, normalize(ring, -B)], axis=1))
    return column_basis(ring, mul(ring, A, N[:A.shape[1], :]))


def span_sum(ring: Ring, *mats: Matrix) -> Matrix:
    m = mats[0].shape[0]
    mats = [M for M in mats if M.shape[1]]
    if not mats:
        return zeros(ring, m, 0)
    return column_basis(ring, np.concatenate(mats, axis=1))


def preimage(ring: Ring, D: Matrix, W: Matrix, within: Matrix) -> Matrix:
    """Basis of {x ∈ span(within) : D x ∈ span(W)} over a field."""
    k = within.shape[1]
    if k == 0:
        return within
    DX = mul(ring, D, within)
    if W.shape[1]:
        big = np.concatenate([DX, normalize(ring, -W)], axis=1)
    else:
        big = DX
    N = nullspace(ring, big)
    return column_basis(ring, mul(ring, within, N[:k, :]))
