"""Reference computations that avoid the equivariant machinery entirely."""

import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf


# Normalized simplicial cochains of a trivial-group complex with a local system, written
# directly from the face tables with sympy matrices and sympy's Smith form.

def classical_cohomology(X, rho, rank, degrees):
    B = X.base
    nd = [list(B.nondegenerate(n)) for n in range(B.N + 1)]

    def transport(x):
        e = B.faces(x, tuple(range(2, B.dim(x) + 1)))
        return sympy.eye(rank) if B.is_degenerate(e) else sympy.Matrix(rho[e])

    def delta(n):
        rows, cols = len(nd[n + 1]) * rank, len(nd[n]) * rank
        D = sympy.zeros(rows, cols)
        for r, x in enumerate(nd[n + 1]):
            for j in range(n + 2):
                y = B.d(j, x)
                if B.is_degenerate(y):
                    continue
                c = nd[n].index(y)
                A = transport(x) if j == 0 else (-1) ** j * sympy.eye(rank)
                D[r * rank:(r + 1) * rank, c * rank:(c + 1) * rank] += A
        return D

    def snf_divisors(D):
        if D.rows == 0 or D.cols == 0:
            return []
        S = sympy_snf(D, domain=sympy.ZZ)
        return [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]

    out = {}
    for n in degrees:
        dn = delta(n)
        ker = len(nd[n]) * rank - len(snf_divisors(dn))
        prev = snf_divisors(delta(n - 1)) if n else []
        out[n] = (ker - len(prev), tuple(d for d in prev if d > 1))
    return out
