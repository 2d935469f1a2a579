"""Finite truncated simplicial sets and G-simplicial sets.

Every simplex up to the truncation dimension N is stored explicitly, including
the degenerate ones, together with full face and degeneracy tables.  Simplices
are identified by hashable ids that are unique across levels: user supplied
strings for nondegenerate simplices, canonical degeneracy words such as
``"s1s0(v)"`` for generated degenerate ones, and tuples for products.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .groups import FiniteGroup, Subgroup

SimplexId = Hashable

DEFAULT_SIZE_GUARD = 50_000


class SimplicialError(ValueError):
    """Structural problem with a simplicial set or map."""


class SizeGuardExceeded(SimplicialError):
    pass


class NonFreeAction(SimplicialError):
    def __init__(self, simplex, element):
        super().__init__(f"simplex {fmt(simplex)} is fixed by the non-identity element {element}")
        self.simplex = simplex
        self.element = element


def fmt(x) -> str:
    if isinstance(x, tuple):
        return "(" + ", ".join(fmt(y) for y in x) + ")"
    return str(x)


# --- monotone maps -----------------------------------------------------------

def coface(n: int, i: int) -> tuple[int, ...]:
    """δ^i : [n-1] -> [n] skipping i."""
    return tuple(j if j < i else j + 1 for j in range(n))


def codegeneracy(n: int, i: int) -> tuple[int, ...]:
    """σ^i : [n+1] -> [n] hitting i twice."""
    return tuple(j if j <= i else j - 1 for j in range(n + 2))


def flat_positions(eta: Sequence[int]) -> tuple[int, ...]:
    """Indices j with eta(j) == eta(j+1); a surjection is determined by them."""
    return tuple(j for j in range(len(eta) - 1) if eta[j] == eta[j + 1])


def surjection_from_flats(n: int, flats: Iterable[int]) -> tuple[int, ...]:
    flats = set(flats)
    out = [0]
    for t in range(n):
        out.append(out[-1] + (0 if t in flats else 1))
    return tuple(out)


def degeneracy_word(base: str, flats: Sequence[int]) -> str:
    # s_{j_r} ... s_{j_1}(y) with j_1 < ... < j_r; innermost applied first
    return "".join(f"s{j}" for j in sorted(flats, reverse=True)) + f"({base})"


_WORD = re.compile(r"^((?:s\d+)*)\((.+)\)$")


def parse_degeneracy_word(word: str) -> tuple[str, tuple[int, ...]] | None:
    """``"s1s0(v)"`` -> ``("v", (1, 0))`` listing operators outermost first."""
    m = _WORD.match(word)
    if not m or not m.group(1):
        return None
    ops = tuple(int(k) for k in re.findall(r"s(\d+)", m.group(1)))
    return m.group(2), ops


# --- truncated simplicial sets ----------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedSimplicialSet:
    """Levels 0..N with face maps ``face[n][i]`` (n ≥ 1) and degeneracies
    ``degeneracy[n][i]`` (n ≤ N-1), each a total dict between levels."""

    N: int
    levels: tuple[tuple[SimplexId, ...], ...]
    face: tuple[tuple[Mapping, ...], ...]
    degeneracy: tuple[tuple[Mapping, ...], ...]
    name: str = ""

    # lookups ----------------------------------------------------------------
    @cached_property
    def dim_of(self) -> dict:
        out = {}
        for n, lvl in enumerate(self.levels):
            for x in lvl:
                if x in out:
                    raise SimplicialError(f"simplex id {fmt(x)} appears at levels {out[x]} and {n}")
                out[x] = n
        return out

    @cached_property
    def index(self) -> tuple[dict, ...]:
        return tuple({x: k for k, x in enumerate(lvl)} for lvl in self.levels)

    def dim(self, x) -> int:
        return self.dim_of[x]

    def d(self, i: int, x):
        return self.face[self.dim_of[x]][i][x]

    def s(self, i: int, x):
        return self.degeneracy[self.dim_of[x]][i][x]

    def faces(self, x, indices: Sequence[int]):
        """∂_{(i_1, …, i_r)} x = ∂_{i_1} ∂_{i_2} ⋯ ∂_{i_r} x (rightmost applied first)."""
        for i in reversed(indices):
            x = self.d(i, x)
        return x

    def vertex(self, x, k: int):
        n = self.dim_of[x]
        return self.apply(x, (k,))

    def vertices(self, x) -> tuple:
        return tuple(self.vertex(x, k) for k in range(self.dim_of[x] + 1))

    def basepoint(self, x):
        """The 0th vertex ∂_{(1,…,n)} x."""
        return self.faces(x, tuple(range(1, self.dim_of[x] + 1)))

    def leading_edge(self, x):
        """The edge ∂_{(2,…,n)} x from vertex 0 to vertex 1 (x itself for n = 1)."""
        return self.faces(x, tuple(range(2, self.dim_of[x] + 1)))

    def apply(self, x, theta: Sequence[int]):
        """x·θ for a monotone θ: [q] -> [n] (faces for the missing values, then degeneracies)."""
        n = self.dim_of[x]
        theta = tuple(theta)
        image = sorted(set(theta))
        for j in sorted(set(range(n + 1)) - set(image), reverse=True):
            x = self.d(j, x)
        rank = {v: k for k, v in enumerate(image)}
        eps = tuple(rank[t] for t in theta)
        for j in flat_positions(eps):
            x = self.s(j, x)
        return x

    # degeneracy structure ---------------------------------------------------
    @cached_property
    def _degenerate(self) -> tuple[frozenset, ...]:
        out = [frozenset()]
        for n in range(1, self.N + 1):
            out.append(frozenset(y for i in range(n) for y in self.degeneracy[n - 1][i].values()))
        return tuple(out)

    def is_degenerate(self, x) -> bool:
        return x in self._degenerate[self.dim_of[x]]

    def nondegenerate(self, n: int) -> tuple:
        if n < 0 or n > self.N:
            raise SimplicialError(f"level {n} outside 0..{self.N}")
        deg = self._degenerate[n]
        return tuple(x for x in self.levels[n] if x not in deg)

    def decompose(self, x) -> tuple[SimplexId, tuple[int, ...]]:
        """Eilenberg–Zilber: x = y·η with y nondegenerate and η a surjection."""
        n = self.dim_of[x]
        for i in range(n):
            y = self.d(i, x)
            if self.s(i, y) == x:
                z, eta = self.decompose(y)
                return z, tuple(eta[t] for t in codegeneracy(n - 1, i))
        return x, tuple(range(n + 1))

    def decomposition_conflicts(self) -> list[tuple]:
        """Simplices admitting two different Eilenberg–Zilber decompositions."""
        bad = []
        for n in range(1, self.N + 1):
            for x in self.levels[n]:
                seen = set()
                for i in range(n):
                    y = self.d(i, x)
                    if self.s(i, y) == x:
                        z, eta = self.decompose(y)
                        seen.add((z, tuple(eta[t] for t in codegeneracy(n - 1, i))))
                if len(seen) > 1:
                    bad.append((x, sorted(seen, key=repr)))
        return bad

    # structure --------------------------------------------------------------
    def restrict(self, keep, name: str = "") -> "TruncatedSimplicialSet":
        """The subcomplex on the simplices in ``keep`` (assumed closed)."""
        levels = tuple(tuple(x for x in lvl if x in keep) for lvl in self.levels)
        face = tuple(tuple({x: f[x] for x in levels[n]} for f in self.face[n])
                     for n in range(self.N + 1))
        degen = tuple(tuple({x: s[x] for x in levels[n]} for s in self.degeneracy[n])
                      for n in range(self.N + 1))
        return TruncatedSimplicialSet(self.N, levels, face, degen, name)

    def size(self) -> tuple[int, ...]:
        return tuple(len(lvl) for lvl in self.levels)

    def connected_components(self) -> list[set]:
        parent = {v: v for v in self.levels[0]}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        if self.N >= 1:
            for e in self.levels[1]:
                a, b = find(self.d(0, e)), find(self.d(1, e))
                if a != b:
                    parent[a] = b
        comps: dict = {}
        for v in self.levels[0]:
            comps.setdefault(find(v), set()).add(v)
        return list(comps.values())


def _check_guard(count: int, guard: int, what: str):
    if count > guard:
        raise SizeGuardExceeded(f"{what}: {count} simplices in one level exceeds the guard {guard}")


def from_tables(N: int, levels, face, degeneracy, name: str = "") -> TruncatedSimplicialSet:
    return TruncatedSimplicialSet(N, tuple(tuple(l) for l in levels),
                                  tuple(tuple(f) for f in face),
                                  tuple(tuple(s) for s in degeneracy), name)


def from_nondegenerate(N: int, simplices: Sequence[Mapping[str, Sequence[str]] | Sequence[str]],
                       name: str = "", size_guard: int = DEFAULT_SIZE_GUARD) -> TruncatedSimplicialSet:
    """Build a simplicial set from its nondegenerate simplices.

    ``simplices[0]`` lists vertex ids; ``simplices[n]`` maps each nondegenerate
    n-simplex to its faces ``[∂_0 x, …, ∂_n x]``, which may be nondegenerate
    ids or degeneracy words like ``"s0(v)"``.  All degeneracies up to level N
    are generated and the face maps of degenerate simplices are derived from
    the simplicial identities.  Validation is left to :func:`validate`.
    """
    if N < 1:
        raise SimplicialError("truncation dimension must be at least 1")
    simplices = list(simplices) + [{}] * (N + 1 - len(simplices))
    if len(simplices) > N + 1:
        extra = [n for n in range(N + 1, len(simplices)) if simplices[n]]
        if extra:
            raise SimplicialError(f"simplices given above the truncation N={N} at level {extra[0]}")
        simplices = simplices[:N + 1]
    dim: dict[str, int] = {}
    faces_in: dict[str, list[str]] = {}
    for n, block in enumerate(simplices):
        items = [(v, []) for v in block] if n == 0 else list(dict(block).items())
        for sid, fl in items:
            sid = str(sid)
            if "(" in sid or ")" in sid:
                raise SimplicialError(f"simplex id {sid!r} may not contain parentheses")
            if sid in dim:
                raise SimplicialError(f"duplicate simplex id {sid!r}")
            dim[sid] = n
            if n > 0:
                if len(fl) != n + 1:
                    raise SimplicialError(f"{sid!r} is a {n}-simplex and needs {n + 1} faces, got {len(fl)}")
                faces_in[sid] = [str(f) for f in fl]

    # internal form: (nondegenerate id, surjection η) with x = y·η
    def normalize(y: str, eta: tuple[int, ...]):
        return (y, eta)

    parsed: dict[str, tuple] = {}

    def parse_ref(ref: str, expected: int, owner: str):
        if ref in dim:
            if dim[ref] != expected:
                raise SimplicialError(f"face {ref!r} of {owner!r} has dimension {dim[ref]}, expected {expected}")
            return (ref, tuple(range(expected + 1)))
        w = parse_degeneracy_word(ref)
        if w is None or w[0] not in dim:
            raise SimplicialError(f"face {ref!r} of {owner!r} is not a known simplex")
        base, ops = w
        cur = (base, tuple(range(dim[base] + 1)))
        level = dim[base]
        for j in reversed(ops):
            if j > level:
                raise SimplicialError(f"degeneracy s{j} out of range in {ref!r}")
            cur = apply_op(cur, codegeneracy(level, j))
            level += 1
        if level != expected:
            raise SimplicialError(f"face {ref!r} of {owner!r} has dimension {level}, expected {expected}")
        return cur

    def face_nd(y: str, j: int):
        key = (y, j)
        if key not in parsed:
            parsed[key] = parse_ref(faces_in[y][j], dim[y] - 1, y)
        return parsed[key]

    def apply_op(x, theta):
        y, eta = x
        k = dim[y]
        c = tuple(eta[t] for t in theta)
        missing = sorted(set(range(k + 1)) - set(c))
        if not missing:
            return (y, c)
        j = missing[-1]
        c1 = tuple(v if v < j else v - 1 for v in c)
        return apply_op(face_nd(y, j), c1)

    def name_of(x) -> str:
        y, eta = x
        if len(eta) == dim[y] + 1:
            return y
        return degeneracy_word(y, flat_positions(eta))

    levels: list[list] = []
    members: list[list] = []
    for n in range(N + 1):
        lvl = []
        for y, k in dim.items():
            if k > n:
                continue
            for flats in combinations(range(n), n - k):
                lvl.append((y, surjection_from_flats(n, flats)))
        _check_guard(len(lvl), size_guard, f"level {n}")
        members.append(lvl)
        levels.append([name_of(x) for x in lvl])

    face = [[] for _ in range(N + 1)]
    degen = [[] for _ in range(N + 1)]
    for n in range(N + 1):
        if n >= 1:
            face[n] = [{name_of(x): name_of(apply_op(x, coface(n, i))) for x in members[n]}
                       for i in range(n + 1)]
        if n < N:
            degen[n] = [{name_of(x): name_of(apply_op(x, codegeneracy(n, i))) for x in members[n]}
                        for i in range(n + 1)]
    return from_tables(N, levels, face, degen, name)


def standard_simplex(n: int, N: int) -> TruncatedSimplicialSet:
    """Δ[n] truncated at N; q-simplices are nondecreasing tuples in [n]."""
    levels = []
    for q in range(N + 1):
        levels.append([t for t in _monotone(q, n)])
    face = [[] for _ in range(N + 1)]
    degen = [[] for _ in range(N + 1)]
    for q in range(N + 1):
        if q >= 1:
            face[q] = [{t: t[:i] + t[i + 1:] for t in levels[q]} for i in range(q + 1)]
        if q < N:
            degen[q] = [{t: t[:i + 1] + t[i:] for t in levels[q]} for i in range(q + 1)]
    return from_tables(N, levels, face, degen, f"Δ[{n}]")


def _monotone(q: int, n: int):
    """Nondecreasing sequences (a_0 ≤ … ≤ a_q) in [0, n]."""
    from itertools import combinations_with_replacement
    return list(combinations_with_replacement(range(n + 1), q + 1))


def point(N: int, vertex: str = "v") -> TruncatedSimplicialSet:
    return from_nondegenerate(N, [[vertex]], name="pt")


# --- validation --------------------------------------------------------------

@dataclass(frozen=True)
class IdentityViolation:
    identity: str
    simplex: SimplexId
    level: int
    indices: tuple[int, ...]
    lhs: SimplexId = None
    rhs: SimplexId = None

    def __str__(self) -> str:
        return (f"simplicial identity {self.identity} fails at {fmt(self.simplex)} "
                f"(level {self.level}, indices {self.indices}): {fmt(self.lhs)} ≠ {fmt(self.rhs)}")


@dataclass(frozen=True)
class ValidationReport:
    structural: tuple[str, ...] = ()
    violation: IdentityViolation | None = None
    extra: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.structural and self.violation is None and not self.extra

    def messages(self) -> list[str]:
        out = [f"structural: {m}" for m in self.structural]
        if self.violation is not None:
            out.append(str(self.violation))
        out += list(self.extra)
        return out


def _structural_errors(X: TruncatedSimplicialSet) -> list[str]:
    errs = []
    if len(X.levels) != X.N + 1:
        return [f"expected {X.N + 1} levels, found {len(X.levels)}"]
    try:
        X.dim_of
    except SimplicialError as exc:
        return [str(exc)]
    for n in range(X.N + 1):
        want_f = n + 1 if n >= 1 else 0
        if len(X.face[n]) != want_f:
            errs.append(f"level {n} has {len(X.face[n])} face maps, expected {want_f}")
            continue
        want_s = n + 1 if n < X.N else 0
        if len(X.degeneracy[n]) != want_s:
            errs.append(f"level {n} has {len(X.degeneracy[n])} degeneracy maps, expected {want_s}")
            continue
        lower = set(X.levels[n - 1]) if n >= 1 else set()
        upper = set(X.levels[n + 1]) if n < X.N else set()
        for i, f in enumerate(X.face[n]):
            for x in X.levels[n]:
                if x not in f:
                    errs.append(f"face map ∂_{i} on level {n} is not defined at {fmt(x)}")
                elif f[x] not in lower:
                    errs.append(f"∂_{i}({fmt(x)}) = {fmt(f[x])} is not a simplex of level {n - 1}")
        for i, s in enumerate(X.degeneracy[n]):
            for x in X.levels[n]:
                if x not in s:
                    errs.append(f"degeneracy s_{i} on level {n} is not defined at {fmt(x)}")
                elif s[x] not in upper:
                    errs.append(f"s_{i}({fmt(x)}) = {fmt(s[x])} is not a simplex of level {n + 1}")
    return errs


def identity_violations(X: TruncatedSimplicialSet, first_only: bool = True) -> list[IdentityViolation]:
    """All five identity families, checked wherever both sides stay within 0..N."""
    out: list[IdentityViolation] = []
    F, S, N = X.face, X.degeneracy, X.N

    def hit(v):
        out.append(v)
        return first_only

    for n in range(N + 1):
        for x in X.levels[n]:
            # ∂_j s_j = id = ∂_{j+1} s_j
            if n < N:
                for j in range(n + 1):
                    y = S[n][j][x]
                    if F[n + 1][j][y] != x and hit(IdentityViolation(f"∂{j}s{j} = id", x, n, (j,), F[n + 1][j][y], x)):
                        return out
                    if F[n + 1][j + 1][y] != x and hit(IdentityViolation(f"∂{j + 1}s{j} = id", x, n, (j,), F[n + 1][j + 1][y], x)):
                        return out
            # ∂_i s_j = s_{j-1} ∂_i (i < j);  ∂_i s_j = s_j ∂_{i-1} (i > j+1)
            if 1 <= n < N:
                for j in range(n + 1):
                    y = S[n][j][x]
                    for i in range(n + 2):
                        if i < j:
                            lhs, rhs = F[n + 1][i][y], S[n - 1][j - 1][F[n][i][x]]
                            label = f"∂{i}s{j} = s{j - 1}∂{i}"
                        elif i > j + 1:
                            lhs, rhs = F[n + 1][i][y], S[n - 1][j][F[n][i - 1][x]]
                            label = f"∂{i}s{j} = s{j}∂{i - 1}"
                        else:
                            continue
                        if lhs != rhs and hit(IdentityViolation(label, x, n, (i, j), lhs, rhs)):
                            return out
            # ∂_i ∂_j = ∂_{j-1} ∂_i (i < j)
            if n >= 2:
                for j in range(n + 1):
                    for i in range(j):
                        lhs = F[n - 1][i][F[n][j][x]]
                        rhs = F[n - 1][j - 1][F[n][i][x]]
                        if lhs != rhs and hit(IdentityViolation(f"∂{i}∂{j} = ∂{j - 1}∂{i}", x, n, (i, j), lhs, rhs)):
                            return out
            # s_i s_j = s_{j+1} s_i (i ≤ j)
            if n + 2 <= N:
                for j in range(n + 1):
                    for i in range(j + 1):
                        lhs = S[n + 1][i][S[n][j][x]]
                        rhs = S[n + 1][j + 1][S[n][i][x]]
                        if lhs != rhs and hit(IdentityViolation(f"s{i}s{j} = s{j + 1}s{i}", x, n, (i, j), lhs, rhs)):
                            return out
    return out


def validate(X: TruncatedSimplicialSet) -> ValidationReport:
    """Structural checks first; identity checks only on structurally sound tables."""
    errs = _structural_errors(X)
    if errs:
        return ValidationReport(structural=tuple(errs))
    bad = identity_violations(X, first_only=True)
    if bad:
        return ValidationReport(violation=bad[0])
    extra = [f"{fmt(x)} has several Eilenberg–Zilber decompositions"
             for x, _ in X.decomposition_conflicts()]
    return ValidationReport(extra=tuple(extra))


# --- maps -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimplicialMap:
    source: "TruncatedSimplicialSet | GSimplicialSet"
    target: "TruncatedSimplicialSet | GSimplicialSet"
    maps: tuple[Mapping, ...]
    equivariant: bool = False

    def __call__(self, x):
        return self.maps[_base(self.source).dim_of[x]][x]

    def violations(self) -> list[str]:
        A, B = _base(self.source), _base(self.target)
        out = []
        if A.N != B.N:
            return [f"truncations differ ({A.N} vs {B.N})"]
        for n in range(A.N + 1):
            for x in A.levels[n]:
                if x not in self.maps[n]:
                    out.append(f"map undefined at {fmt(x)}")
                    continue
                fx = self.maps[n][x]
                if fx not in B.index[n]:
                    out.append(f"image of {fmt(x)} is not a level-{n} simplex of the target")
                    continue
                for i in range(n + 1 if n >= 1 else 0):
                    if self.maps[n - 1].get(A.d(i, x)) != B.d(i, fx):
                        out.append(f"map does not commute with ∂{i} at {fmt(x)}")
                if n < A.N:
                    for i in range(n + 1):
                        if self.maps[n + 1].get(A.s(i, x)) != B.s(i, fx):
                            out.append(f"map does not commute with s{i} at {fmt(x)}")
                if self.equivariant:
                    G = self.source.group
                    for g in range(G.order):
                        if self.maps[n].get(self.source.act(g, x)) != self.target.act(g, fx):
                            out.append(f"map is not equivariant at {fmt(x)} for {G.names[g]}")
        return out


def _base(X) -> TruncatedSimplicialSet:
    return X.base if isinstance(X, GSimplicialSet) else X


def identity_map(X) -> SimplicialMap:
    B = _base(X)
    return SimplicialMap(X, X, tuple({x: x for x in lvl} for lvl in B.levels),
                         isinstance(X, GSimplicialSet))


def extend_map(source: TruncatedSimplicialSet, target: TruncatedSimplicialSet,
               on_nondegenerate: Mapping) -> tuple[Mapping, ...]:
    """Extend a map given on nondegenerate simplices by f(y·η) = f(y)·η."""
    maps = [dict() for _ in range(source.N + 1)]
    for n in range(source.N + 1):
        for x in source.levels[n]:
            y, eta = source.decompose(x)
            if y not in on_nondegenerate:
                raise SimplicialError(f"map is not given on the nondegenerate simplex {fmt(y)}")
            fy = on_nondegenerate[y]
            if fy not in target.dim_of:
                raise SimplicialError(f"image {fmt(fy)} of {fmt(y)} is not a simplex of the target")
            if target.dim_of[fy] != source.dim_of[y]:
                raise SimplicialError(f"{fmt(y)} and its image {fmt(fy)} have different dimensions")
            maps[n][x] = target.apply(fy, eta)
    return tuple(maps)


# --- G-simplicial sets ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GSimplicialSet:
    """A truncated simplicial set with a levelwise action ``action[n][g][x]``."""

    base: TruncatedSimplicialSet
    group: FiniteGroup
    action: tuple[tuple[Mapping, ...], ...]

    @property
    def N(self) -> int:
        return self.base.N

    @property
    def name(self) -> str:
        return self.base.name

    def act(self, g: int, x):
        return self.action[self.base.dim_of[x]][g][x]

    def fixed_points(self, H: Subgroup) -> TruncatedSimplicialSet:
        return self._fixed(tuple(H))

    def _fixed(self, H):
        cache = self.__dict__.setdefault("_fixed_cache", {})
        if H not in cache:
            keep = {x for n, lvl in enumerate(self.base.levels) for x in lvl
                    if all(self.action[n][h][x] == x for h in H)}
            cache[H] = self.base.restrict(keep, f"{self.base.name}^{self.group.fmt_subgroup(H)}")
        return cache[H]

    def fixed_point_inclusion(self, H: Subgroup) -> SimplicialMap:
        XH = self.fixed_points(H)
        return SimplicialMap(XH, self.base, tuple({x: x for x in lvl} for lvl in XH.levels))

    def action_violations(self) -> list[str]:
        X, G = self.base, self.group
        out = []
        for n in range(X.N + 1):
            lvl = set(X.levels[n])
            for g in range(G.order):
                tbl = self.action[n][g]
                if set(tbl) != lvl or set(tbl.values()) != lvl:
                    out.append(f"{G.names[g]} does not act bijectively on level {n}")
            for x in X.levels[n]:
                if self.action[n][G.identity][x] != x:
                    out.append(f"identity moves {fmt(x)}")
                for g in range(G.order):
                    for h in range(G.order):
                        if self.action[n][g].get(self.action[n][h].get(x)) != self.action[n][G.mul(g, h)].get(x):
                            out.append(f"action is not a homomorphism at {fmt(x)} for ({G.names[g]}, {G.names[h]})")
                    gx = self.action[n][g].get(x)
                    if gx is None:
                        continue
                    for i in range(n + 1 if n >= 1 else 0):
                        if self.action[n - 1][g].get(X.d(i, x)) != X.d(i, gx):
                            out.append(f"∂{i} does not commute with {G.names[g]} at {fmt(x)}")
                    if n < X.N:
                        for i in range(n + 1):
                            if self.action[n + 1][g].get(X.s(i, x)) != X.s(i, gx):
                                out.append(f"s{i} does not commute with {G.names[g]} at {fmt(x)}")
        return out

    def validate(self) -> ValidationReport:
        rep = validate(self.base)
        if not rep.ok:
            return rep
        return ValidationReport(extra=tuple(self.action_violations()))

    def is_one_vertex(self) -> bool:
        return len(self.base.levels[0]) == 1


def trivial_action(X: TruncatedSimplicialSet, G: FiniteGroup) -> GSimplicialSet:
    return GSimplicialSet(X, G, tuple(tuple({x: x for x in lvl} for _ in range(G.order))
                                      for lvl in X.levels))


def action_from_nondegenerate(X: TruncatedSimplicialSet, G: FiniteGroup,
                              on_nondegenerate: Mapping[int, Mapping]) -> GSimplicialSet:
    """Extend an action given on nondegenerate simplices (identity where omitted)."""
    action = [[dict() for _ in range(G.order)] for _ in range(X.N + 1)]
    for g in range(G.order):
        table = dict(on_nondegenerate.get(g, {}))
        for y in table:
            if y not in X.dim_of or X.is_degenerate(y):
                raise SimplicialError(f"action of {G.names[g]} is given on {fmt(y)}, "
                                      "which is not a nondegenerate simplex")
        nd = {y: table.get(y, y) for n in range(X.N + 1) for y in X.nondegenerate(n)}
        maps = extend_map(X, X, nd)
        for n in range(X.N + 1):
            action[n][g] = maps[n]
    return GSimplicialSet(X, G, tuple(tuple(a) for a in action))


# --- products, fiber products, quotients -------------------------------------

def product(A: TruncatedSimplicialSet, B: TruncatedSimplicialSet,
            size_guard: int = DEFAULT_SIZE_GUARD):
    """Levelwise product with its two projections."""
    if A.N != B.N:
        raise SimplicialError("product needs equal truncations")
    N = A.N
    levels = []
    for n in range(N + 1):
        _check_guard(len(A.levels[n]) * len(B.levels[n]), size_guard, f"product level {n}")
        levels.append([(a, b) for a in A.levels[n] for b in B.levels[n]])
    P = _componentwise(N, levels, A, B, f"{A.name}×{B.name}")
    pr1 = SimplicialMap(P, A, tuple({x: x[0] for x in lvl} for lvl in P.levels))
    pr2 = SimplicialMap(P, B, tuple({x: x[1] for x in lvl} for lvl in P.levels))
    return P, pr1, pr2


def _componentwise(N, levels, A, B, name):
    face = [[] for _ in range(N + 1)]
    degen = [[] for _ in range(N + 1)]
    for n in range(N + 1):
        if n >= 1:
            face[n] = [{(a, b): (A.d(i, a), B.d(i, b)) for a, b in levels[n]} for i in range(n + 1)]
        if n < N:
            degen[n] = [{(a, b): (A.s(i, a), B.s(i, b)) for a, b in levels[n]} for i in range(n + 1)]
    return from_tables(N, levels, face, degen, name)


def fiber_product(f: SimplicialMap, g: SimplicialMap, size_guard: int = DEFAULT_SIZE_GUARD):
    """Pairs (a, b) with f(a) = g(b), with both projections."""
    A, B = _base(f.source), _base(g.source)
    if _base(f.target) is not _base(g.target):
        raise SimplicialError("fiber product needs maps into the same simplicial set")
    N = A.N
    levels = []
    for n in range(N + 1):
        by_image: dict = {}
        for b in B.levels[n]:
            by_image.setdefault(g.maps[n][b], []).append(b)
        lvl = [(a, b) for a in A.levels[n] for b in by_image.get(f.maps[n][a], ())]
        _check_guard(len(lvl), size_guard, f"fiber product level {n}")
        levels.append(lvl)
    P = _componentwise(N, levels, A, B, f"{A.name}×_X{B.name}")
    p1 = SimplicialMap(P, f.source, tuple({x: x[0] for x in lvl} for lvl in P.levels))
    p2 = SimplicialMap(P, g.source, tuple({x: x[1] for x in lvl} for lvl in P.levels))
    return P, p1, p2


def diagonal_action(P: TruncatedSimplicialSet, A: GSimplicialSet, B: GSimplicialSet) -> GSimplicialSet:
    """Componentwise action on a (fiber) product of two G-simplicial sets."""
    G = A.group
    action = tuple(tuple({(a, b): (A.act(g, a), B.act(g, b)) for a, b in lvl} for g in range(G.order))
                   for lvl in P.levels)
    return GSimplicialSet(P, G, action)


def gproduct(A: GSimplicialSet, B: GSimplicialSet, size_guard: int = DEFAULT_SIZE_GUARD):
    P, pr1, pr2 = product(A.base, B.base, size_guard)
    PG = diagonal_action(P, A, B)
    return (PG, SimplicialMap(PG, A, pr1.maps, True), SimplicialMap(PG, B, pr2.maps, True))


def quotient(X: GSimplicialSet) -> TruncatedSimplicialSet:
    """The orbit complex of a free action; orbits are named by their first member."""
    B, G = X.base, X.group
    for n in range(B.N + 1):
        for x in B.nondegenerate(n):
            for g in range(G.order):
                if g != G.identity and X.act(g, x) == x:
                    raise NonFreeAction(x, G.names[g])
    rep = {}
    levels = []
    for n, lvl in enumerate(B.levels):
        out = []
        for x in lvl:
            if x in rep:
                continue
            out.append(x)
            for g in range(G.order):
                rep[X.act(g, x)] = x
        levels.append(out)
    face = [[] for _ in range(B.N + 1)]
    degen = [[] for _ in range(B.N + 1)]
    for n in range(B.N + 1):
        if n >= 1:
            face[n] = [{x: rep[B.d(i, x)] for x in levels[n]} for i in range(n + 1)]
        if n < B.N:
            degen[n] = [{x: rep[B.s(i, x)] for x in levels[n]} for i in range(n + 1)]
    return from_tables(B.N, levels, face, degen, f"{B.name}/{G.name}")
