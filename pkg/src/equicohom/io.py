"""JSON input documents: parsing with located errors, and canonical serialization.

Document layout (all keys except ``complex`` optional)::

    {
      "name": "s1_twisted",
      "group": {"name": "Z/2", "elements": ["e", "t"], "table": [["e", "t"], ["t", "e"]]},
      "complex": {
        "truncation": 2,
        "simplices": {"0": ["v"], "1": {"e": ["v", "v"]}},
        "action": {"t": {"e1": "e2", "e2": "e1"}}
      },
      "coefficients": {
        "ring": "Z", "default_rank": 1,
        "ranks": [{"subgroup": ["e"], "vertex": "v", "rank": 1}],
        "edges": [{"subgroup": ["e"], "edge": "e", "matrix": [[-1]]}],
        "orbit_maps": [{"source": ["e"], "target": ["e", "t"], "element": "e",
                        "vertex": "v", "matrix": [[1]]}]
      },
      "fibration": {"kind": "identity"}
    }

Faces are listed as ``[∂_0 x, …, ∂_n x]`` and may name generated degenerate
simplices such as ``"s0(v)"``.  Matrices are row-major; rationals are written
``[numerator, denominator]``.  Fibration blocks are ``{"kind": "identity"}``,
``{"kind": "product", "fiber": <complex>}`` or ``{"kind": "map", "total":
<complex>, "map": {simplex: image}, "total_coefficients": <coefficients>,
"fiber_systems": [{"degree": q, "coefficients": <coefficients>}]}``; in the
last case the document's own complex and coefficients describe the base.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .coefficients import CoefficientError, LocalCoefficientSystem, build_system, pullback_system
from .groups import FiniteGroup, GroupError, OrbitCategory, trivial_group
from .rings import QQ, Ring, RingError, parse_ring
from .simplicial import (DEFAULT_SIZE_GUARD, GSimplicialSet, SimplicialError, SimplicialMap,
                         action_from_nondegenerate, extend_map, from_nondegenerate, gproduct,
                         validate)


class SchemaError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _req(block: dict, key: str, where: str):
    if not isinstance(block, dict):
        raise SchemaError(where, "expected an object")
    if key not in block:
        raise SchemaError(f"{where}.{key}", "missing")
    return block[key]


def _expect(cond: bool, where: str, message: str):
    if not cond:
        raise SchemaError(where, message)


# --- blocks ------------------------------------------------------------------------------

def parse_group(block: dict | None) -> FiniteGroup:
    if block is None:
        return trivial_group()
    names = _req(block, "elements", "group")
    table = _req(block, "table", "group")
    _expect(isinstance(names, list) and all(isinstance(s, str) for s in names), "group.elements",
            "expected a list of element names")
    _expect(isinstance(table, list), "group.table", "expected a list of rows")
    try:
        return FiniteGroup.from_names(names, table, block.get("name", "G"))
    except GroupError as exc:
        raise SchemaError("group", str(exc)) from None


def parse_complex(block: dict, G: FiniteGroup, where: str = "complex",
                  size_guard: int = DEFAULT_SIZE_GUARD) -> GSimplicialSet:
    N = _req(block, "truncation", where)
    _expect(isinstance(N, int) and N >= 1, f"{where}.truncation", "expected an integer ≥ 1")
    simp = _req(block, "simplices", where)
    _expect(isinstance(simp, dict), f"{where}.simplices", "expected an object keyed by level")
    levels: list[Any] = [[] for _ in range(max([N] + [int(k) for k in simp if str(k).isdigit()]) + 1)]
    for k, v in simp.items():
        _expect(str(k).isdigit(), f"{where}.simplices.{k}", "level keys are non-negative integers")
        n = int(k)
        if n == 0:
            _expect(isinstance(v, list) and all(isinstance(s, str) for s in v),
                    f"{where}.simplices.0", "expected a list of vertex ids")
        else:
            _expect(isinstance(v, dict), f"{where}.simplices.{k}", "expected {id: [faces]}")
        levels[n] = v
    try:
        X = from_nondegenerate(N, levels, name=block.get("name", ""), size_guard=size_guard)
    except SimplicialError as exc:
        raise SchemaError(f"{where}.simplices", str(exc)) from None
    action = block.get("action", {})
    _expect(isinstance(action, dict), f"{where}.action", "expected {element: {simplex: image}}")
    table = {}
    for gname, mp in action.items():
        try:
            g = G.element(gname)
        except GroupError as exc:
            raise SchemaError(f"{where}.action.{gname}", str(exc)) from None
        _expect(isinstance(mp, dict), f"{where}.action.{gname}", "expected {simplex: image}")
        for a, b in mp.items():
            for s in (a, b):
                _expect(s in X.dim_of and not X.is_degenerate(s), f"{where}.action.{gname}",
                        f"{s!r} is not a nondegenerate simplex")
        table[g] = mp
    try:
        return action_from_nondegenerate(X, G, table)
    except SimplicialError as exc:
        raise SchemaError(f"{where}.action", str(exc)) from None


def _subgroup(G: FiniteGroup, names, where: str) -> tuple[int, ...]:
    _expect(isinstance(names, list), where, "expected a list of element names")
    try:
        H = tuple(sorted(G.element(s) for s in names))
    except GroupError as exc:
        raise SchemaError(where, str(exc)) from None
    _expect(G.is_subgroup(H), where, f"{names} is not a subgroup")
    return H


def parse_coefficients(block: dict | None, X: GSimplicialSet, ring: Ring | None = None,
                       where: str = "coefficients") -> LocalCoefficientSystem:
    block = block or {}
    G = X.group
    try:
        R = ring or parse_ring(block.get("ring", "Z"))
    except RingError as exc:
        raise SchemaError(f"{where}.ring", str(exc)) from None
    default = block.get("default_rank", 1)
    _expect(isinstance(default, int) and default >= 0, f"{where}.default_rank", "expected an integer ≥ 0")
    ranks, edges, omaps = {}, {}, {}
    for i, ent in enumerate(block.get("ranks", [])):
        w = f"{where}.ranks[{i}]"
        H = _subgroup(G, _req(ent, "subgroup", w), f"{w}.subgroup")
        ranks[(H, _req(ent, "vertex", w))] = _req(ent, "rank", w)
    for i, ent in enumerate(block.get("edges", [])):
        w = f"{where}.edges[{i}]"
        H = _subgroup(G, _req(ent, "subgroup", w), f"{w}.subgroup")
        edges[(H, _req(ent, "edge", w))] = _matrix(_req(ent, "matrix", w), R, f"{w}.matrix")
    orb = OrbitCategory(G)
    for i, ent in enumerate(block.get("orbit_maps", [])):
        w = f"{where}.orbit_maps[{i}]"
        H = _subgroup(G, _req(ent, "source", w), f"{w}.source")
        K = _subgroup(G, _req(ent, "target", w), f"{w}.target")
        try:
            a = orb.morphism(H, K, G.element(_req(ent, "element", w)))
        except GroupError as exc:
            raise SchemaError(w, str(exc)) from None
        omaps[(a, _req(ent, "vertex", w))] = _matrix(_req(ent, "matrix", w), R, f"{w}.matrix")
    try:
        M = build_system(X, R, default, ranks, edges, omaps)
    except (CoefficientError, ValueError) as exc:
        raise SchemaError(where, str(exc)) from None
    return M


def _matrix(rows, R: Ring, where: str):
    _expect(isinstance(rows, list) and all(isinstance(r, list) for r in rows), where,
            "expected a list of rows")
    _expect(len({len(r) for r in rows}) <= 1, where, "rows have different lengths")
    try:
        return [[R(x) for x in r] for r in rows]
    except (RingError, ZeroDivisionError, TypeError, ValueError) as exc:
        raise SchemaError(where, str(exc)) from None


# --- documents ------------------------------------------------------------------------------

@dataclass
class FibrationSpec:
    kind: str
    f: SimplicialMap
    M_total: LocalCoefficientSystem
    fiber_systems: dict[int, LocalCoefficientSystem] = field(default_factory=dict)


@dataclass
class Document:
    raw: dict
    group: FiniteGroup
    complex: GSimplicialSet
    coefficients: LocalCoefficientSystem | None
    fibration: FibrationSpec | None
    structural: list[str] = field(default_factory=list)
    ring_override: Ring | None = None

    @property
    def name(self) -> str:
        return self.raw.get("name", "")

    @property
    def ring(self) -> Ring:
        if self.coefficients is not None:
            return self.coefficients.ring
        return self.ring_override or parse_ring((self.raw.get("coefficients") or {}).get("ring", "Z"))


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(str(path), f"cannot read: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"not valid JSON ({exc.msg} at line {exc.lineno})") from None
    _expect(isinstance(doc, dict), str(path), "top level must be an object")
    return doc


def parse_document(doc: dict, ring: Ring | None = None, size_guard: int = DEFAULT_SIZE_GUARD) -> Document:
    G = parse_group(doc.get("group"))
    X = parse_complex(_req(doc, "complex", "document"), G, size_guard=size_guard)
    # Coefficients are only meaningful on a valid G-complex; otherwise report and stop here.
    rep = validate(X.base)
    problems = rep.messages() if not rep.ok else [f"action: {m}" for m in X.action_violations()]
    if problems:
        return Document(doc, G, X, None, None, problems, ring)
    M = parse_coefficients(doc.get("coefficients"), X, ring)
    fib = None
    if "fibration" in doc:
        fib = parse_fibration(doc["fibration"], X, M, size_guard)
    return Document(doc, G, X, M, fib, [], ring)


def parse_fibration(block: dict, X: GSimplicialSet, M: LocalCoefficientSystem,
                    size_guard: int = DEFAULT_SIZE_GUARD) -> FibrationSpec:
    w = "fibration"
    kind = _req(block, "kind", w)
    R = M.ring
    from .simplicial import identity_map
    if kind == "identity":
        return FibrationSpec(kind, identity_map(X), M)
    if kind == "product":
        F = parse_complex(_req(block, "fiber", w), X.group, f"{w}.fiber", size_guard)
        _expect(F.N == X.N, f"{w}.fiber.truncation", "must equal the base truncation")
        Y, pr1, _ = gproduct(X, F, size_guard)
        return FibrationSpec(kind, pr1, pullback_system(M, Y, pr1))
    if kind == "map":
        Y = parse_complex(_req(block, "total", w), X.group, f"{w}.total", size_guard)
        _expect(Y.N == X.N, f"{w}.total.truncation", "must equal the base truncation")
        mp = _req(block, "map", w)
        try:
            maps = extend_map(Y.base, X.base, mp)
        except SimplicialError as exc:
            raise SchemaError(f"{w}.map", str(exc)) from None
        f = SimplicialMap(Y, X, maps, True)
        bad = f.violations()
        _expect(not bad, f"{w}.map", bad[0] if bad else "")
        MY = parse_coefficients(block.get("total_coefficients", {"ring": R.tag}), Y, R,
                                f"{w}.total_coefficients")
        systems = {}
        for i, ent in enumerate(block.get("fiber_systems", [])):
            q = _req(ent, "degree", f"{w}.fiber_systems[{i}]")
            systems[q] = parse_coefficients(_req(ent, "coefficients", f"{w}.fiber_systems[{i}]"), X, R,
                                            f"{w}.fiber_systems[{i}].coefficients")
        return FibrationSpec(kind, f, MY, systems)
    raise SchemaError(f"{w}.kind", f"unknown fibration kind {kind!r}")


# --- serialization ------------------------------------------------------------------------

def serialize_complex(X: GSimplicialSet) -> dict:
    B, G = X.base, X.group
    simplices: dict[str, Any] = {"0": list(B.nondegenerate(0))}
    for n in range(1, B.N + 1):
        nd = B.nondegenerate(n)
        if nd:
            simplices[str(n)] = {x: [B.d(i, x) for i in range(n + 1)] for x in nd}
    action = {}
    for g in range(G.order):
        if g == G.identity:
            continue
        moved = {x: X.act(g, x) for n in range(B.N + 1) for x in B.nondegenerate(n) if X.act(g, x) != x}
        if moved:
            action[G.names[g]] = moved
    out = {"truncation": B.N, "simplices": simplices}
    if B.name:
        out["name"] = B.name
    if action:
        out["action"] = action
    return out


def serialize_group(G: FiniteGroup) -> dict:
    return {"name": G.name, "elements": list(G.names),
            "table": [[G.names[G.mul(a, b)] for b in range(G.order)] for a in range(G.order)]}


def _plain_matrix(A) -> list:
    from .linalg import to_lists
    import numpy as np
    return to_lists(np.asarray(A, dtype=object))


def serialize_coefficients(M: LocalCoefficientSystem) -> dict:
    G = M.X.group
    sub = lambda H: [G.names[h] for h in H]
    s = M.supplied or {"default_rank": 1, "ranks": M.ranks, "edges": {}, "orbit_maps": {}}
    out = {"ring": M.ring.tag, "default_rank": s["default_rank"]}
    ranks = [{"subgroup": sub(H), "vertex": v, "rank": r} for (H, v), r in s["ranks"].items()
             if r != s["default_rank"]]
    if ranks:
        out["ranks"] = ranks
    if s["edges"]:
        out["edges"] = [{"subgroup": sub(H), "edge": e, "matrix": _plain_matrix(A)}
                        for (H, e), A in s["edges"].items()]
    if s["orbit_maps"]:
        out["orbit_maps"] = [{"source": sub(a.source), "target": sub(a.target), "element": G.names[a.rep],
                              "vertex": y, "matrix": _plain_matrix(A)} for (a, y), A in s["orbit_maps"].items()]
    return out


def serialize_document(d: Document) -> dict:
    out = {"group": serialize_group(d.group), "complex": serialize_complex(d.complex),
           "coefficients": serialize_coefficients(d.coefficients)}
    if d.name:
        out["name"] = d.name
    if "fibration" in d.raw:
        out["fibration"] = d.raw["fibration"]
    for k in ("description",):
        if k in d.raw:
            out[k] = d.raw[k]
    return out


FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture document, e.g. ``fixture_path("s1_twisted")``."""
    return FIXTURES / f"{name}.json"


def load_fixture(name: str, ring: Ring | None = None) -> Document:
    return parse_document(load_json(fixture_path(name)), ring)
