"""Command line interface: ``equicohom {validate,cohomology,eilenberg,serre} DOCUMENT``.

Exit codes: 0 success, 1 computational mismatch, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .bredon import BredonComplex, TruncationTooLow
from .coefficients import CoefficientError, NotOneVertex, check_well_defined
from .eilenberg import verify_eilenberg
from .io import SchemaError, digest, fixture_path, load_json, parse_document
from .rings import RingError, parse_ring
from .serre import Fibration, MonodromyNotSupplied, NotFibrationLike, e2_compare
from .simplicial import DEFAULT_SIZE_GUARD, SimplicialError, validate

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2


class InvalidInput(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs; built from the parsed arguments."""

    document: str
    ring: str | None = None
    seed: int = 0
    degrees: str | None = None
    rmax: int = 3
    timing: bool = False
    json: str | None = None
    size_guard: int = DEFAULT_SIZE_GUARD

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = cls.__dataclass_fields__
        return cls(**{k: v for k, v in vars(args).items() if k in known})


def parse_degrees(text: str | None, top: int) -> list[int]:
    if text is None:
        return list(range(top + 1))
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise InvalidInput(f"--degrees expects a..b or a single degree, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise InvalidInput(f"empty or negative degree range {text!r}")
    return list(range(lo, hi + 1))


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and not p.suffix:
        fx = fixture_path(path)
        if fx.exists():
            return fx
    return p


def _load(args, field_only: bool = False):
    raw = load_json(_resolve(args.document))
    ring = parse_ring(args.ring) if args.ring else None
    doc = parse_document(raw, ring, size_guard=args.size_guard)
    if field_only and not doc.ring.is_field:
        raise InvalidInput(f"this command needs a field; the document uses {doc.ring} (pass --ring Q or Fp:p)")
    return raw, doc


def validation_messages(doc) -> list[str]:
    msgs = list(doc.structural)
    if not msgs:
        msgs += [f"coefficients: {v}" for v in check_well_defined(doc.coefficients).violations]
    if not msgs and doc.fibration is not None:
        fb = doc.fibration
        if fb.kind == "map":
            rep = validate(fb.f.source.base)
            msgs += [f"total space: {m}" for m in rep.messages()]
            if rep.ok:
                msgs += [f"total space action: {m}" for m in fb.f.source.action_violations()]
            msgs += [f"fibration map: {m}" for m in fb.f.violations()]
        if not msgs:
            msgs += [f"total coefficients: {v}" for v in check_well_defined(fb.M_total).violations]
            for q, h in sorted(fb.fiber_systems.items()):
                msgs += [f"fiber system q={q}: {v}" for v in check_well_defined(h).violations]
    return msgs


def _header(cmd: str, raw: dict, doc, args) -> dict:
    return {"command": cmd, "input": doc.name, "digest": digest(raw), "ring": doc.ring.tag,
            "seed": args.seed, "group": doc.group.name, "truncation": doc.complex.N,
            "config": {k: v for k, v in asdict(args).items() if k not in ("document", "json", "timing")}}


def _cohomology_lines(res) -> list[str]:
    width = max((len(str(n)) for n in res.degrees), default=1)
    return [f"  H^{n:<{width}} = {res.describe(n)}" for n in sorted(res.degrees)]


def cmd_validate(args) -> tuple[int, dict, list[str]]:
    raw, doc = _load(args)
    msgs = validation_messages(doc)
    report = _header("validate", raw, doc, args)
    report.update({"valid": not msgs, "violations": msgs})
    lines = [f"{doc.name or args.document}: {'valid' if not msgs else 'INVALID'}"] + [f"  {m}" for m in msgs]
    return (EXIT_OK if not msgs else EXIT_INVALID), report, lines


def _require_valid(doc):
    msgs = validation_messages(doc)
    if msgs:
        raise InvalidInput("input fails validation: " + msgs[0])


def cmd_cohomology(args) -> tuple[int, dict, list[str]]:
    raw, doc = _load(args)
    _require_valid(doc)
    degrees = parse_degrees(args.degrees, doc.complex.N - 1)
    res = BredonComplex(doc.coefficients).cohomology(degrees)
    report = _header("cohomology", raw, doc, args)
    report["cohomology"] = res.as_dict()
    lines = [f"Bredon–Illman cohomology of {doc.name or args.document} over {doc.ring}"] + _cohomology_lines(res)
    return EXIT_OK, report, lines


def cmd_eilenberg(args) -> tuple[int, dict, list[str]]:
    raw, doc = _load(args)
    _require_valid(doc)
    degrees = parse_degrees(args.degrees, doc.complex.N - 1)
    rep = verify_eilenberg(doc.coefficients, degrees, seed=args.seed)
    report = _header("eilenberg", raw, doc, args)
    report.update(rep.as_dict())
    lines = [f"Eilenberg comparison for {doc.name or args.document} over {doc.ring}: "
             f"{'agree' if rep.ok else 'MISMATCH'}", "  Bredon pipeline:"]
    lines += ["  " + l for l in _cohomology_lines(rep.bredon)]
    lines += ["  invariant pipeline:"] + ["  " + l for l in _cohomology_lines(rep.invariant)]
    lines += [f"  {k}: {'ok' if v else 'FAIL'}" for k, v in rep.checks.items()]
    lines += [f"  ! {m}" for m in rep.failures]
    return (EXIT_OK if rep.ok else EXIT_MISMATCH), report, lines


def cmd_serre(args) -> tuple[int, dict, list[str]]:
    raw, doc = _load(args, field_only=True)
    if doc.fibration is None:
        raise InvalidInput("the document has no fibration block")
    _require_valid(doc)
    fb = doc.fibration
    fib = Fibration(fb.f, fb.M_total)
    rep = e2_compare(fib, fb.fiber_systems, r_max=args.rmax)
    report = _header("serre", raw, doc, args)
    report.update(rep.as_dict())
    top = fib.N - 1
    lines = [f"Serre spectral sequence for {doc.name or args.document} over {doc.ring}: "
             f"{'agree' if rep.ok else 'MISMATCH'}", "  E2^{p,q} (rows q, columns p):"]
    for q in range(top, -1, -1):
        cells = [f"{rep.e2.get((p, q), 0):>3}" for p in range(top - q + 1)]
        lines.append(f"    q={q}: " + " ".join(cells))
    lines.append(f"  collapse page: {rep.collapse_page if rep.collapse_page is not None else 'not within r_max'}")
    for n, (a, b) in sorted(rep.convergence.items()):
        lines.append(f"  n={n}: Σ dim E_inf = {a}, dim H^n = {b}{'' if a == b else '  MISMATCH'}")
    for p, q, got, want in rep.mismatches:
        lines.append(f"  ! E2^{{{p},{q}}} = {got}, expected {want}")
    return (EXIT_OK if rep.ok else EXIT_MISMATCH), report, lines


COMMANDS = {"validate": cmd_validate, "cohomology": cmd_cohomology,
            "eilenberg": cmd_eilenberg, "serre": cmd_serre}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="equicohom", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("document", help="input JSON document (or the name of a bundled fixture)")
        p.add_argument("--ring", help="override the coefficient ring: Z, Q or Fp:p")
        p.add_argument("--json", metavar="OUT", help="also write the report as JSON to this path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
        if name in ("cohomology", "eilenberg"):
            p.add_argument("--degrees", help="degree range a..b (default 0..N-1)")
        if name == "serre":
            p.add_argument("--field", dest="ring", help="alias for --ring")
            p.add_argument("--rmax", type=int, default=3)
        p.add_argument("--size-guard", type=int, default=DEFAULT_SIZE_GUARD,
                       help="refuse to build complexes with more simplices than this")
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    args = RunConfig.from_args(ns)
    t0 = time.perf_counter()
    try:
        code, report, lines = COMMANDS[ns.command](args)
    except (InvalidInput, SchemaError, RingError, SimplicialError, CoefficientError, TruncationTooLow,
            NotOneVertex, NotFibrationLike, MonodromyNotSupplied) as exc:
        kind = type(exc).__name__
        print(f"error ({kind}): {exc}", file=sys.stderr)
        if args.json:
            Path(args.json).write_text(json.dumps({"command": ns.command, "error": kind,
                                                   "message": str(exc)}, indent=2, sort_keys=True) + "\n")
        return EXIT_INVALID
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 3)
        lines.append(f"  time: {report['seconds']} s")
    print("\n".join(lines))
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
