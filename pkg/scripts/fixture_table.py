#!/usr/bin/env python3
"""Print a cohomology table for every bundled fixture.

Usage: python scripts/fixture_table.py [--ring Q]
"""

import argparse

from equicohom.bredon import bredon_cohomology
from equicohom.cli import validation_messages
from equicohom.io import FIXTURES, load_fixture
from equicohom.rings import parse_ring


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ring", help="override the coefficient ring (Z, Q, Fp:p)")
    args = ap.parse_args()
    ring = parse_ring(args.ring) if args.ring else None
    rows = []
    for path in sorted(FIXTURES.glob("*.json")):
        d = load_fixture(path.stem, ring)
        if validation_messages(d):
            rows.append((path.stem, d.group.name, "invalid"))
            continue
        H = bredon_cohomology(d.coefficients)
        rows.append((path.stem, d.group.name, ", ".join(H.describe(n) for n in sorted(H.degrees))))
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    print(f"{'fixture':<{w0}}  {'G':<{w1}}  H^0, H^1, ...")
    for name, g, h in rows:
        print(f"{name:<{w0}}  {g:<{w1}}  {h}")


if __name__ == "__main__":
    main()
