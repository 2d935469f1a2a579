#!/usr/bin/env python3
"""Run the acceptance criteria outside pytest and print one PASS/FAIL line each.

Exit status is the number of failing criteria.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from test_acceptance import CRITERIA, run_criterion  # noqa: E402


def main() -> int:
    failed = 0
    t0 = time.perf_counter()
    for number, title, fn in CRITERIA:
        ok, line = run_criterion(number, title, fn)
        failed += not ok
        print(line, flush=True)
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria pass in {time.perf_counter() - t0:.1f} s")
    return failed


if __name__ == "__main__":
    sys.exit(main())
