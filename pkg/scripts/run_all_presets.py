#!/usr/bin/env python3
"""Run every experiment preset and write JSON/CSV reports.

    python scripts/run_all_presets.py --out runs/ [--p 101]

Exits nonzero if any preset has a failing check.
"""

import argparse
import sys
import time
from pathlib import Path

from gdimlab.presets import PRESETS, make_preset, run_preset, write_reports
from gdimlab.serialize import SessionStore


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("gdimlab-out"))
    ap.add_argument("--p", type=int, default=None)
    ap.add_argument("--only", nargs="*", default=list(PRESETS))
    args = ap.parse_args()

    store = SessionStore(args.out)
    failed = []
    for name in args.only:
        t0 = time.perf_counter()
        report = run_preset(make_preset(name, p=args.p), store)
        json_path, _ = write_reports(report, args.out / "reports")
        status = "ok" if report.ok else f"FAILED ({report.first_failure().check})"
        print(f"{name:12s} {len(report.checks):4d} checks  {time.perf_counter() - t0:6.2f}s  {status}  -> {json_path}")
        if not report.ok:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
