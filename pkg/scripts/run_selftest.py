"""Run the property suites and print one line per suite.

Example: python scripts/run_selftest.py --count 200 --jobs 4
"""

import argparse
import sys

from shtukalab.selftest import CORRUPTIONS, SUITES, SelftestConfig, run_selftest


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--max-rank", type=int, default=3)
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3, 4], choices=[2, 3, 4])
    ap.add_argument("--suite", action="append", choices=sorted(SUITES))
    ap.add_argument("--corrupt", choices=CORRUPTIONS)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    sc = SelftestConfig(seed=args.seed, count=args.count, max_rank=args.max_rank,
                        q_choices=tuple(args.q), suites=tuple(args.suite) if args.suite else None,
                        corrupt=args.corrupt)
    results = run_selftest(sc, jobs=args.jobs)
    for res in results:
        print(res.line())
        for idx, err in res.failures[:3]:
            print(f"    #{idx}: {err}")
    failed = [r.name for r in results if not r.ok]
    print("FAIL" if failed else "PASS", *failed)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
