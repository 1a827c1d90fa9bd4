"""Run the norm scale study and write the CSV artifact.

Usage: python3 scripts/run_scale_study.py [--L 1,2,3,4] [--seeds 10] [--jobs N] [--out scale_study.csv]
"""
import argparse
import sys
import time
from fractions import Fraction

from nullwidth.certify import scale_study
from nullwidth.cli import atomic_write, study_csv


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--L", default="1,2,3,4")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--T-const", default="1")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--no-runtime", action="store_true")
    p.add_argument("--out", default="scale_study.csv")
    args = p.parse_args(argv)
    levels = [int(x) for x in args.L.split(",")]
    t0 = time.perf_counter()
    log = lambda r: print(f"L={r['L']} seed={r['seed']} {r['error'] or 'ok'} {r['runtime_s']}s", file=sys.stderr)
    rows = scale_study(levels, args.seeds, T_const=Fraction(args.T_const), base_seed=args.seed,
                       verify=args.verify, jobs=args.jobs, log=log)
    atomic_write(args.out, study_csv(rows, with_runtime=not args.no_runtime))
    print(f"wrote {len(rows)} rows to {args.out} in {time.perf_counter() - t0:.1f}s")
    return 1 if any(r["error"] for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
