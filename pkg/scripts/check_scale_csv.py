"""Regression check on a scale-study CSV.

Each normalized column must stay within 15% of the constant fitted on the
smaller levels.  Exit status 0 when every column passes, 1 otherwise.

Usage: python3 scripts/check_scale_csv.py scale_study.csv
"""
import csv
import sys

from nullwidth.certify import CSV_COLUMNS, scale_regression


def check(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames[: len(CSV_COLUMNS)] != CSV_COLUMNS:
            print(f"unexpected header {reader.fieldnames}")
            return False
        rows = list(reader)
    res = scale_regression(rows)
    ok = res.pop("errors") == 0
    for col, r in res.items():
        per_L = " ".join(f"L{L}={float(v):.4f}" for L, v in r["per_L"].items())
        print(f"{'PASS' if r['ok'] else 'FAIL'} {col}: {per_L} constant={float(r['constant']):.4f}")
        ok = ok and r["ok"]
    return ok


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    sys.exit(0 if check(sys.argv[1]) else 1)
