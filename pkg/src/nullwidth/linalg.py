"""Exact sparse linear algebra over the rationals."""
from __future__ import annotations

from fractions import Fraction


class SparseEchelon:
    """Incremental row echelon form of a sparse rational system ``A x = b``.

    Rows are dicts ``column -> value``.  Each inserted row is reduced against
    the pivots present at insertion time, so back substitution in reverse
    insertion order solves the system with free variables set to zero.
    """

    def __init__(self):
        self.pivots = {}  # column -> (row dict, rhs), row normalised to 1 at the pivot
        self.order = []
        self.inconsistent = False

    @property
    def rank(self):
        return len(self.order)

    def reduce(self, row, rhs):
        row = dict(row)
        rhs = Fraction(rhs)
        while True:
            hit = [c for c in row if c in self.pivots]
            if not hit:
                return row, rhs
            for c in hit:
                f = row.get(c)
                if not f:
                    continue
                prow, prhs = self.pivots[c]
                for cc, v in prow.items():
                    nv = row.get(cc, 0) - f * v
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
                rhs -= f * prhs

    def add(self, row, rhs):
        """Insert a row; returns False if it is inconsistent with earlier rows."""
        row, rhs = self.reduce({c: Fraction(v) for c, v in row.items() if v}, rhs)
        if not row:
            if rhs != 0:
                self.inconsistent = True
                return False
            return True
        col = min(row, key=lambda c: (len(row), c))
        inv = 1 / row[col]
        self.pivots[col] = ({c: v * inv for c, v in row.items()}, rhs * inv)
        self.order.append(col)
        return True

    def solve(self):
        """Particular solution with free variables zero, or None if inconsistent."""
        if self.inconsistent:
            return None
        x = {}
        for col in reversed(self.order):
            prow, prhs = self.pivots[col]
            val = prhs - sum((v * x.get(c, 0) for c, v in prow.items() if c != col), Fraction(0))
            if val:
                x[col] = val
        return x


def solve_sparse(rows, rhs):
    """Solve ``A x = b`` exactly; returns ``(solution or None, rank)``."""
    ech = SparseEchelon()
    for row, r in zip(rows, rhs):
        ech.add(row, r)
    return ech.solve(), ech.rank
