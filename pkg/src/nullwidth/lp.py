"""Exact rational simplex method and a small branch-and-bound ILP solver.

Both work on dense tableaux of Fractions and use Bland's rule, so results and
pivot counts are fully deterministic.  They are meant for small instances and
for cross-checking the structured solvers in :mod:`nullwidth.network`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list = field(default_factory=list)
    value: Fraction | None = None
    pivots: int = 0


def _pivot(T, basis, r, c):
    prow = T[r]
    inv = 1 / prow[c]
    T[r] = prow = [v * inv for v in prow]
    for i, row in enumerate(T):
        if i != r:
            f = row[c]
            if f:
                T[i] = [a - f * b for a, b in zip(row, prow)]
    basis[r] = c


def _run(T, basis, ncols, max_pivots):
    """Minimise the objective stored in the last row (reduced costs); Bland's rule."""
    pivots = 0
    obj = T[-1]
    while True:
        obj = T[-1]
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            return "optimal", pivots
        best = None
        for i in range(len(T) - 1):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded", pivots
        _pivot(T, basis, best[1], enter)
        pivots += 1
        if max_pivots and pivots > max_pivots:
            raise RuntimeError("pivot limit exceeded")


def simplex(c, A, b, max_pivots=None) -> LPResult:
    """Minimise ``c x`` subject to ``A x = b``, ``x >= 0`` (dense, exact).

    Two-phase method with artificial variables; Bland's rule prevents cycling.
    """
    m = len(A)
    n = len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase one tableau: columns x (n), artificials (m), rhs
    T = [A[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    obj = [Fraction(0)] * n + [Fraction(1)] * m + [Fraction(0)]
    for i in range(m):
        obj = [o - t for o, t in zip(obj, T[i])]
    T.append(obj)
    basis = [n + i for i in range(m)]
    status, p1 = _run(T, basis, n + m, max_pivots)
    if T[-1][-1] != 0:
        return LPResult("infeasible", pivots=p1)
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
            p1 += 1
        i += 1
    T = [row[:n] + [row[-1]] for row in T[:-1]]
    cost = [Fraction(v) for v in c] + [Fraction(0)]
    for i, bv in enumerate(basis):
        f = cost[bv]
        if f:
            cost = [a - f * r for a, r in zip(cost, T[i])]
    T.append(cost)
    status, p2 = _run(T, basis, n, max_pivots)
    if status != "optimal":
        return LPResult(status, pivots=p1 + p2)
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", x, value, p1 + p2)


@dataclass
class LinfLP:
    """``min max_j |x_j - center_j|`` subject to ``A x = rhs`` and optional box bounds.

    ``A`` is given as sparse rows ``{j: coeff}`` over ``nvars`` variables.
    """

    rows: list
    rhs: list
    nvars: int
    center: list | None = None

    def solve(self, lower=None, upper=None, max_pivots=None) -> LPResult:
        n = self.nvars
        ctr = self.center or [0] * n
        lower = lower or {}
        upper = upper or {}
        # columns: p_j, q_j (x = p - q), s, slack_plus_j, slack_minus_j, bound slacks
        bounds = [(j, "u", upper[j]) for j in sorted(upper)] + [(j, "l", lower[j]) for j in sorted(lower)]
        ncol = 2 * n + 1 + 2 * n + len(bounds)
        S = 2 * n
        A, b = [], []
        for row, r in zip(self.rows, self.rhs):
            line = [0] * ncol
            for j, v in row.items():
                line[j] += v
                line[n + j] -= v
            A.append(line)
            b.append(r)
        for j in range(n):
            line = [0] * ncol
            line[j], line[n + j], line[S], line[S + 1 + j] = 1, -1, -1, 1
            A.append(line)
            b.append(ctr[j])
            line = [0] * ncol
            line[j], line[n + j], line[S], line[S + 1 + n + j] = -1, 1, -1, 1
            A.append(line)
            b.append(-Fraction(ctr[j]))
        for k, (j, kind, val) in enumerate(bounds):
            line = [0] * ncol
            sgn = 1 if kind == "u" else -1
            line[j], line[n + j], line[S + 1 + 2 * n + k] = sgn, -sgn, 1
            A.append(line)
            b.append(sgn * Fraction(val))
        c = [0] * ncol
        c[S] = 1
        res = simplex(c, A, b, max_pivots=max_pivots)
        if res.status == "optimal":
            res.x = [res.x[j] - res.x[n + j] for j in range(n)]
        return res


class BranchAndBoundLimit(Exception):
    pass


def integer_linf(problem: LinfLP, box=None, node_limit=20000):
    """Exact integral optimum of an :class:`LinfLP` by depth-first branch and bound.

    Returns ``(x, value, stats)`` or ``(None, None, stats)`` when no integral
    point exists inside the box ``|x_j| <= box``.
    """
    n = problem.nvars
    base_lo = {j: -box for j in range(n)} if box is not None else {}
    base_hi = {j: box for j in range(n)} if box is not None else {}
    best = [None, None]
    stats = {"nodes": 0, "pivots": 0}

    def visit(lo, hi):
        stats["nodes"] += 1
        if stats["nodes"] > node_limit:
            raise BranchAndBoundLimit("branch and bound node limit reached")
        res = problem.solve(lower=lo, upper=hi)
        stats["pivots"] += res.pivots
        if res.status != "optimal":
            return
        if best[1] is not None and res.value >= best[1]:
            return
        frac = next((j for j, v in enumerate(res.x) if v.denominator != 1), None)
        if frac is None:
            best[0], best[1] = [int(v) for v in res.x], res.value
            return
        v = res.x[frac]
        hi2 = dict(hi)
        hi2[frac] = min(hi.get(frac, floor(v)), floor(v))
        lo2 = dict(lo)
        lo2[frac] = max(lo.get(frac, ceil(v)), ceil(v))
        # explore the side nearer the LP value first
        sides = [(lo, hi2), (lo2, hi)] if v - floor(v) <= Fraction(1, 2) else [(lo2, hi), (lo, hi2)]
        for a, b in sides:
            if all(a.get(j, -10**18) <= b.get(j, 10**18) for j in set(a) | set(b)):
                visit(a, b)

    visit(base_lo, base_hi)
    return best[0], best[1], stats
