"""l-infinity optimal coboundary fillings and nearest integral cocycles.

Every routine is exact.  The dense simplex/branch-and-bound route in
:mod:`nullwidth.lp` works for any complex; structured instances (degree-0
fillers, degree-1 fillers with vanishing H^1, top-degree fills on
pseudomanifolds) are routed to the network solvers, which are
cross-validated against the simplex route in the test-suite.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

from .complexes import Cochain, coboundary
from .linalg import SparseEchelon
from .lp import BranchAndBoundLimit, LinfLP, integer_linf
from . import network

__all__ = [
    "FillResult",
    "CocycleApprox",
    "Infeasible",
    "NoIntegralClass",
    "BoxTooSmall",
    "SizeLimit",
    "fill_linf_real",
    "fill_linf_integral",
    "fill_linf",
    "nearest_integral_cocycle",
    "ilp_fill_oracle",
]

ORACLE_VAR_LIMIT = 10_000
DENSE_LP_LIMIT = 400


class Infeasible(Exception):
    """The right-hand side is not a coboundary (under the given constraints)."""


class NoIntegralClass(Exception):
    """No integral cocycle lies in the cohomology class of the input."""


class BoxTooSmall(Exception):
    """No integral filler exists inside the requested box."""


class SizeLimit(Exception):
    """The instance is too large for the exact dense solver."""


@dataclass
class FillResult:
    """Filler ``a`` with ``delta a = w``, its l-infinity norm and a solver trace."""

    filler: Cochain
    norm: Fraction
    trace: dict = field(default_factory=dict)
    optimal: bool = True
    k_round: int = 0

    def to_json(self):
        return {
            "norm": _fmt(self.norm),
            "optimal": self.optimal,
            "k_round": self.k_round,
            "trace": {k: (_fmt(v) if isinstance(v, Fraction) else v) for k, v in self.trace.items()},
            "filler": self.filler.to_json(),
        }


@dataclass
class CocycleApprox:
    cocycle: Cochain
    distance: Fraction
    optimal: bool
    method: str


def _fmt(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _rows_for(host, k, removed):
    """Sparse rows of delta: C^{k-1} -> C^k over the non-removed filler cells."""
    keep = [c for c in range(host.count(k - 1)) if c not in removed]
    col = {c: j for j, c in enumerate(keep)}
    rows = []
    for row in host.boundary(k):
        rows.append({col[f]: s for f, s in row if f in col})
    return keep, rows


def _check_solution(w, a):
    if coboundary(a).values != {k: v for k, v in w.values.items() if v}:
        raise AssertionError("internal error: filler does not reproduce the input")


def _degree0(w, removed, center, integral):
    host = w.host
    n = host.count(0)
    adj = [[] for _ in range(n)]
    for e, (u, v) in enumerate(host.simplices[1]):
        adj[u].append((v, e, 1))
        adj[v].append((u, e, -1))
    pot = [None] * n
    comps = []
    for root in range(n):
        if pot[root] is not None:
            continue
        pot[root] = Fraction(0)
        comp = [root]
        q = deque([root])
        while q:
            u = q.popleft()
            for v, e, sg in adj[u]:
                # w(e) = g(head) - g(tail) for e = (u < v)
                val = pot[u] + sg * Fraction(w.values.get(e, 0))
                if pot[v] is None:
                    pot[v] = val
                    comp.append(v)
                    q.append(v)
                elif pot[v] != val:
                    raise Infeasible("1-cochain is not a coboundary")
        comps.append(sorted(comp))
    values = {}
    for comp in comps:
        fixed = [v for v in comp if v in removed]
        if fixed:
            shift = pot[fixed[0]]
            if any(pot[v] != shift for v in fixed):
                raise Infeasible("constraints force different constants on one component")
        else:
            devs = [pot[v] - Fraction(center.get(v, 0)) for v in comp]
            mid = (max(devs) + min(devs)) / 2
            shift = Fraction(floor(mid)) if integral else mid
            if integral and mid.denominator != 1:
                alt = Fraction(ceil(mid))
                cost = lambda c: max(abs(d - c) for d in devs)
                if cost(alt) < cost(shift):
                    shift = alt
        for v in comp:
            val = pot[v] - shift
            if val:
                values[v] = val
    return values, {"method": "potentials-degree0"}


def _generic(w, removed, center, integral, box=None):
    host, k = w.host, w.degree
    keep, rows = _rows_for(host, k, removed)
    if len(keep) > DENSE_LP_LIMIT and not integral:
        raise SizeLimit(f"{len(keep)} variables exceed the dense LP limit")
    ctr = [Fraction(center.get(c, 0)) for c in keep]
    rhs = [Fraction(w.values.get(i, 0)) for i in range(host.count(k))]
    prob = LinfLP(rows, rhs, len(keep), ctr)
    if not integral:
        res = prob.solve()
        if res.status != "optimal":
            raise Infeasible("right-hand side is not a coboundary")
        vals = {keep[j]: v for j, v in enumerate(res.x) if v}
        return vals, {"method": "simplex", "pivots": res.pivots, "real_optimum": res.value}
    if len(keep) > ORACLE_VAR_LIMIT:
        raise SizeLimit(f"{len(keep)} variables exceed the oracle limit")
    res = prob.solve()
    if res.status != "optimal":
        raise Infeasible("right-hand side is not a coboundary")
    x, val, stats = integer_linf(prob, box=box)
    if x is None:
        raise BoxTooSmall(f"no integral filler with entries bounded by {box}")
    vals = {keep[j]: Fraction(v) for j, v in enumerate(x) if v}
    return vals, {"method": "branch-and-bound", "real_optimum": res.value, **stats}


def _route(w, removed, center, integral, method):
    host, k = w.host, w.degree
    if method in ("auto", "network"):
        if k - 1 == 0 and not center:
            return _degree0(w, removed, center, integral)
        if k == host.dim:
            try:
                fs = network.FlowStructure(host, k - 1, removed)
            except network.NotNetwork:
                if method == "network":
                    raise
            else:
                try:
                    s, vals, trace = fs.solve(w.values, center, integral)
                except network.NetworkInfeasible as exc:
                    raise Infeasible(str(exc)) from None
                return vals, trace
        if k == 2 and not removed and hasattr(host, "simplices"):
            a0, unique = network.gauge_fixed_solution(host, w)
            if a0 is None:
                raise Infeasible("2-cochain is not a coboundary")
            if unique and (not integral or all(v.denominator == 1 for v in a0.values())):
                s, vals, trace = network.potential_linf(host, a0, center, integral)
                return vals, trace
        if method == "network":
            raise network.NotNetwork("no network structure for this instance")
    return _generic(w, removed, center, integral)


def fill_linf(w: Cochain, ring="Q", boundary_zero_cells=None, center=None, method="auto") -> FillResult:
    """Minimise ``||a - center||_inf`` over fillers with ``delta a = w``.

    ``ring`` selects rational or integral fillers; ``boundary_zero_cells``
    forces the filler to vanish on the listed (k-1)-cells.  ``method`` is
    ``auto`` (structured solver when applicable), ``network`` or ``simplex``.
    """
    if w.degree < 1:
        raise ValueError("only cochains of degree >= 1 can be filled")
    removed = set(boundary_zero_cells or ())
    center = {c: Fraction(v) for c, v in (center or {}).items() if v}
    integral = ring == "Z"
    if integral and not w.is_integral():
        raise Infeasible("an integral filler needs an integral right-hand side")
    host = w.host
    if w.is_zero() and not center:
        a = Cochain(host, w.degree - 1, {}, ring)
        return FillResult(a, Fraction(0), {"method": "zero"})
    if method == "simplex":
        vals, trace = _generic(w, removed, center, integral)
    else:
        vals, trace = _route(w, removed, center, integral, method)
    a = Cochain(host, w.degree - 1, vals, ring)
    _check_solution(w, a)
    if any(a[c] for c in removed):
        raise AssertionError("internal error: filler is nonzero on a constrained cell")
    cells = set(a.values) | set(center)
    norm = max((abs(a[c] - center.get(c, 0)) for c in cells), default=Fraction(0))
    trace.setdefault("achieved", norm)
    k_round = 0
    if integral and "real_optimum" in trace:
        k_round = int(norm - ceil(trace["real_optimum"]))
    return FillResult(a, norm, trace, True, max(k_round, 0))


def fill_linf_real(w: Cochain, boundary_zero_cells=None, method="auto") -> FillResult:
    """Rational filler of minimal l-infinity norm; raises Infeasible if none exists."""
    return fill_linf(w.as_ring("Q"), "Q", boundary_zero_cells, method=method)


def fill_linf_integral(w: Cochain, method="auto") -> FillResult:
    """Integral filler of minimal l-infinity norm.

    On structured instances the integral optimum equals the ceiling of the
    real optimum (total unimodularity), so ``k_round`` is 0.  Otherwise the
    real solution is rounded and the integral residual is repaired by branch
    and bound with a box growing from 1.
    """
    if method in ("auto", "network"):
        try:
            return fill_linf(w, "Z", method="network")
        except network.NotNetwork:
            if method == "network":
                raise
        except SizeLimit:
            pass
    return _round_and_repair(w)


def _round_and_repair(w):
    host = w.host
    real = fill_linf_real(w, method="simplex")
    a_r = Cochain(host, w.degree - 1, {c: round(v) for c, v in real.filler.values.items()}, "Z")
    residual = w.as_ring("Z") - coboundary(a_r)
    box = 1
    while True:
        try:
            fix = ilp_fill_oracle(residual, box) if not residual.is_zero() else None
            break
        except BoxTooSmall:
            box *= 2
            if box > 64:
                raise Infeasible("residual could not be repaired")
    a = a_r if fix is None else a_r + fix.filler
    _check_solution(w, a)
    norm = a.norm()
    trace = {"method": "round-and-repair", "real_optimum": real.norm, "repair_box": box}
    return FillResult(a, norm, trace, False, max(int(norm - ceil(real.norm)), 0))


def ilp_fill_oracle(w: Cochain, box_bound: int) -> FillResult:
    """Exact integral l-infinity optimum within ``|a| <= box_bound`` by branch and bound."""
    if box_bound < 1:
        raise ValueError("box bound must be at least 1")
    host = w.host
    nvars = host.count(w.degree - 1)
    if nvars > ORACLE_VAR_LIMIT:
        raise SizeLimit(f"{nvars} variables exceed the oracle limit")
    if not w.is_integral():
        raise Infeasible("integral filler needs integral data")
    if w.is_zero():
        return FillResult(Cochain(host, w.degree - 1, {}, "Z"), Fraction(0), {"method": "zero"})
    vals, trace = _generic(w.as_ring("Z"), set(), {}, True, box=box_bound)
    a = Cochain(host, w.degree - 1, vals, "Z")
    _check_solution(w, a)
    return FillResult(a, a.norm(), trace, True, 0)


# -- nearest integral cocycles -------------------------------------------------

def _is_coboundary(c):
    host, k = c.host, c.degree
    if k == 0:
        return c.is_zero()
    keep, rows = _rows_for(host, k, set())
    ech = SparseEchelon()
    for i, row in enumerate(rows):
        if not ech.add(row, c.values.get(i, 0)):
            return False
    return True


def nearest_integral_cocycle(w: Cochain, same_class=False, method="auto") -> CocycleApprox:
    """Integral cocycle closest to the rational cocycle ``w`` in the l-infinity norm.

    By default any integral cocycle is admissible.  With ``same_class`` the
    result must be cohomologous to ``w``; NoIntegralClass is raised when the
    class of ``w`` contains no integral cocycle.
    """
    host, k = w.host, w.degree
    if not coboundary(w).is_zero():
        raise ValueError("input is not a cocycle")
    if w.is_integral():
        return CocycleApprox(w.as_ring("Z"), Fraction(0), True, "identity")
    if same_class:
        return _nearest_same_class(w)
    vals, how = None, None
    if k == 0:
        vals = _nearest_degree0(w)
        how = "constants"
    elif k == host.dim:
        vals = {c: _round_half_down(v) for c, v in w.values.items()}
        how = "rounding"
    elif method != "simplex" and k == 1 and hasattr(host, "simplices"):
        unique = host.dim >= 2 and network.gauge_fixed_solution(host, Cochain(host, 2, {}, "Q"))[1]
        if unique:
            # integral cocycles are coboundaries of integral potentials
            s, v, _ = network.potential_linf(host, {}, w.values, integral=True)
            vals, how = v, "potentials"
    if vals is None and method != "simplex" and k == host.dim - 1:
        try:
            fs = network.FlowStructure(host, k)
        except network.NotNetwork:
            fs = None
        if fs is not None:
            s, v, _ = fs.solve({}, w.values, integral=True)
            vals, how = v, "flow"
    optimal = True
    if vals is None:
        keep, rows = _rows_for(host, k + 1, set())
        prob = LinfLP(rows, [0] * len(rows), len(keep), [Fraction(w.values.get(c, 0)) for c in keep])
        try:
            x, val, stats = integer_linf(prob)
        except BranchAndBoundLimit:
            raise SizeLimit("branch and bound limit reached") from None
        vals = {keep[j]: v for j, v in enumerate(x) if v}
        how = "branch-and-bound"
    z = Cochain(host, k, {c: int(v) for c, v in vals.items() if v}, "Z")
    if not coboundary(z).is_zero():
        raise AssertionError("internal error: result is not a cocycle")
    dist = (w - z.as_ring("Q")).norm()
    return CocycleApprox(z, dist, optimal, how)


def _round_half_down(v):
    f = floor(v)
    return f if v - f <= Fraction(1, 2) else f + 1


def _nearest_degree0(w):
    host = w.host
    parent = list(range(host.count(0)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    if host.dim >= 1:
        for u, v in host.simplices[1]:
            parent[find(u)] = find(v)
    comp = {}
    for v in range(host.count(0)):
        comp.setdefault(find(v), []).append(v)
    out = {}
    for verts in comp.values():
        vals = [Fraction(w.values.get(v, 0)) for v in verts]
        mid = (max(vals) + min(vals)) / 2
        best = min((floor(mid), ceil(mid)), key=lambda m: (max(abs(x - m) for x in vals), m))
        for v in verts:
            if best:
                out[v] = best
    return out


def _nearest_same_class(w):
    """Branch and bound over integral cocycles z with <z - w, c> = 0 on every cycle c."""
    host, k = w.host, w.degree
    if k == 0:
        # degree-0 classes are the cocycles themselves
        raise NoIntegralClass("a non-integral locally constant cochain has no integral representative")
    rows, rhs = [], []
    if k < host.dim:
        _, rows = _rows_for(host, k + 1, set())
        rhs = [Fraction(0)] * len(rows)
    for cyc in _cycle_basis(host, k):
        rows.append(cyc)
        rhs.append(sum((v * Fraction(w.values.get(c, 0)) for c, v in cyc.items()), Fraction(0)))
    n = host.count(k)
    prob = LinfLP(rows, rhs, n, [Fraction(w.values.get(c, 0)) for c in range(n)])
    try:
        x, val, _ = integer_linf(prob)
    except BranchAndBoundLimit:
        raise SizeLimit("branch and bound limit reached") from None
    if x is None:
        raise NoIntegralClass("class of the cocycle is not integral")
    z = Cochain(host, k, {c: v for c, v in enumerate(x) if v}, "Z")
    return CocycleApprox(z, (w - z.as_ring("Q")).norm(), True, "branch-and-bound")


def _cycle_basis(host, k):
    """A basis of the rational k-cycles, as sparse dicts over k-cells."""
    rows = {}
    for c, row in enumerate(host.boundary(k)):
        for f, s in row:
            rows.setdefault(f, {})[c] = s
    ech = SparseEchelon()
    for f in sorted(rows):
        ech.add(rows[f], 0)
    pivots = set(ech.order)
    basis = []
    for fcol in range(host.count(k)):
        if fcol in pivots:
            continue
        x = {fcol: Fraction(1)}
        for col in reversed(ech.order):
            prow, _ = ech.pivots[col]
            val = -sum((v * x.get(c, 0) for c, v in prow.items() if c != col), Fraction(0))
            if val:
                x[col] = val
        basis.append(x)
    return basis
