"""Network-structured l-infinity problems.

Two structures cover the fills used in the pipeline:

* degree-1 fillers on complexes with vanishing first cohomology: every filler
  is ``a0 + delta g``, so the problem becomes a system of difference
  constraints on vertex potentials g (a max-mean-cycle problem);
* fillers of top-degree cochains on pseudomanifolds: every filler cell meets at
  most two top cells, so ``delta x = r`` is a flow conservation law.

Both are totally unimodular, which makes the integral optimum the ceiling of
the real one (for integral data) and lets us compute it by rounding bounds.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import ceil, floor, lcm

import networkx as nx
from networkx.algorithms.flow import preflow_push

from .linalg import SparseEchelon


class NotNetwork(Exception):
    """The instance lacks the structure required by a network solver."""


class NetworkInfeasible(Exception):
    pass


# -- potentials (degree-1 fillers) ---------------------------------------------

def spanning_forest(host):
    """Edges of a BFS spanning forest of the 1-skeleton (edge indices)."""
    n = host.count(0)
    adj = [[] for _ in range(n)]
    for e, (u, v) in enumerate(host.simplices[1]):
        adj[u].append((v, e))
        adj[v].append((u, e))
    seen = [False] * n
    tree = []
    comp = [-1] * n
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        comp[root] = root
        q = deque([root])
        while q:
            u = q.popleft()
            for v, e in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp[v] = root
                    tree.append(e)
                    q.append(v)
    return tree, comp


def gauge_fixed_solution(host, w):
    """Unique 1-cochain vanishing on a spanning forest with ``delta a = w``.

    Returns ``(a0, unique)``; ``a0`` is None when w is not a coboundary and
    ``unique`` reports whether first cohomology vanishes (the gauge-fixed
    system has full column rank).
    """
    tree, _ = spanning_forest(host)
    tree = set(tree)
    free = [e for e in range(host.count(1)) if e not in tree]
    col = {e: j for j, e in enumerate(free)}
    ech = SparseEchelon()
    ok = True
    for t, row in enumerate(host.boundary(2)):
        r = {col[e]: s for e, s in row if e in col}
        if not ech.add(r, w.values.get(t, 0)):
            ok = False
            break
    if not ok:
        return None, None
    sol = ech.solve()
    a0 = {free[j]: v for j, v in sol.items() if v}
    return a0, ech.rank == len(free)


def _karp_max_mean(n, arcs):
    """Maximum cycle mean of a digraph given as ``[(u, v, weight)]`` (exact).

    Karp's algorithm applied to negated weights with a virtual source.
    """
    NEG = None
    D = [[NEG] * n for _ in range(n + 1)]
    for v in range(n):
        D[0][v] = Fraction(0)
    for k in range(1, n + 1):
        prev, cur = D[k - 1], D[k]
        for u, v, wgt in arcs:
            pu = prev[u]
            if pu is not None:
                val = pu + wgt
                if cur[v] is None or val > cur[v]:
                    cur[v] = val
    best = None
    for v in range(n):
        if D[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if D[k][v] is None:
                continue
            r = (D[n][v] - D[k][v]) / (n - k)
            if worst is None or r < worst:
                worst = r
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def _potential_arcs(host, a0, center, bound_fn):
    """Difference constraints ``g_v - g_u <= weight`` for |a0 + delta g - center| <= s."""
    arcs = []
    for e, (i, j) in enumerate(host.simplices[1]):
        val = Fraction(a0.get(e, 0)) - Fraction(center.get(e, 0))
        up, down = bound_fn(e, val)
        # a_e = val + g_j - g_i <= s  ->  g_j - g_i <= s - val
        arcs.append((i, j, up))
        # -(val + g_j - g_i) <= s  ->  g_i - g_j <= s + val
        arcs.append((j, i, down))
    return arcs


def _solve_potentials(n, arcs):
    """Feasible potentials for difference constraints, or None on a negative cycle."""
    G = nx.DiGraph()
    G.add_nodes_from(range(n + 1))
    for u, v, wgt in arcs:
        if G.has_edge(u, v):
            if wgt < G[u][v]["weight"]:
                G[u][v]["weight"] = wgt
        else:
            G.add_edge(u, v, weight=wgt)
    src = n
    for v in range(n):
        G.add_edge(src, v, weight=0)
    try:
        dist = nx.single_source_bellman_ford_path_length(G, src)
    except nx.NetworkXUnbounded:
        return None
    return [dist[v] for v in range(n)]


def potential_linf(host, a0, center=None, integral=False):
    """Minimise ``max |a0 + delta g - center|`` over potentials g.

    Returns ``(s, values)`` with ``values`` the optimal 1-cochain as a dict.
    With ``integral`` the potentials are integers (``a0`` must be integral
    when center is absent); the optimum is found by searching the finitely
    many candidate thresholds.
    """
    center = center or {}
    n = host.count(0)
    base = _potential_arcs(host, a0, center, lambda e, val: (-val, val))
    s_real = _karp_max_mean(n, [(u, v, -w) for u, v, w in base])
    s_real = max(s_real, Fraction(0)) if s_real is not None else Fraction(0)
    trace = {"method": "potentials", "real_optimum": s_real}
    if not integral:
        arcs = [(u, v, s_real + w) for u, v, w in base]
        g = _solve_potentials(n, arcs)
        s = s_real
    else:
        vals = {e: Fraction(a0.get(e, 0)) - Fraction(center.get(e, 0)) for e in range(host.count(1))}
        cands = {Fraction(ceil(s_real))}
        if any(v.denominator != 1 for v in vals.values()):
            cands = set()
            for v in vals.values():
                fr = v - floor(v)
                for base_c in (fr, 1 - fr):
                    k = ceil(s_real - base_c)
                    for m in (k, k + 1):
                        c = base_c + m
                        if s_real <= c < s_real + 1 and c >= 0:
                            cands.add(c)
            cands.add(Fraction(ceil(s_real)))
        cands = sorted(cands)
        g = None
        lo, hi = 0, len(cands) - 1
        best = None
        while lo <= hi:
            mid = (lo + hi) // 2
            s = cands[mid]
            arcs = [(i, j, floor(s - vals[e])) for e, (i, j) in enumerate(host.simplices[1])]
            arcs += [(j, i, floor(s + vals[e])) for e, (i, j) in enumerate(host.simplices[1])]
            gg = _solve_potentials(n, arcs)
            if gg is not None:
                best = (s, gg)
                hi = mid - 1
            else:
                lo = mid + 1
        if best is None:
            raise NetworkInfeasible("no integral potentials within the candidate range")
        s, g = best
        trace["candidates"] = len(cands)
    values = {}
    for e, (i, j) in enumerate(host.simplices[1]):
        v = Fraction(a0.get(e, 0)) + g[j] - g[i]
        if v:
            values[e] = v
    achieved = max((abs(v - Fraction(center.get(e, 0))) for e, v in values.items()), default=Fraction(0))
    achieved = max([achieved] + [abs(Fraction(c)) for e, c in center.items() if e not in values])
    trace["achieved"] = achieved
    return achieved, values, trace


# -- flows (fillers of top-degree cochains) ------------------------------------

class FlowStructure:
    """Flow network for ``delta x = r`` where r lives on top cells.

    Filler cells become arcs between the (at most two) top cells containing
    them; a cell with a single coface is an arc to a ground node.  Cells in
    ``removed`` are forced to zero and do not appear.
    """

    def __init__(self, host, k, removed=()):
        self.host = host
        self.k = k
        self.removed = set(removed)
        top = k + 1
        if top != host.dim:
            raise NotNetwork("network fills need a top-degree right-hand side")
        cof = host.cofaces(k)
        ntop = host.count(top)
        self.ground = ntop
        adj = [[] for _ in range(ntop)]
        for f in range(host.count(k)):
            if f in self.removed:
                continue
            cs = cof[f]
            if len(cs) > 2:
                raise NotNetwork("a filler cell meets more than two top cells")
            if len(cs) == 2:
                (p, sp), (q, sq) = cs
                adj[p].append((q, sp, sq))
                adj[q].append((p, sq, sp))
        eps = [0] * ntop
        for root in range(ntop):
            if eps[root]:
                continue
            eps[root] = 1
            stack = [root]
            while stack:
                p = stack.pop()
                for q, sp, sq in adj[p]:
                    want = -eps[p] * sp * sq
                    if eps[q] == 0:
                        eps[q] = want
                        stack.append(q)
                    elif eps[q] != want:
                        raise NotNetwork("no coherent orientation of the top cells")
        self.eps = eps
        arcs = []  # (cell, tail, head)
        for f in range(host.count(k)):
            if f in self.removed:
                continue
            cs = cof[f]
            if not cs:
                continue
            if len(cs) == 1:
                (p, sp), = cs
                if eps[p] * sp > 0:
                    arcs.append((f, p, self.ground))
                else:
                    arcs.append((f, self.ground, p))
            else:
                (p, sp), (q, sq) = cs
                if eps[p] * sp > 0:
                    arcs.append((f, p, q))
                else:
                    arcs.append((f, q, p))
        self.arcs = arcs
        self.free_cells = [f for f in range(host.count(k)) if f not in self.removed and not cof[f]]
        self.has_ground = any(self.ground in (t, h) for _, t, h in arcs)
        self.nnodes = ntop + 1

    def supplies(self, rhs):
        d = [Fraction(0)] * self.nnodes
        for p, v in rhs.items():
            d[p] = self.eps[p] * Fraction(v)
        d[self.ground] = -sum(d[: self.ground])
        return d

    def components_balanced(self, d):
        parent = list(range(self.nnodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, t, h in self.arcs:
            parent[find(t)] = find(h)
        tot = {}
        for v in range(self.nnodes):
            r = find(v)
            tot[r] = tot.get(r, 0) + d[v]
        return all(v == 0 for v in tot.values())

    def feasible(self, d, lo, hi):
        """Max-flow feasibility test; returns ``(flows or None, violating node set)``."""
        for f, _, _ in self.arcs:
            if lo[f] > hi[f]:
                return None, None
        dp = list(d)
        for f, t, h in self.arcs:
            dp[t] -= lo[f]
            dp[h] += lo[f]
        dens = [x.denominator for x in dp] + [Fraction(hi[f] - lo[f]).denominator for f, _, _ in self.arcs]
        D = lcm(*dens) if dens else 1
        G = nx.DiGraph()
        S, Tn = "s", "t"
        G.add_node(S)
        G.add_node(Tn)
        need = 0
        for v, x in enumerate(dp):
            xi = int(x * D)
            if xi > 0:
                G.add_edge(S, v, capacity=xi)
                need += xi
            elif xi < 0:
                G.add_edge(v, Tn, capacity=-xi)
        merged = {}
        for f, t, h in self.arcs:
            cap = int((hi[f] - lo[f]) * D)
            merged.setdefault((t, h), []).append((f, cap))
        for (t, h), items in merged.items():
            G.add_edge(t, h, capacity=sum(c for _, c in items))
        R = preflow_push(G, S, Tn)
        if R.graph["flow_value"] == need:
            flows = {}
            for (t, h), items in merged.items():
                # zero-capacity arcs are dropped from the residual network
                rem = R[t][h]["flow"] if h in R[t] else 0
                for f, cap in items:
                    take = min(cap, rem)
                    rem -= take
                    flows[f] = Fraction(lo[f]) + Fraction(take, D)
            return flows, None
        # source side of a minimum cut in the residual network
        seen = {S}
        q = deque([S])
        while q:
            u = q.popleft()
            for v, attr in R[u].items():
                if v not in seen and attr["capacity"] - attr["flow"] > 0:
                    seen.add(v)
                    q.append(v)
        return None, {v for v in seen if v != S}

    def cut_ratio(self, d, center, U):
        num = sum((d[v] for v in U), Fraction(0))
        width = 0
        for f, t, h in self.arcs:
            if t in U and h not in U:
                num -= center.get(f, 0)
                width += 1
            elif h in U and t not in U:
                num += center.get(f, 0)
                width += 1
        return num, width

    def solve(self, rhs, center=None, integral=False, max_iter=10000):
        """Minimise ``max |x - center|`` subject to ``delta x = rhs`` (exact)."""
        center = {f: Fraction(v) for f, v in (center or {}).items()}
        d = self.supplies(rhs)
        if not self.has_ground and d[self.ground] != 0:
            raise NetworkInfeasible("oriented total of the right-hand side is nonzero")
        if not self.components_balanced(d):
            raise NetworkInfeasible("right-hand side is not a coboundary")
        s = Fraction(0)
        iters = 0
        while True:
            iters += 1
            if iters > max_iter:
                raise RuntimeError("parametric flow did not converge")
            lo = {f: center.get(f, 0) - s for f, _, _ in self.arcs}
            hi = {f: center.get(f, 0) + s for f, _, _ in self.arcs}
            flows, U = self.feasible(d, lo, hi)
            if flows is not None:
                break
            num, width = self.cut_ratio(d, center, U)
            if width == 0:
                raise NetworkInfeasible("right-hand side is not a coboundary")
            new = num / width
            if new <= s:
                raise RuntimeError("parametric flow failed to make progress")
            s = new
        trace = {"method": "flow", "iterations": iters, "real_optimum": s}
        if integral:
            flows, s_int, n_c = self._integral(d, center, s)
            trace["candidates"] = n_c
            s = s_int
        values = {f: v for f, v in flows.items() if v}
        for f in self.free_cells:
            c = center.get(f, 0)
            if integral:
                c = Fraction(round(c))
            if c:
                values[f] = c
        achieved = max([abs(values.get(f, 0) - center.get(f, 0)) for f in set(values) | set(center)],
                       default=Fraction(0))
        trace["achieved"] = achieved
        return achieved, values, trace

    def _integral(self, d, center, s_real):
        if any(x.denominator != 1 for x in d):
            raise NetworkInfeasible("integral solve needs an integral right-hand side")
        cands = set()
        for f, _, _ in self.arcs:
            c = center.get(f, Fraction(0))
            fr = c - floor(c)
            for base in (fr, 1 - fr):
                k = ceil(s_real - base)
                for m in (k, k + 1):
                    x = base + m
                    if s_real <= x < s_real + 1 and x >= 0:
                        cands.add(x)
        cands.add(Fraction(ceil(s_real)))
        cands = sorted(c for c in cands if c >= s_real)
        best = None
        lo_i, hi_i = 0, len(cands) - 1
        while lo_i <= hi_i:
            mid = (lo_i + hi_i) // 2
            s = cands[mid]
            lo = {f: Fraction(ceil(center.get(f, 0) - s)) for f, _, _ in self.arcs}
            hi = {f: Fraction(floor(center.get(f, 0) + s)) for f, _, _ in self.arcs}
            flows, _ = self.feasible(d, lo, hi)
            if flows is not None:
                best = (flows, s)
                hi_i = mid - 1
            else:
                lo_i = mid + 1
        if best is None:
            raise NetworkInfeasible("no integral flow within one unit of the real optimum")
        return best[0], best[1], len(cands)
