"""Oriented simplicial complexes, edgewise subdivision and prism complexes.

Every cell is oriented by the increasing order of its vertices (slice cells
of a product inherit this, prism cells are ``simplex x interval`` in that
order).  Top cells additionally carry a sign relative to a coherent global
orientation when one exists; it is used only to form fundamental cycles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

__all__ = [
    "SimplicialComplex",
    "ProductComplex",
    "Cochain",
    "boundary_sphere_complex",
    "standard_simplex",
    "cycle_graph",
    "edgewise_subdivide",
    "product_with_interval",
    "coboundary",
    "time_slice",
    "include_slice",
]


def _det(rows):
    """Exact determinant by cofactor expansion (tiny matrices only)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _det(minor)
    return total


class SimplicialComplex:
    """Finite simplicial complex with sorted vertex tuples per dimension.

    Parameters
    ----------
    simplices : list of list of tuple
        ``simplices[k]`` lists the k-simplices as strictly increasing vertex
        tuples.  Must be closed under taking faces.
    orientation : list of int, optional
        Sign of each top simplex relative to a coherent orientation.
    meta : dict, optional
        Free-form metadata (``base``, ``L``, ``name``...).
    """

    kind = "simplicial"

    def __init__(self, simplices, orientation=None, meta=None):
        self.simplices = [list(map(tuple, level)) for level in simplices]
        while self.simplices and not self.simplices[-1]:
            self.simplices.pop()
        self.dim = len(self.simplices) - 1
        self.index = [{s: i for i, s in enumerate(level)} for level in self.simplices]
        self.n_vertices = len(self.simplices[0]) if self.simplices else 0
        self.orientation = list(orientation) if orientation is not None else None
        self.meta = dict(meta or {})
        self._bd = {}
        self._cof = {}
        self._validate()

    # -- construction helpers -------------------------------------------------
    @classmethod
    def from_maximal(cls, maximal, orient=True, meta=None):
        """Close a list of maximal simplices under faces."""
        tops = sorted({tuple(sorted(s)) for s in maximal})
        dim = max(len(s) for s in tops) - 1
        levels = [set() for _ in range(dim + 1)]
        for s in tops:
            for k in range(len(s)):
                levels[k].update(itertools.combinations(s, k + 1))
        simplices = [sorted(level) for level in levels]
        X = cls(simplices, meta=meta)
        if orient:
            X.orientation = X.coherent_orientation()
        return X

    def _validate(self):
        for k in range(1, self.dim + 1):
            lower = self.index[k - 1]
            for s in self.simplices[k]:
                if any(a >= b for a, b in zip(s, s[1:])):
                    raise ValueError(f"simplex {s} is not strictly increasing")
                for j in range(len(s)):
                    if s[:j] + s[j + 1:] not in lower:
                        raise ValueError(f"face of {s} missing")

    # -- combinatorics --------------------------------------------------------
    def count(self, k):
        return len(self.simplices[k]) if 0 <= k <= self.dim else 0

    def cell(self, k, i):
        return self.simplices[k][i]

    def boundary(self, k):
        """Rows ``[(face_index, sign), ...]`` for every k-simplex."""
        if k not in self._bd:
            rows = []
            if k >= 1:
                lower = self.index[k - 1]
                for s in self.simplices[k]:
                    rows.append([(lower[s[:j] + s[j + 1:]], (-1) ** j) for j in range(len(s))])
            else:
                rows = [[] for _ in self.simplices[0]]
            self._bd[k] = rows
        return self._bd[k]

    def cofaces(self, k):
        """For every k-simplex, ``[(coface_index, sign), ...]`` in dimension k+1."""
        if k not in self._cof:
            cof = [[] for _ in range(self.count(k))]
            if k < self.dim:
                for i, row in enumerate(self.boundary(k + 1)):
                    for j, sgn in row:
                        cof[j].append((i, sgn))
            self._cof[k] = cof
        return self._cof[k]

    def coherent_orientation(self):
        """Signs making the top simplices a cycle mod boundary, or None."""
        n = self.dim
        if n < 1:
            return [1] * self.count(n)
        signs = [0] * self.count(n)
        cof = self.cofaces(n - 1)
        bd = self.boundary(n)
        for start in range(len(signs)):
            if signs[start]:
                continue
            signs[start] = 1
            stack = [start]
            while stack:
                s = stack.pop()
                for f, sg in bd[s]:
                    for t, tg in cof[f]:
                        if t == s:
                            continue
                        want = -signs[s] * sg * tg
                        if signs[t] == 0:
                            signs[t] = want
                            stack.append(t)
                        elif signs[t] != want:
                            return None
        return signs

    def fundamental_cycle(self):
        if self.orientation is None:
            raise ValueError("complex carries no coherent orientation")
        return list(self.orientation)

    def euler_characteristic(self):
        return sum((-1) ** k * self.count(k) for k in range(self.dim + 1))

    def facet_positions(self, k):
        """Local vertex positions of the k-faces of a top simplex."""
        return list(itertools.combinations(range(self.dim + 1), k + 1))

    # -- chart support for forms ---------------------------------------------
    @property
    def chart_dim(self):
        return self.dim

    def top_cells(self):
        return range(self.count(self.dim))

    def local_faces(self, top, k):
        """Yield ``(cell_index, local_positions)`` for the k-faces of a top simplex."""
        s = self.simplices[self.dim][top]
        idx = self.index[k]
        for pos in itertools.combinations(range(len(s)), k + 1):
            yield idx[tuple(s[p] for p in pos)], pos

    def containing_top(self, k, i):
        """One top simplex containing the k-simplex ``i`` and the local positions."""
        s = self.simplices[k][i]
        j, cur = i, k
        while cur < self.dim:
            j = self.cofaces(cur)[j][0][0]
            cur += 1
        top = self.simplices[self.dim][j]
        return j, tuple(top.index(v) for v in s)

    def same_as(self, other):
        return other is self or (
            isinstance(other, SimplicialComplex) and other.simplices == self.simplices
        )

    def to_json(self):
        return {
            "dim": self.dim,
            "simplices": {str(k): [list(s) for s in lvl] for k, lvl in enumerate(self.simplices)},
            "orientation": self.orientation,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data):
        dim = int(data["dim"])
        simp = data["simplices"]
        levels = [[tuple(s) for s in simp[str(k)]] for k in range(dim + 1)]
        X = cls(levels, orientation=data.get("orientation"), meta=data.get("meta"))
        if X.orientation is None:
            X.orientation = X.coherent_orientation()
        return X

    def __repr__(self):
        counts = ", ".join(str(self.count(k)) for k in range(self.dim + 1))
        return f"SimplicialComplex(dim={self.dim}, counts=[{counts}], meta={self.meta})"


def boundary_sphere_complex(n):
    """The boundary of the standard (n+1)-simplex, a model of S^n."""
    if n < 1:
        raise ValueError("sphere dimension must be at least 1")
    verts = range(n + 2)
    tops = list(itertools.combinations(verts, n + 1))
    X = SimplicialComplex.from_maximal(tops, meta={"name": f"S{n}", "L": 1})
    # align with the boundary orientation of [0..n+1]: facet without j has sign (-1)^j
    missing = [next(v for v in verts if v not in s) for s in X.simplices[n]]
    want = [(-1) ** j for j in missing]
    if X.orientation[0] != want[0]:
        X.orientation = [-s for s in X.orientation]
    return X


def standard_simplex(n):
    return SimplicialComplex.from_maximal([tuple(range(n + 1))], meta={"name": f"D{n}", "L": 1})


def cycle_graph(m):
    """Circle with m vertices; edges listed along the cycle, closing edge last."""
    if m < 3:
        raise ValueError("a simplicial circle needs at least 3 vertices")
    edges = [(i, i + 1) for i in range(m - 1)] + [(0, m - 1)]
    X = SimplicialComplex([[(i,) for i in range(m)], edges], meta={"name": f"C{m}"})
    X.orientation = X.coherent_orientation()
    return X


def _kuhn_simplices(n, L):
    """Top simplices of the edgewise subdivision of Delta^n as barycentric integer points."""
    out = []
    for base in itertools.product(range(L), repeat=n):
        for perm in itertools.permutations(range(n)):
            ys = [list(base)]
            cur = list(base)
            for p in perm:
                cur = cur[:]
                cur[p] += 1
                ys.append(cur)
            ok = all(
                L >= y[0] and all(y[j] >= y[j + 1] for j in range(n - 1)) and y[-1] >= 0
                for y in ys
            )
            if not ok:
                continue
            pts = []
            for y in ys:
                a = [L - y[0]] + [y[j] - y[j + 1] for j in range(n - 1)] + [y[-1]]
                pts.append(tuple(a))
            out.append(pts)
    return out


def edgewise_subdivide(X, L):
    """L-fold edgewise subdivision; every n-simplex becomes L^n simplices."""
    if L < 1:
        raise ValueError("L must be a positive integer")
    n = X.dim
    tops = X.simplices[n]
    keys = set()
    pieces = []  # (parent index, [vertex keys], [barycentric points])
    pattern = _kuhn_simplices(n, L)
    for ti, s in enumerate(tops):
        for pts in pattern:
            vkeys = [tuple((s[i], a[i]) for i in range(n + 1) if a[i] > 0) for a in pts]
            keys.update(vkeys)
            pieces.append((ti, vkeys, pts))
    order = sorted(keys, key=lambda k: (len(k), k))
    vid = {k: i for i, k in enumerate(order)}
    maximal = []
    signs = {}
    for ti, vkeys, pts in pieces:
        ids = [vid[k] for k in vkeys]
        perm = sorted(range(n + 1), key=lambda j: ids[j])
        sorted_pts = [pts[j] for j in perm]
        rows = [[p[c] - sorted_pts[0][c] for c in range(1, n + 1)] for p in sorted_pts[1:]]
        d = _det(rows)
        parent_sign = X.orientation[ti] if X.orientation else 1
        simplex = tuple(sorted(ids))
        maximal.append(simplex)
        signs[simplex] = parent_sign * (1 if d > 0 else -1)
    meta = dict(X.meta)
    meta.update({"base": X.meta.get("name", "X"), "L": L * X.meta.get("L", 1)})
    Y = SimplicialComplex.from_maximal(maximal, orient=False, meta=meta)
    Y.vertex_keys = order
    if X.orientation is not None:
        Y.orientation = [signs[s] for s in Y.simplices[n]]
    return Y


class ProductComplex:
    """Product cell structure ``X x [0, 1]`` with the interval cut into T pieces.

    k-cells are slices ``(sigma_k, node i)`` (indices ``i * |X_k| + sigma``)
    followed by prisms ``(tau_{k-1}, interval i)``.
    """

    kind = "product"

    def __init__(self, base, T):
        if T < 1:
            raise ValueError("T must be a positive integer")
        self.base = base
        self.T = T
        self.dim = base.dim + 1
        self.meta = {"base": base.meta, "T": T}
        self._bd = {}
        self._cof = {}

    # -- indexing -------------------------------------------------------------
    def n_slices(self, k):
        return (self.T + 1) * self.base.count(k)

    def count(self, k):
        if k < 0 or k > self.dim:
            return 0
        return self.n_slices(k) + self.T * self.base.count(k - 1)

    def slice_index(self, k, sigma, node):
        return node * self.base.count(k) + sigma

    def prism_index(self, k, tau, interval):
        return self.n_slices(k) + interval * self.base.count(k - 1) + tau

    def cell(self, k, i):
        """``('slice', sigma, node)`` or ``('prism', tau, interval)``."""
        ns = self.n_slices(k)
        if i < ns:
            m = self.base.count(k)
            return ("slice", i % m, i // m)
        j = i - ns
        m = self.base.count(k - 1)
        return ("prism", j % m, j // m)

    def boundary(self, k):
        if k not in self._bd:
            rows = []
            if k >= 1:
                for i in range(self.count(k)):
                    kind, s, t = self.cell(k, i)
                    if kind == "slice":
                        rows.append([(self.slice_index(k - 1, f, t), sg)
                                     for f, sg in self.base.boundary(k)[s]])
                    else:
                        row = [(self.prism_index(k - 1, f, t), sg)
                               for f, sg in self.base.boundary(k - 1)[s]] if k >= 2 else []
                        e = (-1) ** (k - 1)
                        row.append((self.slice_index(k - 1, s, t + 1), e))
                        row.append((self.slice_index(k - 1, s, t), -e))
                        rows.append(row)
            else:
                rows = [[] for _ in range(self.count(0))]
            self._bd[k] = rows
        return self._bd[k]

    def cofaces(self, k):
        if k not in self._cof:
            cof = [[] for _ in range(self.count(k))]
            if k < self.dim:
                for i, row in enumerate(self.boundary(k + 1)):
                    for j, sgn in row:
                        cof[j].append((i, sgn))
            self._cof[k] = cof
        return self._cof[k]

    @property
    def orientation(self):
        # top cells are all prisms, so this lists T copies of the base signs
        if self.base.orientation is None:
            return None
        return list(self.base.orientation) * self.T

    def top_orientation(self, top):
        """Orientation sign of top cell ``top`` (a prism index in dimension dim)."""
        _, s, _ = self.cell(self.dim, top)
        return self.base.orientation[s] if self.base.orientation else 1

    def end_slice_cells(self, k):
        m = self.base.count(k)
        return [self.slice_index(k, s, 0) for s in range(m)] + [
            self.slice_index(k, s, self.T) for s in range(m)
        ]

    # -- chart support for forms ---------------------------------------------
    @property
    def chart_dim(self):
        return self.base.dim + 1

    def top_cells(self):
        n = self.dim
        return range(self.n_slices(n), self.count(n))

    def same_as(self, other):
        return other is self or (
            isinstance(other, ProductComplex) and other.T == self.T and self.base.same_as(other.base)
        )

    def containing_top(self, k, i):
        """Top prism containing cell ``(k, i)`` plus a face descriptor for charts.

        The descriptor is ``(positions, time)`` where ``time`` is ``0``/``1`` for a
        slice at the start/end node of the prism and ``None`` for a prism face.
        """
        kind, s, t = self.cell(k, i)
        dk = k if kind == "slice" else k - 1
        top, pos = self.base.containing_top(dk, s)
        if kind == "slice":
            interval, time = (t, 0) if t < self.T else (t - 1, 1)
            return self.prism_index(self.dim, top, interval), (pos, time)
        return self.prism_index(self.dim, top, t), (pos, None)

    def local_faces(self, top, k):
        """Yield ``(cell_index, (positions, time))`` for the k-cells of a top prism."""
        _, s, t = self.cell(self.dim, top)
        n = self.base.dim
        for cell, pos in self.base.local_faces(s, k) if k <= n else []:
            yield self.slice_index(k, cell, t), (pos, 0)
            yield self.slice_index(k, cell, t + 1), (pos, 1)
        if k >= 1:
            for cell, pos in self.base.local_faces(s, k - 1):
                yield self.prism_index(k, cell, t), (pos, None)

    def __repr__(self):
        return f"ProductComplex(base={self.base!r}, T={self.T})"


def product_with_interval(X, T):
    return ProductComplex(X, T)


# -- cochains -------------------------------------------------------------------

def _as_number(v, ring):
    if ring == "Z":
        f = Fraction(v)
        if f.denominator != 1:
            raise ValueError(f"non-integral value {v} in an integral cochain")
        return int(f)
    return Fraction(v)


@dataclass
class Cochain:
    """Sparse cochain on a SimplicialComplex or ProductComplex.

    ``values`` maps cell index to an exact number; zeros are not stored.
    """

    host: object
    degree: int
    values: dict = field(default_factory=dict)
    ring: str = "Q"

    def __post_init__(self):
        if self.ring not in ("Z", "Q"):
            raise ValueError("ring must be 'Z' or 'Q'")
        n = self.host.count(self.degree)
        clean = {}
        for k, v in self.values.items():
            k = int(k)
            if not 0 <= k < n:
                raise IndexError(f"cell {k} is not a {self.degree}-cell of the host")
            v = _as_number(v, self.ring)
            if v != 0:
                clean[k] = v
        self.values = clean

    @classmethod
    def zero(cls, host, degree, ring="Q"):
        return cls(host, degree, {}, ring)

    @classmethod
    def from_list(cls, host, degree, seq, ring="Q"):
        return cls(host, degree, {i: v for i, v in enumerate(seq) if v != 0}, ring)

    def __getitem__(self, i):
        return self.values.get(i, 0)

    def to_list(self):
        return [self.values.get(i, 0) for i in range(self.host.count(self.degree))]

    def norm(self):
        """l-infinity norm: the largest absolute value on a cell."""
        return max((abs(v) for v in self.values.values()), default=Fraction(0))

    def is_zero(self):
        return not self.values

    def is_integral(self):
        return all(Fraction(v).denominator == 1 for v in self.values.values())

    def as_ring(self, ring):
        return Cochain(self.host, self.degree, dict(self.values), ring)

    def _check(self, other):
        if not self.host is other.host and not self.host.same_as(other.host):
            raise ValueError("cochains live on different complexes")
        if self.degree != other.degree:
            raise ValueError("degree mismatch")

    def _ring_with(self, other):
        return "Z" if self.ring == "Z" and other.ring == "Z" else "Q"

    def __add__(self, other):
        self._check(other)
        vals = dict(self.values)
        for k, v in other.values.items():
            vals[k] = vals.get(k, 0) + v
        return Cochain(self.host, self.degree, vals, self._ring_with(other))

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        ring = self.ring if c.denominator == 1 else "Q"
        return Cochain(self.host, self.degree, {k: v * c for k, v in self.values.items()}, ring)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.degree == other.degree and self.values == other.values and (
            self.host is other.host or self.host.same_as(other.host)
        )

    def to_json(self):
        return {
            "degree": self.degree,
            "ring": self.ring,
            "values": [[k, _fmt(v)] for k, v in sorted(self.values.items())],
        }

    @classmethod
    def from_json(cls, host, data):
        vals = {int(k): Fraction(v) for k, v in data["values"]}
        return cls(host, int(data["degree"]), vals, data.get("ring", "Q"))


def _fmt(v):
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def coboundary(c):
    """Simplicial/cellular coboundary; zero beyond the top dimension."""
    host, k = c.host, c.degree
    if k >= host.dim:
        return Cochain(host, k + 1, {}, c.ring) if k + 1 <= host.dim else _Overflow(host, k + 1, c.ring)
    cof = host.cofaces(k)
    out = {}
    for i, v in c.values.items():
        for j, sg in cof[i]:
            out[j] = out.get(j, 0) + sg * v
    return Cochain(host, k + 1, out, c.ring)


class _Overflow(Cochain):
    """Zero cochain in a degree the host does not have."""

    def __init__(self, host, degree, ring):
        self.host, self.degree, self.values, self.ring = host, degree, {}, ring


def time_slice(c, mode="restrict", node=0):
    """Restrict a product cochain to a time node, or aggregate it over prisms.

    ``restrict`` keeps degree and returns the slice cochain at ``node``;
    ``aggregate`` returns ``q -> sum_i c(q x interval_i)`` on (k-1)-cells.
    """
    P = c.host
    if not isinstance(P, ProductComplex):
        raise TypeError("time_slice needs a cochain on a ProductComplex")
    k = c.degree
    X = P.base
    if mode == "restrict":
        if not 0 <= node <= P.T:
            raise IndexError(f"node {node} outside 0..{P.T}")
        m = X.count(k)
        lo = node * m
        return Cochain(X, k, {i - lo: v for i, v in c.values.items() if lo <= i < lo + m}, c.ring)
    if mode == "aggregate":
        out = {}
        ns = P.n_slices(k)
        m = X.count(k - 1)
        for i, v in c.values.items():
            if i >= ns:
                q = (i - ns) % m
                out[q] = out.get(q, 0) + v
        return Cochain(X, k - 1, out, c.ring)
    raise ValueError(f"unknown mode {mode!r}")


def include_slice(c, P, node):
    """Place a cochain on X as a slice cochain of P at ``node``."""
    m = P.base.count(c.degree)
    return Cochain(P, c.degree, {node * m + i: v for i, v in c.values.items()}, c.ring)


def expected_product_count(X, T, k):
    return (T + 1) * X.count(k) + T * X.count(k - 1)


def sphere_counts(n, k):
    return comb(n + 2, k + 1)
