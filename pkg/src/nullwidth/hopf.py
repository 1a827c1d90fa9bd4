"""Cochain-level Hopf invariants of degree cochains on 3-sphere models.

``hopf_cup`` realises the Hopf invariant of a 2-cocycle w as
``<a cup w, [S^3]>`` with ``delta a = w`` and the Alexander-Whitney cup product.
``hopf_linking_oracle`` recomputes the invariant of a genuine simplicial map
independently, as the linking number of two regular-value preimages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import Cochain, SimplicialComplex, boundary_sphere_complex, coboundary
from .network import gauge_fixed_solution

__all__ = [
    "cup_product",
    "hopf_cup",
    "hopf_form",
    "whitney_helicity",
    "tet_hopf_terms",
    "SimplicialMapData",
    "simplicial_hopf_map",
    "hopf_linking_oracle",
    "compose_degree",
]


def cup_product(a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney cup product with respect to the sorted vertex order."""
    if not (a.host is b.host or a.host.same_as(b.host)):
        raise ValueError("cochains live on different complexes")
    X = a.host
    p, q = a.degree, b.degree
    k = p + q
    if k > X.dim:
        return Cochain(X, k, {}, "Q")
    ia, ib = X.index[p], X.index[q]
    out = {}
    for i, s in enumerate(X.simplices[k]):
        va = a.values.get(ia[s[: p + 1]])
        if not va:
            continue
        vb = b.values.get(ib[s[p:]])
        if vb:
            out[i] = va * vb
    ring = "Z" if a.ring == "Z" and b.ring == "Z" else "Q"
    return Cochain(X, k, out, ring)


def _pair_fundamental(c: Cochain):
    X = c.host
    if X.orientation is None:
        raise ValueError("complex has no coherent orientation")
    return sum((X.orientation[i] * v for i, v in c.values.items()), Fraction(0))


def _some_filler(w: Cochain) -> Cochain:
    a0, _ = gauge_fixed_solution(w.host, w)
    if a0 is None:
        raise ValueError("2-cochain is not a coboundary")
    return Cochain(w.host, 1, a0, "Q")


def hopf_cup(w: Cochain, filler: Cochain | None = None):
    """``<a cup w, [S^3]>`` for any a with ``delta a = w`` (exact rational)."""
    X = w.host
    if X.dim != 3 or w.degree != 2:
        raise ValueError("hopf_cup needs a 2-cochain on a 3-dimensional complex")
    if not coboundary(w).is_zero():
        raise ValueError("input is not a cocycle")
    if w.is_zero():
        return Fraction(0)
    a = filler if filler is not None else _some_filler(w)
    if coboundary(a) != w:
        raise ValueError("filler does not satisfy delta a = w")
    return _pair_fundamental(cup_product(a, w))


def tet_hopf_terms(X: SimplicialComplex):
    """Per tetrahedron: orientation sign and the six edge indices in local order.

    Edge order is (01, 02, 03, 12, 13, 23) in the sorted vertex order.
    """
    e = X.index[1]
    out = []
    for t, s in enumerate(X.simplices[3]):
        v0, v1, v2, v3 = s
        out.append((X.orientation[t], (e[(v0, v1)], e[(v0, v2)], e[(v0, v3)],
                                         e[(v1, v2)], e[(v1, v3)], e[(v2, v3)])))
    return out


def local_cup(a01, a02, a03, a12, a13, a23):
    """(a cup delta a) on one tetrahedron."""
    return a01 * (a23 - a13 + a12)


def local_helicity(a01, a02, a03, a12, a13, a23):
    """Integral of W(a) ^ dW(a) over one positively oriented tetrahedron."""
    return Fraction(a01 * a23 - a02 * a13 + a03 * a12, 3)


def hopf_form(a: Cochain):
    """Both quadratic invariants of ``w = delta a``: (hopf_cup, whitney helicity)."""
    X = a.host
    q = Fraction(0)
    h = Fraction(0)
    get = a.values.get
    for sign, edges in tet_hopf_terms(X):
        vals = [get(e, 0) for e in edges]
        if any(vals):
            q += sign * local_cup(*vals)
            h += sign * local_helicity(*vals)
    return q, h


def whitney_helicity(w: Cochain, filler: Cochain | None = None):
    """``int_{S^3} W(a) ^ W(w)`` with ``delta a = w``; independent of the filler."""
    a = filler if filler is not None else _some_filler(w)
    return hopf_form(a)[1]


@dataclass
class SimplicialMapData:
    """Vertex map from a 3-sphere model to a 2-sphere model (boundary of a tetrahedron)."""

    domain: SimplicialComplex
    codomain: SimplicialComplex
    vertex_map: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        tris = set(self.codomain.simplices[2]) | set(self.codomain.simplices[1]) | set(self.codomain.simplices[0])
        for k in range(1, self.domain.dim + 1):
            for s in self.domain.simplices[k]:
                img = tuple(sorted({self.vertex_map[v] for v in s}))
                if len(img) > 3 or img not in tris:
                    raise ValueError(f"simplex {s} is not mapped onto a simplex")

    def degree_cochain(self, target_triangle=None) -> Cochain:
        """Pullback of the fundamental class of the target: +-1 on triangles mapped onto
        the chosen target triangle with/against its orientation."""
        Y = self.codomain
        t_idx = 0 if target_triangle is None else target_triangle
        target = Y.simplices[2][t_idx]
        tsign = Y.orientation[t_idx]
        vals = {}
        for i, s in enumerate(self.domain.simplices[2]):
            img = [self.vertex_map[v] for v in s]
            if tuple(sorted(img)) != target or len(set(img)) < 3:
                continue
            # sign of the permutation sorting the image
            perm = [target.index(x) for x in img]
            inv = sum(1 for x in range(3) for y in range(x + 1, 3) if perm[x] > perm[y])
            vals[i] = tsign * (-1 if inv % 2 else 1)
        return Cochain(self.domain, 2, vals, "Z")

    def to_json(self):
        return {"domain": self.domain.to_json(), "codomain": self.codomain.to_json(),
                "vertex_map": list(self.vertex_map), "meta": self.meta}

    @classmethod
    def from_json(cls, data):
        return cls(SimplicialComplex.from_json(data["domain"]),
                   SimplicialComplex.from_json(data["codomain"]),
                   list(data["vertex_map"]), data.get("meta", {}))


# -- generated simplicial Hopf maps --------------------------------------------

def _rotated(v, a=0.3, b=0.7):
    x, y, z = v
    x, y = x * math.cos(a) - y * math.sin(a), x * math.sin(a) + y * math.cos(a)
    y, z = y * math.cos(b) - z * math.sin(b), y * math.sin(b) + z * math.cos(b)
    return (x, y, z)


# vertices of a regular tetrahedron, rotated off the coordinate axes so that
# the poles of the Hopf fibration are not equidistant from two vertices
TETRA_TARGETS = tuple(_rotated(t) for t in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)))


def join_sphere(n: int, m: int | None = None) -> SimplicialComplex:
    """The 3-sphere as the join of an n-gon and an m-gon (n*m tetrahedra)."""
    m = n if m is None else m
    if n < 3 or m < 3:
        raise ValueError("polygons need at least 3 vertices")
    tops = [(i, (i + 1) % n, n + j, n + (j + 1) % m) for i in range(n) for j in range(m)]
    return SimplicialComplex.from_maximal(tops, meta={"name": f"join-{n}-{m}"})


def _join_point(key, n, m, L):
    """Point of S^3 in C^2 for a subdivision vertex of the join of two polygons."""
    u = complex(0)
    v = complex(0)
    lam = 0.0
    for vert, a in key:
        b = a / L
        if vert < n:
            u += b * complex(math.cos(2 * math.pi * vert / n), math.sin(2 * math.pi * vert / n))
        else:
            j = vert - n
            v += b * complex(math.cos(2 * math.pi * j / m), math.sin(2 * math.pi * j / m))
            lam += b
    c, s = math.cos(math.pi * lam / 2), math.sin(math.pi * lam / 2)
    z1 = c * u / abs(u) if abs(u) > 0 else 0j
    z2 = s * v / abs(v) if abs(v) > 0 else 0j
    return z1, z2


def _hopf_image(z1, z2, d):
    u = z1 ** abs(d) if d >= 0 else z1.conjugate() ** abs(d)
    n = abs(u) ** 2 + abs(z2) ** 2
    p = 2 * u * z2.conjugate()
    return (p.real / n, p.imag / n, (abs(u) ** 2 - abs(z2) ** 2) / n)


def simplicial_hopf_map(d: int = 1, n: int = 6, L: int = 2) -> SimplicialMapData:
    """Simplicial approximation of ``(z1, z2) -> [z1^d : z2]``.

    The domain is the L-fold edgewise subdivision of the join of two n-gons,
    placed on S^3 in C^2 with the polygons on the two coordinate circles.
    The target is the boundary of a regular tetrahedron inscribed in S^2 and
    every domain vertex goes to the nearest tetrahedron vertex.  ValueError
    is raised if some tetrahedron reaches all four targets (the subdivision
    is too coarse for d).  The domain is
    relabelled so that the vertex map is order preserving, which makes the
    Alexander-Whitney cup product natural under pullback.
    """
    from .complexes import edgewise_subdivide

    X = edgewise_subdivide(join_sphere(n), L)
    vmap = []
    for key in X.vertex_keys:
        y = _hopf_image(*_join_point(key, n, n, L), d)
        dots = [sum(a * b for a, b in zip(y, t)) for t in TETRA_TARGETS]
        vmap.append(max(range(4), key=lambda j: (dots[j], -j)))
    bad = [s for s in X.simplices[3] if len({vmap[v] for v in s}) == 4]
    if bad:
        raise ValueError(f"domain too coarse: {len(bad)} tetrahedra reach four targets")
    # relabel: sort vertices by (image, old index)
    order = sorted(range(X.n_vertices), key=lambda v: (vmap[v], v))
    new = {v: i for i, v in enumerate(order)}
    tops = []
    signs = {}
    for t, s in enumerate(X.simplices[3]):
        img = [new[v] for v in s]
        inv = sum(1 for a in range(4) for b in range(a + 1, 4) if img[a] > img[b])
        key = tuple(sorted(img))
        tops.append(key)
        signs[key] = X.orientation[t] * (-1 if inv % 2 else 1)
    Y = SimplicialComplex.from_maximal(tops, orient=False, meta={"name": "hopf-domain", "n": n, "L": L})
    Y.orientation = [signs[s] for s in Y.simplices[3]]
    Z = boundary_sphere_complex(2)
    new_map = [vmap[order[i]] for i in range(Y.n_vertices)]
    return SimplicialMapData(Y, Z, new_map, {"n": n, "L": L, "d": d})


def compose_degree(f: SimplicialMapData, k: int) -> Cochain:
    """Degree cochain of ``f`` followed by a degree-k self map of S^2, as ``k * f^*u``."""
    return f.degree_cochain().scale(k)


def _preimage_cycle(f: SimplicialMapData, target):
    """Poincare dual 1-cycle of the pullback of the given target triangle.

    Returns ``(points, segments)``: triangles of the domain mapped onto the
    target, and for every tetrahedron mapped onto it the pair (in, out).
    """
    X = f.domain
    w = f.degree_cochain(target)
    segs = {}
    bd = X.boundary(3)
    for t, row in enumerate(bd):
        hits = [(tri, sg) for tri, sg in row if w.values.get(tri)]
        if not hits:
            continue
        if len(hits) != 2:
            raise ValueError("preimage is not a 1-manifold")
        eps = X.orientation[t]
        flux = {tri: eps * sg * w.values[tri] for tri, sg in hits}
        t_in = next(tri for tri, v in flux.items() if v < 0)
        t_out = next(tri for tri, v in flux.items() if v > 0)
        segs[t] = (t_in, t_out)
    return w, segs


def hopf_linking_oracle(f: SimplicialMapData, targets=(0, 1)):
    """Hopf invariant of a simplicial map as the linking number of two preimages.

    The preimage C of a regular value in the second target triangle is made a
    subcomplex by a stellar subdivision (star every crossed triangle and every
    crossed tetrahedron); a 2-chain S with boundary C is found exactly, and the
    preimage of the first target is intersected with S.  That preimage only
    meets 2-cells at its crossing points with the triangles it passes through,
    all of which are unsubdivided triangles of the original domain.
    """
    from .linalg import SparseEchelon

    X = f.domain
    t1, t2 = targets
    if t1 == t2:
        raise ValueError("need two distinct target triangles")
    w1, _ = _preimage_cycle(f, t1)
    w2, segs = _preimage_cycle(f, t2)
    if w1.is_zero() or w2.is_zero():
        return Fraction(0)
    n = X.n_vertices
    crossed_tris = sorted({tri for pair in segs.values() for tri in pair})
    q_id = {tri: n + i for i, tri in enumerate(crossed_tris)}
    m_id = {t: n + len(crossed_tris) + i for i, t in enumerate(sorted(segs))}
    tops = []
    for t, s in enumerate(X.simplices[3]):
        if t not in segs:
            tops.append(s)
            continue
        m = m_id[t]
        for j in range(4):
            face = s[:j] + s[j + 1:]
            fi = X.index[2][face]
            if fi in q_id:
                q = q_id[fi]
                for e in ((face[0], face[1]), (face[0], face[2]), (face[1], face[2])):
                    tops.append((m, q) + e)
            else:
                tops.append((m,) + face)
    Y = SimplicialComplex.from_maximal(tops, orient=False)
    # C as a 1-chain of Y
    chain = {}
    eidx = Y.index[1]

    def add_edge(u, v, c):
        key = (u, v) if u < v else (v, u)
        sign = 1 if u < v else -1
        i = eidx[key]
        chain[i] = chain.get(i, 0) + sign * c
    for t, (t_in, t_out) in segs.items():
        add_edge(q_id[t_in], m_id[t], 1)
        add_edge(m_id[t], q_id[t_out], 1)
    # solve boundary(S) = C, one equation per edge of Y
    rows = [dict() for _ in range(Y.count(1))]
    for i, row in enumerate(Y.boundary(2)):
        for e, sg in row:
            rows[e][i] = sg
    ech = SparseEchelon()
    for e, row in enumerate(rows):
        if not ech.add(row, chain.get(e, 0)):
            raise ArithmeticError("preimage cycle does not bound")
    S = ech.solve()
    tri_y = Y.index[2]
    total = Fraction(0)
    for tri, v in w1.values.items():
        total += v * S.get(tri_y[X.simplices[2][tri]], 0)
    return total
