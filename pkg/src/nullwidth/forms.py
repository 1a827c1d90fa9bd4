"""Exact piecewise-polynomial differential forms on simplicial and prism complexes.

Each top cell carries its own chart.  On an n-simplex with sorted vertices
``v_0 < ... < v_n`` the chart variables are the barycentric coordinates
``x_i = lambda_i`` for ``i = 1..n`` (``lambda_0 = 1 - sum x`` is eliminated), so
``dx_1 ^ ... ^ dx_n`` is the positive orientation.  A prism ``tau x I_i`` adds the
local time ``s`` in [0, 1] as the last variable; global time is
``t = (i + s) / T``.

A cell form is a dict ``key -> coefficient`` with
``key = (packed exponents) << 5 | dmask``: exponents use 6 bits per variable and
``dmask`` lists the differentials ``dx_v`` present (in increasing order).  For
disjoint masks the key of a product is the sum of the keys, which keeps the
wedge loop free of tuple handling.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .complexes import Cochain, ProductComplex

__all__ = [
    "Form",
    "PolyForm",
    "PrismForm",
    "DegreeCapExceeded",
    "PreconditionViolated",
    "whitney",
    "whitney_product",
    "wedge",
    "exterior_d",
    "integrate",
    "time_antiderivative",
    "time_weighted_lift",
    "lift",
    "restrict_slice",
    "local_relative_primitive",
    "trace_mismatches",
    "norm_surrogate",
]

EXP_BITS = 6
MASK_BITS = 5
EXP_MAX = (1 << EXP_BITS) - 1


class DegreeCapExceeded(Exception):
    """No relative primitive exists in the polynomial basis of the given degree."""


class PreconditionViolated(Exception):
    """Input form does not satisfy the documented precondition."""


def _shift(v):
    return MASK_BITS + EXP_BITS * v


def _exps(key, nvars):
    return [(key >> _shift(v)) & EXP_MAX for v in range(nvars)]


def _make_key(exps, mask):
    key = mask
    for v, e in enumerate(exps):
        if e > EXP_MAX:
            raise OverflowError("polynomial degree exceeds packed exponent range")
        key |= e << _shift(v)
    return key


def _bits(mask):
    return [v for v in range(MASK_BITS) if mask >> v & 1]


def _popcount(x):
    return bin(x).count("1")


def _merge_sign(m1, m2):
    """Sign of reordering dx_{m1} ^ dx_{m2} into increasing order."""
    inv = 0
    for i in _bits(m1):
        inv += _popcount(m2 & ((1 << i) - 1))
    return -1 if inv & 1 else 1


_SIGN = [[0 if (a & b) else _merge_sign(a, b) for b in range(1 << MASK_BITS)]
         for a in range(1 << MASK_BITS)]
_MASK = (1 << MASK_BITS) - 1
_FACT = [factorial(i) for i in range(200)]


# -- cell-level arithmetic ------------------------------------------------------

def _cadd(a, b, scale=1):
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + scale * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _cscale(a, c):
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def _cwedge(a, b):
    out = {}
    get = out.get
    sign = _SIGN
    bl = list(b.items())
    for k1, c1 in a.items():
        m1 = k1 & _MASK
        row = sign[m1]
        for k2, c2 in bl:
            s = row[k2 & _MASK]
            if s:
                k = k1 + k2
                out[k] = get(k, 0) + (c1 * c2 if s > 0 else -(c1 * c2))
    return {k: v for k, v in out.items() if v}


def _cd(a, nvars):
    out = {}
    for key, c in a.items():
        mask = key & _MASK
        for v in range(nvars):
            bit = 1 << v
            if mask & bit:
                continue
            e = (key >> _shift(v)) & EXP_MAX
            if not e:
                continue
            nk = key - (1 << _shift(v)) + bit
            val = e * c
            if _popcount(mask & (bit - 1)) & 1:
                val = -val
            out[nk] = out.get(nk, 0) + val
    return {k: v for k, v in out.items() if v}


def _cdegree(a):
    degs = {_popcount(k & _MASK) for k in a}
    if len(degs) > 1:
        raise ValueError("inhomogeneous cell form")
    return degs.pop() if degs else None


def _poly_var(v):
    return {1 << _shift(v): Fraction(1)}


def _lam(n, i):
    """lambda_i as a 0-form in the chart of an n-simplex."""
    if i == 0:
        out = {0: Fraction(1)}
        for v in range(n):
            out[1 << _shift(v)] = Fraction(-1)
        return out
    return _poly_var(i - 1)


def _dlam(n, i):
    if i == 0:
        return {1 << v: Fraction(-1) for v in range(n)}
    return {1 << (i - 1): Fraction(1)}


# In the chart, variable v (0-based) is lambda_{v+1}.  Local vertex positions
# p >= 1 correspond to variable p - 1.

@lru_cache(maxsize=None)
def _whitney_local(n, pos):
    """Whitney form of the face ``pos`` in the chart of an n-simplex (frozen items)."""
    k = len(pos) - 1
    total = {}
    for j in range(k + 1):
        term = _lam(n, pos[j])
        for m, p in enumerate(pos):
            if m != j:
                term = _cwedge(term, _dlam(n, p))
        total = _cadd(total, term, (-1) ** j * _FACT[k])
    return tuple(sorted(total.items()))


def _s_poly(coeffs, nvars_base):
    """Polynomial in the local time s (variable index nvars_base) from a coefficient list."""
    out = {}
    for b, c in enumerate(coeffs):
        if c:
            out[b << _shift(nvars_base)] = Fraction(c)
    return out


@lru_cache(maxsize=None)
def _prism_basis(n, pos, time):
    """Product Whitney basis element on a prism over an n-simplex."""
    base = dict(_whitney_local(n, pos))
    if time == 0:
        res = _cwedge(base, _s_poly([1, -1], n))
    elif time == 1:
        res = _cwedge(base, _s_poly([0, 1], n))
    else:
        res = _cwedge(base, {1 << n: Fraction(1)})
    return tuple(sorted(res.items()))


# -- face integration and pullback ---------------------------------------------

@lru_cache(maxsize=None)
def _face_plan(n, pos, time, prism):
    """Precomputed data for integrating over a local face.

    Returns ``(forbidden_exp_bits, mask_sign, exp_vars, s_rule)`` where
    ``exp_vars`` lists, per face vertex, the chart variable carrying its
    barycentric exponent (or None for lambda_0).
    """
    face_vars = {p - 1 for p in pos if p >= 1}
    forbidden = 0
    for v in range(n):
        if v not in face_vars:
            forbidden |= EXP_MAX << _shift(v)
    bits_rest = sum(1 << (p - 1) for p in pos[1:])
    mask_sign = {bits_rest: 1}
    if pos[0] >= 1:
        full = bits_rest | (1 << (pos[0] - 1))
        for j in range(1, len(pos)):
            mask_sign[full & ~(1 << (pos[j] - 1))] = (-1) ** j
    if prism and time is None:
        mask_sign = {m | (1 << n): s for m, s in mask_sign.items()}
    exp_vars = tuple(p - 1 if p >= 1 else None for p in pos)
    return forbidden, mask_sign, exp_vars


def _face_integral(terms, n, desc, prism):
    pos, time = desc
    forbidden, mask_sign, exp_vars = _face_plan(n, pos, time, prism)
    k = len(pos) - 1
    total = 0
    for key, c in terms.items():
        if key & forbidden:
            continue
        sg = mask_sign.get(key & _MASK)
        if sg is None:
            continue
        num = 1
        tot = k
        for v in exp_vars:
            if v is not None:
                e = (key >> _shift(v)) & EXP_MAX
                num *= _FACT[e]
                tot += e
        val = Fraction(num, _FACT[tot])
        if prism:
            b = (key >> _shift(n)) & EXP_MAX
            if time is None:
                val /= b + 1
            elif time == 0 and b:
                continue
        total += sg * c * val
    return total


@lru_cache(maxsize=None)
def _multinomial_power(k, m):
    """(1 - y_1 - ... - y_k)^m expanded, as a dict exps-tuple -> int."""
    out = {}
    for combo in itertools.product(range(m + 1), repeat=k + 1):
        if sum(combo) != m:
            continue
        coef = _FACT[m]
        for c in combo:
            coef //= _FACT[c]
        sign = (-1) ** sum(combo[1:])
        out[tuple(combo[1:])] = out.get(tuple(combo[1:]), 0) + sign * coef
    return tuple(out.items())


@lru_cache(maxsize=None)
def _dx_image(n, pos, mask):
    """Pullback of dx_mask (base variables only) to the face chart; dict mask -> sign."""
    k = len(pos) - 1
    var_to_face = {p - 1: j for j, p in enumerate(pos) if p >= 1}
    img = {0: 1}
    for v in _bits(mask):
        if v not in var_to_face:
            return ()
        j = var_to_face[v]
        if j >= 1:
            one = {1 << (j - 1): 1}
        else:
            one = {1 << m: -1 for m in range(k)}
        new = {}
        for m1, c1 in img.items():
            for m2, c2 in one.items():
                s = _SIGN[m1][m2]
                if s:
                    new[m1 | m2] = new.get(m1 | m2, 0) + s * c1 * c2
        img = {m: c for m, c in new.items() if c}
    return tuple(img.items())


def _pullback(terms, n, desc, prism):
    """Pull a cell form back to the chart of a local face.

    The face chart has ``k = len(pos) - 1`` variables, plus the local time as
    variable k when the face is a prism face.
    """
    pos, time = desc
    k = len(pos) - 1
    out = {}
    sbit = 1 << n
    for key, c in terms.items():
        mask = key & _MASK
        ex = _exps(key, n + (1 if prism else 0))
        b = 0
        if prism:
            b = ex[n]
            if time is not None:
                if mask & sbit:
                    continue
                if time == 0 and b:
                    continue
        base_mask = mask & ~sbit
        if any(ex[v] for v in range(n) if (v + 1) not in pos):
            continue
        img = _dx_image(n, pos, base_mask)
        if not img:
            continue
        mono = [ex[p - 1] if p >= 1 else 0 for p in pos]
        expand = _multinomial_power(k, mono[0]) if pos[0] >= 1 else (((0,) * k, 1),)
        extra_mask = 0
        extra_key = 0
        if prism and time is None:
            extra_key = b << _shift(k)
            if mask & sbit:
                extra_mask = 1 << k
        for eps, mc in expand:
            fe = [mono[j + 1] + eps[j] for j in range(k)]
            for fm, sg in img:
                key2 = _make_key(fe, fm) + extra_key + extra_mask
                out[key2] = out.get(key2, 0) + sg * mc * c
    return {k2: v for k2, v in out.items() if v}


# -- global forms ---------------------------------------------------------------

def _faces(host, top, k):
    """Local k-faces of a top cell as ``(cell, (positions, time))``."""
    if isinstance(host, ProductComplex):
        yield from host.local_faces(top, k)
    else:
        for cell, pos in host.local_faces(top, k):
            yield cell, (pos, None)


class Form:
    """Piecewise-polynomial form: one chart form per top cell of the host."""

    def __init__(self, host, degree, cells=None):
        self.host = host
        self.degree = degree
        self.cells = {t: c for t, c in (cells or {}).items() if c}

    @property
    def is_prism(self):
        return isinstance(self.host, ProductComplex)

    @property
    def n(self):
        """Dimension of the underlying simplex chart."""
        return self.host.base.dim if self.is_prism else self.host.dim

    @property
    def nvars(self):
        return self.n + (1 if self.is_prism else 0)

    def _new(self, degree, cells):
        return type(self)(self.host, degree, cells)

    def _check(self, other):
        if not (self.host is other.host or self.host.same_as(other.host)):
            raise ValueError("forms live on different complexes")

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree and self.cells and other.cells:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.cells)
        for t, c in other.cells.items():
            out[t] = _cadd(out.get(t, {}), c)
        return self._new(self.degree, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return self._new(self.degree, {t: _cscale(f, c) for t, f in self.cells.items()})

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.cells == other.cells and (self.degree == other.degree or not self.cells)

    def is_zero(self):
        return not self.cells

    def cell(self, top):
        return self.cells.get(top, {})

    def n_terms(self):
        return sum(len(c) for c in self.cells.values())

    def to_json(self):
        """Per-cell term lists: exponents, differential indices, coefficient."""
        out = []
        n = self.n
        for top in sorted(self.cells):
            terms = []
            for key, c in sorted(self.cells[top].items()):
                ex = _exps(key, self.nvars)
                mask = key & _MASK
                c = Fraction(c)
                item = [ex[:n], [v + 1 for v in _bits(mask) if v < n],
                        f"{c.numerator}/{c.denominator}"]
                if self.is_prism:
                    item += [ex[n], bool(mask >> n & 1)]
                terms.append(item)
            entry = {"cell": top, "terms": terms}
            if self.is_prism:
                m = self.host.base.count(n)
                entry["interval"] = top // m
                entry["base_cell"] = top % m
            out.append(entry)
        return {"degree": self.degree, "kind": "prism" if self.is_prism else "poly",
                "cells": out}

    @classmethod
    def from_json(cls, host, data):
        prism = isinstance(host, ProductComplex)
        n = host.base.dim if prism else host.dim
        cells = {}
        for entry in data["cells"]:
            terms = {}
            for item in entry["terms"]:
                ex = list(item[0])
                mask = sum(1 << (v - 1) for v in item[1])
                if prism:
                    ex.append(item[3])
                    if item[4]:
                        mask |= 1 << n
                terms[_make_key(ex, mask)] = Fraction(item[2])
            cells[int(entry["cell"])] = terms
        kind = PrismForm if prism else PolyForm
        return kind(host, int(data["degree"]), cells)

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, cells={len(self.cells)}, terms={self.n_terms()})"


class PolyForm(Form):
    """Form on a simplicial complex."""


class PrismForm(Form):
    """Form on a product complex ``X x [0, 1]``."""


def _form_type(host):
    return PrismForm if isinstance(host, ProductComplex) else PolyForm


def zero_form(host, degree):
    return _form_type(host)(host, degree, {})


def whitney(c: Cochain) -> Form:
    """Whitney form of a cochain; integrates back to ``c`` on every cell."""
    host = c.host
    if isinstance(host, ProductComplex):
        return whitney_product(c)
    n = host.dim
    k = c.degree
    cells = {}
    if c.values:
        for top in host.top_cells():
            acc = {}
            for cell, pos in host.local_faces(top, k):
                v = c.values.get(cell)
                if v:
                    acc = _cadd(acc, dict(_whitney_local(n, pos)), Fraction(v))
            if acc:
                cells[top] = acc
    return PolyForm(host, k, cells)


def whitney_product(c: Cochain) -> PrismForm:
    """Product Whitney form of a cochain on a ProductComplex."""
    P = c.host
    if not isinstance(P, ProductComplex):
        raise TypeError("whitney_product needs a cochain on a ProductComplex")
    n = P.base.dim
    k = c.degree
    cells = {}
    if c.values:
        for top in P.top_cells():
            acc = {}
            for cell, (pos, time) in P.local_faces(top, k):
                v = c.values.get(cell)
                if v:
                    acc = _cadd(acc, dict(_prism_basis(n, pos, time)), Fraction(v))
            if acc:
                cells[top] = acc
    return PrismForm(P, k, cells)


def wedge(f: Form, g: Form) -> Form:
    f._check(g)
    deg = f.degree + g.degree
    if deg > f.host.dim:
        return f._new(deg, {})
    cells = {}
    for t, a in f.cells.items():
        b = g.cells.get(t)
        if b:
            r = _cwedge(a, b)
            if r:
                cells[t] = r
    return f._new(deg, cells)


def exterior_d(f: Form) -> Form:
    nv = f.nvars
    cells = {t: _cd(a, nv) for t, a in f.cells.items()}
    return f._new(f.degree + 1, cells)


def integrate(f: Form, check_compatible=False) -> Cochain:
    """Integrate a k-form over every k-cell of its host.

    With ``check_compatible`` every face integral is computed from each
    containing top cell and a mismatch raises ValueError.
    """
    host, k = f.host, f.degree
    prism = f.is_prism
    n = f.n
    vals = {}
    for top in host.top_cells():
        terms = f.cells.get(top)
        for cell, desc in _faces(host, top, k):
            if cell in vals and not check_compatible:
                continue
            v = _face_integral(terms, n, desc, prism) if terms else 0
            if cell in vals:
                if vals[cell] != v:
                    raise ValueError(f"face integrals disagree on cell {cell}")
            else:
                vals[cell] = v
    return Cochain(host, k, vals, "Q")


def trace_mismatches(f: Form, limit=None):
    """Cells where the traces from different top cells disagree (empty if compatible)."""
    host, k = f.host, f.degree
    prism = f.is_prism
    n = f.n
    seen = {}
    bad = []
    for top in host.top_cells():
        terms = f.cells.get(top, {})
        for cell, desc in _faces(host, top, k):
            pb = _pullback(terms, n, desc, prism)
            if cell in seen:
                if seen[cell] != pb:
                    bad.append(cell)
                    if limit and len(bad) >= limit:
                        return bad
            else:
                seen[cell] = pb
    return sorted(set(bad))


def norm_surrogate(f: Form):
    """Per-cell coefficient-sum bound on the comass; returns the maximum over cells."""
    return max((sum(abs(Fraction(v)) for v in c.values()) for c in f.cells.values()),
               default=Fraction(0))


# -- time operations on prism forms -------------------------------------------

def _profile_on_interval(profile, i, T):
    """Coefficients in s of p((i + s) / T) for a coefficient list p in t."""
    out = [Fraction(0)] * max(len(profile), 1)
    # expand sum_j p_j ((i + s)/T)^j
    for j, pj in enumerate(profile):
        pj = Fraction(pj)
        if not pj:
            continue
        for m in range(j + 1):
            out[m] += pj * comb(j, m) * Fraction(i) ** (j - m) / Fraction(T) ** j
    return out


def lift(phi: PolyForm, P: ProductComplex) -> PrismForm:
    return time_weighted_lift(phi, P, [1])


def time_weighted_lift(phi: PolyForm, P: ProductComplex, profile, with_dt=False) -> PrismForm:
    """``p(t) * pi^* phi``, or ``p(t) dt ^ pi^* phi`` when ``with_dt`` is set.

    ``profile`` is the list of coefficients of ``p`` in the global time t.
    """
    if not P.base.same_as(phi.host):
        raise ValueError("form does not live on the base of the product")
    n = P.base.dim
    cells = {}
    for i in range(P.T):
        coeffs = _profile_on_interval(profile, i, P.T)
        sp = _s_poly(coeffs, n)
        if not sp:
            continue
        if with_dt:
            # dt = ds / T, placed in front of phi
            sp = {k | (1 << n): v / P.T for k, v in sp.items()}
        for tau, f in phi.cells.items():
            res = _cwedge(sp, f)
            if res:
                cells[P.prism_index(n + 1, tau, i)] = res
    return PrismForm(P, phi.degree + (1 if with_dt else 0), cells)


def _split_ds(terms, n):
    """Split a prism cell form into (P, Q) with form = P + Q ^ ds."""
    sbit = 1 << n
    P, Q = {}, {}
    for k, c in terms.items():
        if k & sbit:
            Q[k - sbit] = c
        else:
            P[k] = c
    return P, Q


def _s_integral(Q, n):
    """Return (F, total): F(s) = int_s^1 Q ds', total = int_0^1 Q ds'."""
    F, total = {}, {}
    sh = _shift(n)
    for k, c in Q.items():
        b = (k >> sh) & EXP_MAX
        base = k - (b << sh)
        v = Fraction(c) / (b + 1)
        # int_s^1 s'^b = (1 - s^{b+1}) / (b + 1)
        F[base] = F.get(base, 0) + v
        kk = base + ((b + 1) << sh)
        F[kk] = F.get(kk, 0) - v
        total[base] = total.get(base, 0) + v
    return {k: v for k, v in F.items() if v}, {k: v for k, v in total.items() if v}


def restrict_slice(f: PrismForm, node: int) -> PolyForm:
    """Restriction of a prism form to the slice ``X x {node / T}``."""
    P = f.host
    n = P.base.dim
    if not 0 <= node <= P.T:
        raise IndexError(f"node {node} outside 0..{P.T}")
    interval, s_val = (node, 0) if node < P.T else (node - 1, 1)
    sh = _shift(n)
    sbit = 1 << n
    cells = {}
    for tau in range(P.base.count(n)):
        terms = f.cells.get(P.prism_index(n + 1, tau, interval))
        if not terms:
            continue
        out = {}
        for k, c in terms.items():
            if k & sbit:
                continue
            b = (k >> sh) & EXP_MAX
            if s_val == 0 and b:
                continue
            base = k - (b << sh)
            out[base] = out.get(base, 0) + c
        out = {k: v for k, v in out.items() if v}
        if out:
            cells[tau] = out
    return PolyForm(P.base, f.degree, cells)


def time_antiderivative(omega: PrismForm, check=True) -> PrismForm:
    """Form ``alpha`` with ``d alpha = omega`` vanishing on the final slice.

    For ``omega = P + Q ^ ds`` of degree k on a column of prisms,
    ``alpha(s) = (-1)^k (int_s^1 Q + sum of later interval totals)``.
    """
    P = omega.host
    n = P.base.dim
    k = omega.degree
    if check:
        if not exterior_d(omega).is_zero():
            raise PreconditionViolated("form is not closed")
        if not restrict_slice(omega, P.T).is_zero():
            raise PreconditionViolated("form does not vanish on the final slice")
    sign = -1 if k % 2 else 1
    cells = {}
    for tau in range(P.base.count(n)):
        carry = {}
        for i in reversed(range(P.T)):
            top = P.prism_index(n + 1, tau, i)
            terms = omega.cells.get(top)
            F, total = ({}, {})
            if terms:
                _, Q = _split_ds(terms, n)
                F, total = _s_integral(Q, n)
            res = _cadd(F, carry)
            if res:
                cells[top] = _cscale(res, sign)
            carry = _cadd(carry, total)
    return PrismForm(P, k - 1, cells)


# -- relative primitives on a single simplex -----------------------------------

@lru_cache(maxsize=None)
def _monomials(nvars, maxdeg):
    out = []
    for total in range(maxdeg + 1):
        for combo in itertools.product(range(total + 1), repeat=nvars):
            if sum(combo) == total:
                out.append(combo)
    return tuple(out)


class _Solver:
    """Cached exact solution operator for ``d nu = mu`` with zero trace on the boundary."""

    def __init__(self, n, cap):
        self.n, self.cap = n, cap
        masks = [m for m in range(1 << n) if _popcount(m) == n - 1]
        self.unknowns = [_make_key(e, m) for m in masks for e in _monomials(n, cap)]
        rows = {}  # row label -> {unknown index: coeff}
        for j, key in enumerate(self.unknowns):
            basis = {key: 1}
            for rk, c in _cd(basis, n).items():
                rows.setdefault(("d", rk), {})[j] = c
            for f in range(n + 1):
                pos = tuple(p for p in range(n + 1) if p != f)
                for rk, c in _pullback(basis, n, (pos, None), False).items():
                    rows.setdefault(("t", f, rk), {})[j] = c
        self.labels = sorted(rows, key=repr)
        # Gauss-Jordan on [A | I] with row ops recorded sparsely
        A = [dict(rows[lbl]) for lbl in self.labels]
        E = [{r: Fraction(1)} for r in range(len(A))]
        pivots = []
        row = 0
        ncols = len(self.unknowns)
        for col in range(ncols):
            piv = next((r for r in range(row, len(A)) if A[r].get(col)), None)
            if piv is None:
                continue
            A[row], A[piv] = A[piv], A[row]
            E[row], E[piv] = E[piv], E[row]
            inv = 1 / Fraction(A[row][col])
            A[row] = {c: v * inv for c, v in A[row].items()}
            E[row] = {c: v * inv for c, v in E[row].items()}
            for r in range(len(A)):
                if r != row and A[r].get(col):
                    f = A[r][col]
                    A[r] = {c: v for c, v in _cadd(A[r], A[row], -f).items()}
                    E[r] = _cadd(E[r], E[row], -f)
            pivots.append(col)
            row += 1
        self.pivots = pivots
        self.E_pivot = E[:row]
        self.E_null = E[row:]
        self.label_index = {lbl: i for i, lbl in enumerate(self.labels)}

    def solve(self, mu):
        b = {}
        for key, c in mu.items():
            idx = self.label_index.get(("d", key))
            if idx is None:
                raise DegreeCapExceeded(f"degree cap {self.cap} too small for this form")
            b[idx] = c
        for e in self.E_null:
            if sum(v * b[i] for i, v in e.items() if i in b):
                raise DegreeCapExceeded(f"no relative primitive with degree cap {self.cap}")
        out = {}
        for col, e in zip(self.pivots, self.E_pivot):
            val = sum((v * b[i] for i, v in e.items() if i in b), Fraction(0))
            if val:
                out[self.unknowns[col]] = val
        return out


@lru_cache(maxsize=None)
def _solver(n, cap):
    return _Solver(n, cap)


def _poly_degree(terms, n):
    return max((sum(_exps(k, n)) for k in terms), default=0)


def _local_primitive_terms(mu, n, degree_cap=None):
    if not mu:
        return {}
    total = _face_integral(mu, n, (tuple(range(n + 1)), None), False)
    if total:
        raise PreconditionViolated("form has nonzero integral; no relative primitive exists")
    cap = degree_cap if degree_cap is not None else _poly_degree(mu, n) + 1
    return _solver(n, cap).solve(mu)


def local_relative_primitive(mu, degree_cap=None, top=None):
    """Polynomial (n-1)-form with ``d nu = mu`` and zero trace on the boundary of a simplex.

    ``mu`` is a top-degree PolyForm; the primitive is computed on every top
    cell it occupies (or just ``top``).  Raises DegreeCapExceeded when the
    polynomial basis of degree ``degree_cap`` (default: degree of mu + 1) has
    no solution and PreconditionViolated when the integral of mu is nonzero.
    """
    host = mu.host
    if isinstance(host, ProductComplex):
        raise TypeError("relative primitives are computed on simplices")
    n = host.dim
    if mu.degree != n:
        raise ValueError("expected a top-degree form")
    cells = {}
    targets = [top] if top is not None else list(mu.cells)
    for t in targets:
        res = _local_primitive_terms(mu.cells.get(t, {}), n, degree_cap)
        if res:
            cells[t] = res
    return PolyForm(host, n - 1, cells)


def boundary_trace_zero(terms, n):
    """True if a cell form on an n-simplex has zero pullback to every facet."""
    for f in range(n + 1):
        pos = tuple(p for p in range(n + 1) if p != f)
        if _pullback(terms, n, (pos, None), False):
            return False
    return True
