"""Free graded-commutative DGAs over Q and their extension by <t, dt>.

Elements are finite sums of terms ``c * m (x) t^j [dt]`` where ``m`` is a
monomial in the generators written in generator order.  Products carry the
Koszul sign ``(a (x) f)(b (x) g) = (-1)^{|f||b|} ab (x) fg`` and the
differential is

    d(a (x) f) = da (x) f + (-1)^{|a|} a (x) f' dt.

Under this convention the nullhomotopy formulas for two-stage models read

    x_i -> omega_i (1-t)^{n_i} + (-1)^{n_i} n_i alpha_i (1-t)^{n_i - 1} dt
    y   -> nu (1-t)^{n+1} + eta (n+1) (1-t)^n dt,   deg y = n,
    d eta = (-1)^n (int_0^1 h(P(x)) + nu).
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

__all__ = [
    "FreeGCA",
    "DgaElement",
    "DgaMorphism",
    "DgaHomotopy",
    "HomotopyReport",
    "TwoStageViolation",
    "VerificationFailure",
    "ParseError",
    "normalize",
    "differential",
    "integrate01",
    "endpoint_eval",
    "build_two_stage_nullhomotopy",
    "verify_homotopy",
    "sphere_model",
    "random_two_stage_model",
    "model_from_json",
    "homotopy_from_json",
]


class TwoStageViolation(ValueError):
    pass


class VerificationFailure(AssertionError):
    def __init__(self, generator, residual):
        super().__init__(f"homotopy fails on {generator}: residual {residual}")
        self.generator = generator
        self.residual = residual


class ParseError(ValueError):
    pass


class FreeGCA:
    """Free graded-commutative algebra on named generators with a differential.

    Parameters
    ----------
    generators : list of (name, degree)
    differentials : dict, optional
        ``name -> expression`` (string in the expression grammar, or a
        DgaElement); missing generators are closed.
    """

    RESERVED = ("t", "dt")

    def __init__(self, generators, differentials=None, name=""):
        self.names = [g for g, _ in generators]
        self.degrees = [int(d) for _, d in generators]
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        for g in self.names:
            if g in self.RESERVED or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", g):
                raise ValueError(f"invalid generator name {g!r}")
        if any(d < 1 for d in self.degrees):
            raise ValueError("generators need positive degree")
        self.index = {g: i for i, g in enumerate(self.names)}
        self.name = name
        self._d = [None] * len(self.names)
        self._raw = dict(differentials or {})

    @property
    def rank(self):
        return len(self.names)

    def _resolve(self):
        for i, g in enumerate(self.names):
            if self._d[i] is None:
                expr = self._raw.get(g, 0)
                el = expr if isinstance(expr, DgaElement) else self.parse(expr if isinstance(expr, str) else str(expr))
                if not el.is_zero() and el.degree() != self.degrees[i] + 1:
                    raise ValueError(f"d{g} has degree {el.degree()}, expected {self.degrees[i] + 1}")
                if el.has_t():
                    raise ValueError("differentials of generators must not involve t")
                self._d[i] = el

    def d_of(self, i) -> "DgaElement":
        self._resolve()
        return self._d[i]

    def set_differential(self, name, expr):
        self._raw[name] = expr
        self._d[self.index[name]] = None

    def gen(self, name) -> "DgaElement":
        i = self.index[name]
        mono = tuple(1 if j == i else 0 for j in range(self.rank))
        return DgaElement(self, {(mono, 0, 0): Fraction(1)})

    def one(self):
        return DgaElement(self, {((0,) * self.rank, 0, 0): Fraction(1)})

    def zero(self):
        return DgaElement(self, {})

    def t(self, j=1):
        return DgaElement(self, {((0,) * self.rank, j, 0): Fraction(1)})

    def dt(self):
        return DgaElement(self, {((0,) * self.rank, 0, 1): Fraction(1)})

    def profile(self, coeffs, with_dt=False):
        """Polynomial ``sum c_j t^j`` (times dt) as an element."""
        z = (0,) * self.rank
        return DgaElement(self, {(z, j, int(with_dt)): Fraction(c) for j, c in enumerate(coeffs) if c})

    def word(self, names):
        """Product of generators in the given order (Koszul signs applied)."""
        out = self.one()
        for g in names:
            out = out * (self.gen(g) if g not in self.RESERVED else (self.t() if g == "t" else self.dt()))
        return out

    def parse(self, text) -> "DgaElement":
        return _Parser(self, text).parse()

    def check_d_squared(self):
        """Generators on which d(d g) is nonzero."""
        return [g for i, g in enumerate(self.names) if not differential(self.d_of(i)).is_zero()]

    def to_json(self):
        self._resolve()
        return {"name": self.name,
                "generators": [{"name": g, "degree": d, "d": str(self._d[i])}
                               for i, (g, d) in enumerate(zip(self.names, self.degrees))]}

    def __repr__(self):
        return f"FreeGCA({', '.join(f'{g}:{d}' for g, d in zip(self.names, self.degrees))})"


def _mono_degree(alg, mono):
    return sum(e * d for e, d in zip(mono, alg.degrees))


def _mono_mul(alg, m1, m2):
    """Product of two normal-form monomials: (sign, monomial) or (0, None)."""
    odd = [d % 2 for d in alg.degrees]
    sign = 1
    # moving each odd generator of m2 left past the odd generators of m1 with larger index
    later = 0
    for i in reversed(range(alg.rank)):
        if odd[i] and m2[i] and later % 2:
            sign = -sign
        if odd[i] and m1[i]:
            later += m1[i]
    out = tuple(a + b for a, b in zip(m1, m2))
    if any(odd[i] and out[i] > 1 for i in range(alg.rank)):
        return 0, None
    return sign, out


class DgaElement:
    """Rational combination of terms ``(monomial, t-power, dt flag)``."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeGCA, terms=None):
        self.alg = alg
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    def _coerce(self, other):
        if isinstance(other, DgaElement):
            if other.alg is not self.alg:
                raise ValueError("elements of different algebras")
            return other
        return self.alg.one().scale(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return DgaElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return DgaElement(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = Fraction(c)
        return DgaElement(self.alg, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, DgaElement):
            return self.scale(other)
        other = self._coerce(other)
        alg = self.alg
        out = {}
        for (m1, j1, e1), c1 in self.terms.items():
            for (m2, j2, e2), c2 in other.terms.items():
                if e1 and e2:
                    continue
                s, m = _mono_mul(alg, m1, m2)
                if not s:
                    continue
                # dt of the left factor moves past the base monomial of the right factor
                if e1 and _mono_degree(alg, m2) % 2:
                    s = -s
                k = (m, j1 + j2, e1 + e2)
                out[k] = out.get(k, 0) + s * c1 * c2
        return DgaElement(alg, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        out = self.alg.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, DgaElement):
            other = self._coerce(other)
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def has_t(self):
        return any(j or e for _, j, e in self.terms)

    def degrees(self):
        return {_mono_degree(self.alg, m) + e for m, _, e in self.terms}

    def degree(self):
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds.pop() if ds else 0

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (m, j, e), c in sorted(self.terms.items()):
            factors = []
            for i, p in enumerate(m):
                if p:
                    factors.append(self.alg.names[i] + (f"^{p}" if p > 1 else ""))
            if j:
                factors.append("t" + (f"^{j}" if j > 1 else ""))
            if e:
                factors.append("dt")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    __repr__ = __str__


def normalize(e: DgaElement) -> DgaElement:
    """Canonical form: combine like terms, drop zeros (elements are kept normal)."""
    return DgaElement(e.alg, e.terms)


def _d_monomial(alg, mono):
    """Leibniz rule on a normal-form monomial of the base algebra."""
    out = alg.zero()
    prefix = alg.one()
    prefix_deg = 0
    for i, p in enumerate(mono):
        if not p:
            continue
        rest = tuple(mono[k] if k > i else 0 for k in range(alg.rank))
        suffix = DgaElement(alg, {(rest, 0, 0): 1})
        dg = alg.d_of(i)
        if not dg.is_zero():
            # d(g^p) = p g^{p-1} dg for even g, and p <= 1 for odd g
            low = tuple(p - 1 if k == i else 0 for k in range(alg.rank))
            piece = DgaElement(alg, {(low, 0, 0): 1}) * dg
            sign = -1 if prefix_deg % 2 else 1
            out = out + (prefix * piece * suffix).scale(sign * p)
        prefix = prefix * DgaElement(alg, {(tuple(p if k == i else 0 for k in range(alg.rank)), 0, 0): 1})
        prefix_deg += p * alg.degrees[i]
    return out


def differential(e: DgaElement) -> DgaElement:
    """``d(a (x) t^j) = da (x) t^j + (-1)^{|a|} j a (x) t^{j-1} dt``; ``d(a (x) g dt) = da (x) g dt``."""
    alg = e.alg
    out = alg.zero()
    cache = {}
    for (m, j, dt), c in e.terms.items():
        if m not in cache:
            cache[m] = _d_monomial(alg, m)
        dm = cache[m]
        # da (x) t^j dt^e: the base part keeps its t-factor on the right
        for (m2, j2, e2), c2 in dm.terms.items():
            k = (m2, j2 + j, dt)
            out.terms[k] = out.terms.get(k, 0) + c * c2
        if not dt and j:
            sign = -1 if _mono_degree(alg, m) % 2 else 1
            k = (m, j - 1, 1)
            out.terms[k] = out.terms.get(k, 0) + sign * j * c
    return DgaElement(alg, out.terms)


def integrate01(e: DgaElement) -> DgaElement:
    """``int_0^1 a (x) t^j = 0`` and ``int_0^1 a (x) t^j dt = (-1)^{|a|} a / (j + 1)``."""
    alg = e.alg
    out = {}
    for (m, j, dt), c in e.terms.items():
        if not dt:
            continue
        sign = -1 if _mono_degree(alg, m) % 2 else 1
        k = (m, 0, 0)
        out[k] = out.get(k, 0) + sign * c / (j + 1)
    return DgaElement(alg, out)


def _substitute_t(e: DgaElement, value) -> DgaElement:
    value = Fraction(value)
    out = {}
    for (m, j, dt), c in e.terms.items():
        if dt:
            continue
        k = (m, 0, 0)
        out[k] = out.get(k, 0) + c * value ** j
    return DgaElement(e.alg, out)


@dataclass
class DgaMorphism:
    """Generator assignment extended multiplicatively; targets may involve t, dt."""

    source: FreeGCA
    target: FreeGCA
    images: dict

    def __post_init__(self):
        for g in self.source.names:
            self.images.setdefault(g, self.target.zero())
        for g, v in self.images.items():
            if g not in self.source.index:
                raise ValueError(f"unknown source generator {g!r}")
            if v.alg is not self.target:
                raise ValueError("image lives in the wrong algebra")
            i = self.source.index[g]
            if not v.is_zero() and v.degree() != self.source.degrees[i]:
                raise ValueError(f"image of {g} has degree {v.degree()}, expected {self.source.degrees[i]}")

    def apply(self, e: DgaElement) -> DgaElement:
        if e.alg is not self.source:
            raise ValueError("element is not in the source algebra")
        if e.has_t():
            raise ValueError("morphisms act on t-free elements")
        out = self.target.zero()
        for (m, _, _), c in e.terms.items():
            term = self.target.one()
            for i, p in enumerate(m):
                if p:
                    term = term * self.images[self.source.names[i]] ** p
            out = out + term.scale(c)
        return out

    def commutation_residuals(self):
        """``d f(g) - f(dg)`` for every generator g."""
        return {g: differential(self.images[g]) - self.apply(self.source.d_of(i))
                for i, g in enumerate(self.source.names)}

    def __eq__(self, other):
        return (isinstance(other, DgaMorphism) and self.source is other.source
                and self.target is other.target
                and all(self.images[g] == other.images[g] for g in self.source.names))

    def to_json(self):
        return {g: str(self.images[g]) for g in self.source.names}


DgaHomotopy = DgaMorphism


def endpoint_eval(h: DgaMorphism, end) -> DgaMorphism:
    """Set ``t = end`` and ``dt = 0``."""
    if end not in (0, 1):
        raise ValueError("end must be 0 or 1")
    return DgaMorphism(h.source, h.target, {g: _substitute_t(v, end) for g, v in h.images.items()})


@dataclass
class HomotopyReport:
    commutes: dict = field(default_factory=dict)     # generator -> residual string ("0" when fine)
    start: dict = field(default_factory=dict)
    end: dict = field(default_factory=dict)
    d_squared: list = field(default_factory=list)

    @property
    def passed(self):
        return (all(v == "0" for v in self.commutes.values()) and all(v == "0" for v in self.start.values())
                and all(v == "0" for v in self.end.values()) and not self.d_squared)

    def failures(self):
        out = [f"d h({g}) - h(d {g}) = {r}" for g, r in self.commutes.items() if r != "0"]
        out += [f"h({g})|t=0 - f0({g}) = {r}" for g, r in self.start.items() if r != "0"]
        out += [f"h({g})|t=1 - f1({g}) = {r}" for g, r in self.end.items() if r != "0"]
        out += [f"d^2 {g} != 0" for g in self.d_squared]
        return out

    def to_json(self):
        return {"passed": self.passed, "commutes": self.commutes, "start": self.start,
                "end": self.end, "d_squared": self.d_squared, "failures": self.failures()}


def verify_homotopy(h: DgaMorphism, f0: DgaMorphism, f1: DgaMorphism) -> HomotopyReport:
    """d-commutation on generators plus both endpoint equalities, as residuals."""
    rep = HomotopyReport()
    rep.d_squared = h.source.check_d_squared() + h.target.check_d_squared()
    for g, r in h.commutation_residuals().items():
        rep.commutes[g] = str(r)
    e0, e1 = endpoint_eval(h, 0), endpoint_eval(h, 1)
    for g in h.source.names:
        rep.start[g] = str(e0.images[g] - f0.images[g])
        rep.end[g] = str(e1.images[g] - f1.images[g])
    return rep


# -- two-stage models -----------------------------------------------------------

def _split_stages(model: FreeGCA):
    closed = [g for i, g in enumerate(model.names) if model.d_of(i).is_zero()]
    stage2 = [g for g in model.names if g not in closed]
    for g in stage2:
        dg = model.d_of(model.index[g])
        for (m, _, _), _c in dg.terms.items():
            if any(p and model.names[i] not in closed for i, p in enumerate(m)):
                raise TwoStageViolation(f"d{g} involves a generator outside the closed stage")
            if sum(m) < 2:
                raise TwoStageViolation(f"d{g} has a term of word length < 2")
    return closed, stage2


def build_two_stage_nullhomotopy(model: FreeGCA, check=True):
    """Nullhomotopy of the formal morphism ``x_i -> omega_i``, ``y_j -> nu_j``.

    Returns ``(h, f0, target)`` where the target algebra has generators
    ``omega_i, alpha_i`` (``d alpha_i = omega_i``), ``nu_j`` (``d nu_j = P_j(omega)``)
    and ``eta_j`` with ``d eta_j = (-1)^{n_j} (int_0^1 h(P_j) + nu_j)``.
    """
    closed, stage2 = _split_stages(model)
    deg = {g: model.degrees[model.index[g]] for g in model.names}
    gens = ([(f"omega_{x}", deg[x]) for x in closed] + [(f"alpha_{x}", deg[x] - 1) for x in closed]
            + [(f"nu_{y}", deg[y]) for y in stage2] + [(f"eta_{y}", deg[y] - 1) for y in stage2])
    gens = [(g, d) for g, d in gens if d >= 1 or not g.startswith("alpha_")]
    low = [x for x in closed if deg[x] - 1 < 1]
    if low:
        raise TwoStageViolation("closed generators need degree >= 2")
    target = FreeGCA(gens, name="nullhomotopy-target")
    for x in closed:
        target.set_differential(f"alpha_{x}", target.gen(f"omega_{x}"))
    images = {}
    for x in closed:
        n = deg[x]
        prof = [Fraction((-1) ** k * comb(n, k)) for k in range(n + 1)]          # (1-t)^n
        dprof = [Fraction((-1) ** n * n * (-1) ** k * comb(n - 1, k)) for k in range(n)]
        images[x] = (target.gen(f"omega_{x}") * target.profile(prof)
                     + target.gen(f"alpha_{x}") * target.profile(dprof, with_dt=True))
    partial = DgaMorphism(model, target, dict(images))
    omega_map = DgaMorphism(model, target, {x: target.gen(f"omega_{x}") for x in closed})
    for y in stage2:
        P = model.d_of(model.index[y])
        target.set_differential(f"nu_{y}", omega_map.apply(P))
        n = deg[y]
        eta_d = (integrate01(partial.apply(P)) + target.gen(f"nu_{y}")).scale((-1) ** n)
        target.set_differential(f"eta_{y}", eta_d)
        prof = [Fraction((-1) ** k * comb(n + 1, k)) for k in range(n + 2)]
        dprof = [Fraction((n + 1) * (-1) ** k * comb(n, k)) for k in range(n + 1)]
        images[y] = (target.gen(f"nu_{y}") * target.profile(prof)
                     + target.gen(f"eta_{y}") * target.profile(dprof, with_dt=True))
    h = DgaMorphism(model, target, images)
    f0 = DgaMorphism(model, target, {**{x: target.gen(f"omega_{x}") for x in closed},
                                     **{y: target.gen(f"nu_{y}") for y in stage2}})
    if check:
        for g, r in h.commutation_residuals().items():
            if not r.is_zero():
                raise VerificationFailure(g, r)
        bad = target.check_d_squared()
        if bad:
            raise VerificationFailure(bad[0], "d^2 != 0")
    return h, f0, target


def zero_morphism(source, target):
    return DgaMorphism(source, target, {})


def sphere_model():
    """<x_2, y_3 | dx = 0, dy = x^2>."""
    return FreeGCA([("x", 2), ("y", 3)], {"y": "x^2"}, name="S2")


def _monomials_of_degree(degrees, D, min_len=2):
    """Exponent vectors (odd exponents <= 1) of total degree D and word length >= min_len."""
    r = len(degrees)
    out = []
    for length in range(min_len, D // min(degrees) + 1):
        for combo in combinations_with_replacement(range(r), length):
            e = [0] * r
            for i in combo:
                e[i] += 1
            if any(degrees[i] % 2 and e[i] > 1 for i in range(r)):
                continue
            if sum(e[i] * degrees[i] for i in range(r)) == D:
                out.append(tuple(e))
    return out


def random_two_stage_model(rng: random.Random, max_closed=3, max_degree=8, max_stage2=2):
    """Random model: closed generators of degree >= 2, and P of word length >= 2."""
    for _ in range(1000):
        r = rng.randint(1, max_closed)
        degrees = [rng.randint(2, 5) for _ in range(r)]
        names = [f"x{i + 1}" for i in range(r)]
        cands = {}
        for D in range(4, max_degree + 2):
            ms = _monomials_of_degree(degrees, D)
            if ms:
                cands[D] = ms
        if not cands:
            continue
        gens = list(zip(names, degrees))
        diffs = {}
        for j in range(rng.randint(1, max_stage2)):
            D = rng.choice(sorted(cands))
            terms = []
            for m in cands[D]:
                c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                if c:
                    word = "*".join(f"{names[i]}^{p}" for i, p in enumerate(m) if p)
                    terms.append(f"({c})*{word}")
            if not terms:
                m = cands[D][0]
                terms.append("*".join(f"{names[i]}^{p}" for i, p in enumerate(m) if p))
            y = f"y{j + 1}"
            gens.append((y, D - 1))
            diffs[y] = " + ".join(terms)
        model = FreeGCA(gens, diffs, name="random-two-stage")
        if any(not model.d_of(model.index[g]).is_zero() for g, _ in gens[r:]):
            return model
    raise RuntimeError("could not draw a nontrivial model")


def homotopy_between_hopf_maps(p, q1, q2, dt_sign=-1):
    """Homotopy from x -> pb, y -> p^2 c + q1 ab to the same with q2.

    ``x -> pb + dt_sign ((q2 - q1) / 2p) a dt`` and
    ``y -> p^2 c + q1 ab (1 - t) + q2 ab t``; ``dt_sign = -1`` is the sign that
    commutes with d under the convention of this module.
    """
    p, q1, q2 = Fraction(p), Fraction(q1), Fraction(q2)
    if p == 0:
        raise ValueError("p must be nonzero")
    src = FreeGCA([("x", 4), ("y", 7)], {"y": "x^2"}, name="S4")
    tgt = FreeGCA([("a", 3), ("b", 4), ("c", 7)], {"c": "b^2"}, name="S3xS4")
    a, b, c = tgt.gen("a"), tgt.gen("b"), tgt.gen("c")
    ab = a * b
    hx = b.scale(p) + (a * tgt.dt()).scale(dt_sign * (q2 - q1) / (2 * p))
    hy = c.scale(p * p) + ab.scale(q1) * tgt.profile([1, -1]) + ab.scale(q2) * tgt.t()
    h = DgaMorphism(src, tgt, {"x": hx, "y": hy})
    f = lambda q: DgaMorphism(src, tgt, {"x": b.scale(p), "y": c.scale(p * p) + ab.scale(q)})
    return h, f(q1), f(q2)


# -- expression grammar ---------------------------------------------------------
#   expr   := term (('+' | '-') term)*
#   term   := ['-'] factor (('*' factor) | ('/' number))*
#   factor := number | name ['^' int] | '(' expr ')' ['^' int]
# names are generators of the algebra, or t and dt.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _Parser:
    def __init__(self, alg, text):
        self.alg = alg
        self.toks = []
        for m in _TOKEN.finditer(text.strip()):
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", int(num)))
            elif name is not None:
                self.toks.append(("name", name))
            elif op is not None and op.strip():
                self.toks.append(("op", op))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"unexpected token {tok[1]!r} at position {self.i}")
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            return self.alg.zero()
        e = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.i}")
        return e

    def expr(self):
        e = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self):
        neg = False
        while self.peek() in (("op", "-"), ("op", "+")):
            neg ^= self.take()[1] == "-"
        e = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            if op == "*":
                e = e * self.factor()
            else:
                _, v = self.take("num")
                if v == 0:
                    raise ParseError("division by zero")
                e = e.scale(Fraction(1, v))
        return -e if neg else e

    def power(self, e):
        if self.peek() == ("op", "^"):
            self.take()
            _, k = self.take("num")
            return e ** k
        return e

    def factor(self):
        kind, v = self.peek()
        if kind == "num":
            self.take()
            return self.alg.one().scale(v)
        if kind == "name":
            self.take()
            if v == "t":
                base = self.alg.t()
            elif v == "dt":
                base = self.alg.dt()
            elif v in self.alg.index:
                base = self.alg.gen(v)
            else:
                raise ParseError(f"unknown generator {v!r}")
            return self.power(base)
        if (kind, v) == ("op", "("):
            self.take()
            e = self.expr()
            self.take("op", ")")
            return self.power(e)
        raise ParseError(f"unexpected token {v!r}")


def model_from_json(data) -> FreeGCA:
    """``{"generators": [{"name", "degree", "d"}]}``; ``d`` may be omitted for closed generators."""
    gens = data["generators"]
    alg = FreeGCA([(g["name"], g["degree"]) for g in gens],
                  {g["name"]: g.get("d", "0") for g in gens}, name=data.get("name", ""))
    alg._resolve()
    return alg


def homotopy_from_json(source: FreeGCA, data):
    """``{"target": model, "h": {gen: expr}, "f0": {...}, "f1": {...}}``; missing f1 means zero."""
    target = model_from_json(data["target"])

    def mor(key):
        return DgaMorphism(source, target, {g: target.parse(e) for g, e in data.get(key, {}).items()})
    return mor("h"), mor("f0"), mor("f1"), target
