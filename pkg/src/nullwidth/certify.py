"""Bounded nullhomotopy certificates for degree cochains on subdivided 3-spheres.

Pipeline for a degree cochain w with vanishing Hopf data:

    a        integral l-infinity optimal filler, delta a = w
    hat_a    rounded time profile floor((1 - t)^2 a) on the product S^3 x [0, 1]
    forms    omega_hat = W(delta hat_a), alpha_hat its time antiderivative,
             Delta alpha = alpha_hat - (1 - t)^2 alpha, Delta omega = d Delta alpha
    eta      d eta = alpha ^ omega, split as a local relative primitive plus W(e')
    beta     (2 omega_hat - Delta omega) ^ Delta alpha + 4 (1 - t)^3 dt ^ eta,
             so that d beta = omega_hat ^ omega_hat
    o, c     integral surrogate of int omega_hat^2 and a relative filler of the gap
    b'       int beta + c, with delta b' = o
    b        integral cochain from prefix rounding of b' along time columns
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor

from .complexes import (Cochain, ProductComplex, SimplicialComplex, boundary_sphere_complex,
                        coboundary, edgewise_subdivide, product_with_interval,
                        time_slice)
from .fill import fill_linf, fill_linf_integral, fill_linf_real, nearest_integral_cocycle
from .forms import (PolyForm, PrismForm, boundary_trace_zero, exterior_d,
                    integrate, local_relative_primitive, restrict_slice, time_antiderivative,
                    time_weighted_lift, wedge, whitney, whitney_product)
from .hopf import hopf_form, local_cup, local_helicity, tet_hopf_terms

__all__ = [
    "CertifyConfig",
    "DegreeMap",
    "Certificate",
    "VerificationReport",
    "NotNullhomotopic",
    "GenerationExhausted",
    "IdentityFailure",
    "subdivided_sphere",
    "default_T",
    "generate_instance",
    "build_hat_a",
    "build_hat_forms",
    "solve_eta",
    "assemble_beta",
    "integral_surrogate",
    "round_time_cochain",
    "build_certificate",
    "verify_certificate",
    "scale_study",
    "scale_regression",
    "SCALE_CHECK_COLUMNS",
    "CSV_COLUMNS",
    "inject_fault",
    "FAULT_TARGETS",
    "rematerialize",
]

FORMAT_VERSION = 1
ALPHA_PROFILE = (1, -2, 1)          # (1 - t)^2
ETA_PROFILE = (4, -12, 12, -4)      # 4 (1 - t)^3


class NotNullhomotopic(Exception):
    pass


class GenerationExhausted(Exception):
    pass


class IdentityFailure(Exception):
    pass


@dataclass
class CertifyConfig:
    """Knobs of the pipeline; defaults reproduce the documented construction."""

    T_const: Fraction = Fraction(1)
    T: int | None = None
    strategy: str = "hopf-repair"
    density: Fraction = Fraction(1, 2)
    max_tries: int = 50


@lru_cache(maxsize=None)
def subdivided_sphere(L: int) -> SimplicialComplex:
    """The L-fold edgewise subdivision of the boundary of the 4-simplex."""
    return edgewise_subdivide(boundary_sphere_complex(3), L)


@lru_cache(maxsize=None)
def _product(L: int, T: int) -> ProductComplex:
    return product_with_interval(subdivided_sphere(L), T)


def default_T(L, T_const=1):
    return max(1, ceil(Fraction(T_const) * L * L))


@dataclass
class DegreeMap:
    host: SimplicialComplex
    w: Cochain
    L: int
    hopf: Fraction = Fraction(0)
    helicity: Fraction = Fraction(0)
    seed: int | None = None


# -- instance generation --------------------------------------------------------

class _InvariantTracker:
    """Incremental values of the two quadratic invariants of ``delta a``."""

    def __init__(self, X, a):
        self.X = X
        self.a = dict(a)
        self.tets = tet_hopf_terms(X)
        self.by_edge = [[] for _ in range(X.count(1))]
        for t, (_, edges) in enumerate(self.tets):
            for e in edges:
                self.by_edge[e].append(t)
        self.q = Fraction(0)
        self.h = Fraction(0)
        for t in range(len(self.tets)):
            dq, dh = self._local(t)
            self.q += dq
            self.h += dh

    def _local(self, t, override=None):
        sign, edges = self.tets[t]
        vals = [self.a.get(e, 0) if override is None or e != override[0] else override[1] for e in edges]
        if not any(vals):
            return 0, 0
        return sign * local_cup(*vals), sign * local_helicity(*vals)

    def delta(self, e, v):
        dq = dh = Fraction(0)
        for t in self.by_edge[e]:
            q0, h0 = self._local(t)
            q1, h1 = self._local(t, (e, v))
            dq += q1 - q0
            dh += h1 - h0
        return dq, dh

    def set(self, e, v):
        dq, dh = self.delta(e, v)
        self.q += dq
        self.h += dh
        if v:
            self.a[e] = v
        else:
            self.a.pop(e, None)


def _feasible_change(X, dvals, e, old, new):
    for t, sg in X.cofaces(1)[e]:
        if abs(dvals.get(t, 0) + sg * (new - old)) > 1:
            return False
    return True


def _apply(X, dvals, e, old, new):
    for t, sg in X.cofaces(1)[e]:
        v = dvals.get(t, 0) + sg * (new - old)
        if v:
            dvals[t] = v
        else:
            dvals.pop(t, None)


def generate_instance(L: int, seed: int, strategy: str = "hopf-repair",
                      density=Fraction(1, 2), max_tries: int = 50, repair_steps: int = 4000) -> DegreeMap:
    """Random degree cochain ``w = delta a0`` with ``||w|| <= 1`` on the level-L sphere.

    ``coboundary-sample`` draws a0 edge by edge (value +-1 with probability
    ``density``, kept only if the bound on w survives).  ``hopf-repair`` then
    runs a local search over edge values until both the cup-product Hopf
    number and the Whitney helicity of w vanish, restarting with a derived
    seed when stuck.
    """
    if L < 1:
        raise ValueError("L must be a positive integer")
    X = subdivided_sphere(L)
    rng = random.Random(seed)
    for attempt in range(max_tries):
        a = {}
        dvals = {}
        order = list(range(X.count(1)))
        rng.shuffle(order)
        for e in order:
            if rng.random() < density:
                v = rng.choice((1, -1))
                if _feasible_change(X, dvals, e, 0, v):
                    _apply(X, dvals, e, 0, v)
                    a[e] = v
        if strategy == "coboundary-sample":
            break
        if strategy != "hopf-repair":
            raise ValueError(f"unknown strategy {strategy!r}")
        tr = _InvariantTracker(X, a)
        steps = 0
        while (tr.q or tr.h) and steps < repair_steps:
            steps += 1
            best = None
            cost0 = abs(tr.q) + 3 * abs(tr.h)
            for e in rng.sample(range(X.count(1)), min(48, X.count(1))):
                old = tr.a.get(e, 0)
                for new in (-1, 0, 1):
                    if new == old or not _feasible_change(X, dvals, e, old, new):
                        continue
                    dq, dh = tr.delta(e, new)
                    cost = abs(tr.q + dq) + 3 * abs(tr.h + dh)
                    if best is None or cost < best[0]:
                        best = (cost, e, new)
            if best is None:
                break
            cost, e, new = best
            if cost >= cost0 and rng.random() < 0.7:
                continue
            old = tr.a.get(e, 0)
            _apply(X, dvals, e, old, new)
            tr.set(e, new)
        if not (tr.q or tr.h):
            a = tr.a
            break
    else:
        raise GenerationExhausted(f"no instance with vanishing Hopf data after {max_tries} attempts")
    a_c = Cochain(X, 1, a, "Z")
    w = coboundary(a_c)
    q, h = hopf_form(a_c)
    return DegreeMap(X, w, L, q, h, seed)


# -- the pipeline ---------------------------------------------------------------

def build_hat_a(a: Cochain, T: int, P: ProductComplex | None = None) -> Cochain:
    """``floor((1 - i/T)^2 <a, e>)`` on the slice edges ``e x {i}``, zero on vertical edges."""
    if T < 1:
        raise ValueError("T must be a positive integer")
    X = a.host
    if P is None:
        P = product_with_interval(X, T)
    vals = {}
    T2 = T * T
    for i in range(T + 1):
        f = (T - i) * (T - i)
        for e, v in a.values.items():
            x = (f * int(v)) // T2
            if x:
                vals[P.slice_index(1, e, i)] = x
    return Cochain(P, 1, vals, "Z")


@dataclass
class HatForms:
    omega_hat: PrismForm
    alpha_hat: PrismForm
    alpha_bar: PrismForm
    delta_alpha: PrismForm
    delta_omega: PrismForm
    alpha: PolyForm
    omega: PolyForm


def build_hat_forms(hat_a: Cochain, check=True) -> HatForms:
    """omega_hat, its time antiderivative, and the bounded differences to the smooth profile."""
    P = hat_a.host
    omega_hat = whitney_product(coboundary(hat_a))
    alpha_hat = time_antiderivative(omega_hat, check=check)
    alpha = restrict_slice(alpha_hat, 0)
    omega = exterior_d(alpha)
    alpha_bar = time_weighted_lift(alpha, P, ALPHA_PROFILE)
    delta_alpha = alpha_hat - alpha_bar
    delta_omega = exterior_d(delta_alpha)
    return HatForms(omega_hat, alpha_hat, alpha_bar, delta_alpha, delta_omega, alpha, omega)


@dataclass
class EtaData:
    eta: PolyForm
    eta_loc: PolyForm
    e_prime: Cochain
    z: Cochain


def solve_eta(alpha: PolyForm, omega: PolyForm, degree_cap=None) -> EtaData:
    """``eta`` with ``d eta = alpha ^ omega``: local relative primitives plus W(e')."""
    prod = wedge(alpha, omega)
    z = integrate(prod)
    e_prime = fill_linf_real(z).filler
    mu = prod - whitney(z)
    cap = degree_cap
    while True:
        try:
            eta_loc = local_relative_primitive(mu, degree_cap=cap)
            break
        except Exception as exc:  # DegreeCapExceeded: raise the cap and retry
            from .forms import DegreeCapExceeded
            if not isinstance(exc, DegreeCapExceeded):
                raise
            cap = (cap or 2) + 1
            if cap > 8:
                raise
    eta = eta_loc + whitney(e_prime)
    return EtaData(eta, eta_loc, e_prime, z)


def assemble_beta(omega_hat: PrismForm, delta_alpha: PrismForm, delta_omega: PrismForm,
                  eta: PolyForm, nu_profile=None):
    """beta = (2 omega_hat - Delta omega) ^ Delta alpha + 4(1-t)^3 dt ^ eta; returns (beta, int beta)."""
    P = omega_hat.host
    profile = ETA_PROFILE if nu_profile is None else nu_profile
    first = wedge(omega_hat.scale(2) - delta_omega, delta_alpha)
    second = time_weighted_lift(eta, P, profile, with_dt=True)
    beta = first + second
    return beta, integrate(beta)


def _oriented_sum(c):
    orient = c.host.orientation
    return sum((orient[i] * v for i, v in c.values.items()), Fraction(0))


def integral_surrogate(h4: Cochain):
    """Integral o within 1 of h4 with zero oriented total, and c with delta c = o - h4.

    c vanishes on the end slices of the product.
    """
    P = h4.host
    orient = P.orientation
    if _oriented_sum(h4) != 0:
        raise ValueError("oriented total of the 4-cochain is not zero")
    g = {i: orient[i] * Fraction(v) for i, v in h4.values.items()}
    fl = {i: floor(v) for i, v in g.items()}
    k = -sum(fl.values())
    frac = sorted(((g[i] - fl[i], i) for i in g if g[i] != fl[i]), key=lambda x: (-x[0], x[1]))
    up = {i for _, i in frac[:k]}
    o_vals = {}
    for i in g:
        v = fl[i] + (1 if i in up else 0)
        if v:
            o_vals[i] = orient[i] * v
    o = Cochain(P, 4, o_vals, "Z")
    gap = o.as_ring("Q") - h4
    ends = P.end_slice_cells(3)
    c = fill_linf_real(gap, boundary_zero_cells=ends).filler
    return o, c


@dataclass
class RoundResult:
    b: Cochain
    b0: Cochain
    K: Fraction
    fallback: bool


def round_time_cochain(b_prime: Cochain, o: Cochain) -> RoundResult:
    """Integral b with delta b = o and zero end slices, obtained by prefix rounding of b'."""
    P = b_prime.host
    X = P.base
    T = P.T
    for cell in P.end_slice_cells(3):
        if b_prime.values.get(cell):
            raise ValueError("b' does not vanish on the end slices")
    if coboundary(b_prime) != o.as_ring("Q"):
        raise ValueError("delta b' differs from o")
    agg = time_slice(b_prime, "aggregate")
    O = time_slice(o, "aggregate")
    fallback = not O.is_zero()
    if not fallback:
        approx = nearest_integral_cocycle(agg)
        b0 = approx.cocycle
    else:
        b0 = fill_linf(O, "Z", center=agg.values).filler
    K = (b0.as_ring("Q") - agg).norm()
    vals = {}
    m2 = X.count(2)
    for q in range(m2):
        prev_round = 0
        prefix = Fraction(0)
        for i in range(T):
            prefix += b_prime.values.get(P.prism_index(3, q, i), 0)
            cur = ceil(prefix) if i < T - 1 else int(b0.values.get(q, 0))
            v = cur - prev_round
            if v:
                vals[P.prism_index(3, q, i)] = v
            prev_round = cur
    # slice values from delta b = o on every prism sigma x I_i
    bd3 = X.boundary(3)
    for sigma in range(X.count(3)):
        cur = 0
        for i in range(T):
            side = sum(sg * vals.get(P.prism_index(3, q, i), 0) for q, sg in bd3[sigma])
            cur = cur + side - o.values.get(P.prism_index(4, sigma, i), 0)
            if i + 1 < T and cur:
                vals[P.slice_index(3, sigma, i + 1)] = cur
        if cur != 0:
            raise ArithmeticError("column sums of o are inconsistent with the aggregate")
    b = Cochain(P, 3, vals, "Z")
    return RoundResult(b, b0, K, fallback)


# -- certificates ---------------------------------------------------------------

@dataclass
class Certificate:
    L: int
    T: int
    w: Cochain
    a: Cochain
    hat_a: Cochain
    e_prime: Cochain
    eta_loc: PolyForm
    c: Cochain
    b_prime: Cochain
    o: Cochain
    b: Cochain
    b0: Cochain
    K: Fraction
    fallback: bool
    norms: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    # derived objects, rebuilt on load
    forms: HatForms | None = None
    eta: PolyForm | None = None
    beta: PrismForm | None = None
    h4: Cochain | None = None

    @property
    def host(self):
        return self.w.host

    @property
    def product(self):
        return self.hat_a.host

    def to_json(self):
        def cj(c):
            return c.to_json()
        return {
            "format": "nullwidth-certificate",
            "format_version": FORMAT_VERSION,
            "config": self.config,
            "L": self.L,
            "T": self.T,
            "complex": self.host.to_json(),
            "w": cj(self.w), "a": cj(self.a), "hat_a": cj(self.hat_a),
            "e_prime": cj(self.e_prime), "eta_loc": self.eta_loc.to_json(),
            "c": cj(self.c), "b_prime": cj(self.b_prime), "o": cj(self.o),
            "b": cj(self.b), "b0": cj(self.b0),
            "K": _fmt(self.K), "fallback": self.fallback,
            "norms": {k: _fmt(v) for k, v in self.norms.items()},
        }

    @classmethod
    def from_json(cls, data):
        if data.get("format") != "nullwidth-certificate":
            raise ValueError("not a certificate file")
        L, T = int(data["L"]), int(data["T"])
        X = subdivided_sphere(L)
        if X.to_json()["simplices"] != data["complex"]["simplices"]:
            X = SimplicialComplex.from_json(data["complex"])
            P = product_with_interval(X, T)
        else:
            P = _product(L, T)
        cx = lambda key, host: Cochain.from_json(host, data[key])
        return cls(
            L=L, T=T, w=cx("w", X), a=cx("a", X), hat_a=cx("hat_a", P), e_prime=cx("e_prime", X),
            eta_loc=PolyForm.from_json(X, data["eta_loc"]), c=cx("c", P), b_prime=cx("b_prime", P),
            o=cx("o", P), b=cx("b", P), b0=cx("b0", X), K=Fraction(data["K"]),
            fallback=bool(data["fallback"]),
            norms={k: Fraction(v) for k, v in data.get("norms", {}).items()},
            config=data.get("config", {}),
        )


def _fmt(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def build_certificate(m: DegreeMap, T: int | None = None, T_const=1, check=True) -> Certificate:
    """Run the full pipeline for a degree cochain with vanishing Hopf data."""
    X, w, L = m.host, m.w, m.L
    timing = {}
    t0 = time.perf_counter()
    if not coboundary(w).is_zero():
        raise ValueError("degree cochain is not a cocycle")
    if w.norm() > 1:
        raise ValueError("degree cochain has entries outside [-1, 1]")
    fa = fill_linf_integral(w.as_ring("Z"))
    a = fa.filler
    q, h = hopf_form(a.as_ring("Q"))
    if q != 0:
        raise NotNullhomotopic(f"Hopf number {q} is nonzero")
    if h != 0:
        raise NotNullhomotopic(f"Whitney helicity {h} is nonzero; the eta equation has no solution")
    T = T if T is not None else default_T(L, T_const)
    P = _product(L, T) if X is subdivided_sphere(L) else product_with_interval(X, T)
    hat_a = build_hat_a(a, T, P)
    timing["fill"] = time.perf_counter() - t0
    t1 = time.perf_counter()
    forms = build_hat_forms(hat_a, check=check)
    eta_data = solve_eta(forms.alpha, forms.omega)
    beta, b_pre = assemble_beta(forms.omega_hat, forms.delta_alpha, forms.delta_omega, eta_data.eta)
    h4 = integrate(wedge(forms.omega_hat, forms.omega_hat))
    timing["forms"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    o, c = integral_surrogate(h4)
    b_prime = b_pre + c
    rr = round_time_cochain(b_prime, o)
    timing["rounding"] = time.perf_counter() - t2
    cert = Certificate(
        L=L, T=T, w=w, a=a, hat_a=hat_a, e_prime=eta_data.e_prime, eta_loc=eta_data.eta_loc,
        c=c, b_prime=b_prime, o=o, b=rr.b, b0=rr.b0, K=rr.K, fallback=rr.fallback,
        config={"L": L, "T": T, "T_const": str(T_const), "seed": m.seed},
        forms=forms, eta=eta_data.eta, beta=beta, h4=h4,
    )
    cert.norms = _norms(cert)
    timing["total"] = time.perf_counter() - t0
    cert.timing = timing
    return cert


def _norms(cert):
    h4 = cert.h4
    return {
        "w": cert.w.norm(),
        "a": cert.a.norm(),
        "delta_hat_a": coboundary(cert.hat_a).norm(),
        "e_prime": cert.e_prime.norm(),
        "z": integrate(wedge(cert.forms.alpha, cert.forms.omega)).norm() if cert.forms else Fraction(0),
        "omega_hat_sq": h4.norm(),
        "b_prime": cert.b_prime.norm(),
        "b": cert.b.norm(),
        "b_minus_b_prime": (cert.b.as_ring("Q") - cert.b_prime).norm(),
        "o_minus_h4": (cert.o.as_ring("Q") - h4).norm(),
        "c": cert.c.norm(),
        "K": cert.K,
    }


def rematerialize(cert: Certificate, check=False):
    """Rebuild the forms of a certificate from its stored cochains."""
    forms = build_hat_forms(cert.hat_a, check=check)
    eta = cert.eta_loc + whitney(cert.e_prime)
    beta, _ = assemble_beta(forms.omega_hat, forms.delta_alpha, forms.delta_omega, eta)
    h4 = integrate(wedge(forms.omega_hat, forms.omega_hat))
    cert.forms, cert.eta, cert.beta, cert.h4 = forms, eta, beta, h4
    return cert


@dataclass
class VerificationReport:
    checks: dict = field(default_factory=dict)   # identity name -> bool
    details: dict = field(default_factory=dict)  # identity name -> message
    norms: dict = field(default_factory=dict)
    timing: float = 0.0

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def failed(self):
        return [k for k, v in self.checks.items() if not v]

    def to_json(self):
        return {"passed": self.passed, "checks": self.checks, "failed": self.failed,
                "details": self.details, "norms": {k: _fmt(v) for k, v in self.norms.items()},
                "seconds": round(self.timing, 3)}


IDENTITIES = (
    "delta_a", "w_bounds", "hat_a_definition", "hat_a_ends", "hat_a_norm",
    "d_alpha_hat", "int_alpha_hat", "delta_forms_ends", "delta_alpha_residue", "d_eta", "d_beta",
    "beta_ends", "stokes_beta", "hopf_total", "o_bound", "b_prime_definition", "delta_b_prime",
    "b_prime_ends", "aggregate", "delta_b", "b_ends", "b_rounding", "norm_ledger",
)


def _slice_cochain_zero(c, node):
    return time_slice(c, "restrict", node).is_zero()


def verify_certificate(cert: Certificate) -> VerificationReport:
    """Recompute every identity of the certificate from its stored cochains."""
    t0 = time.perf_counter()
    rep = VerificationReport()
    X, P, T = cert.host, cert.product, cert.T
    chk, det = rep.checks, rep.details

    def record(name, ok, msg=""):
        chk[name] = bool(ok)
        if not ok and msg:
            det[name] = msg

    w, a, hat_a = cert.w, cert.a, cert.hat_a
    record("delta_a", coboundary(a) == w, "delta a differs from w")
    record("w_bounds", coboundary(w).is_zero() and w.norm() <= 1, "w is not a cocycle bounded by 1")
    record("hat_a_definition", build_hat_a(a, T, P) == hat_a, "hat_a differs from floor((1-t)^2 a)")
    dh = coboundary(hat_a)
    ends_ok = (time_slice(dh, "restrict", 0) == w and _slice_cochain_zero(hat_a, T)
               and _slice_cochain_zero(dh, T) and time_slice(hat_a, "restrict", 0) == a)
    record("hat_a_ends", ends_ok, "end-slice conditions on hat_a fail")
    record("hat_a_norm", dh.norm() <= 3, f"||delta hat_a|| = {dh.norm()} > 3")

    omega_hat = whitney_product(dh)
    try:
        alpha_hat = time_antiderivative(omega_hat, check=True)
    except Exception as exc:
        record("d_alpha_hat", False, str(exc))
        alpha_hat = time_antiderivative(omega_hat, check=False)
    else:
        record("d_alpha_hat", exterior_d(alpha_hat) == omega_hat, "d alpha_hat differs from omega_hat")
    record("int_alpha_hat", integrate(alpha_hat) == hat_a.as_ring("Q"), "int alpha_hat differs from hat_a")
    alpha = restrict_slice(alpha_hat, 0)
    omega = exterior_d(alpha)
    delta_alpha = alpha_hat - time_weighted_lift(alpha, P, ALPHA_PROFILE)
    delta_omega = exterior_d(delta_alpha)
    ok = all(restrict_slice(f, node).is_zero() for f in (delta_alpha, delta_omega) for node in (0, T))
    record("delta_forms_ends", ok, "Delta alpha or Delta omega nonzero on an end slice")
    residue = integrate(delta_alpha).norm()
    record("delta_alpha_residue", residue < 1, f"||int Delta alpha|| = {residue} is not below 1")

    eta = cert.eta_loc + whitney(cert.e_prime)
    n = X.dim
    traces_ok = all(boundary_trace_zero(terms, n) for terms in cert.eta_loc.cells.values())
    d_ok = exterior_d(eta) == wedge(alpha, omega)
    record("d_eta", traces_ok and d_ok,
           "eta is not a global form (nonzero local boundary trace)" if not traces_ok
           else "d eta differs from alpha ^ omega")

    beta, b_pre = assemble_beta(omega_hat, delta_alpha, delta_omega, eta)
    sq = wedge(omega_hat, omega_hat)
    record("d_beta", exterior_d(beta) == sq, "d beta differs from omega_hat ^ omega_hat")
    record("beta_ends", restrict_slice(beta, 0).is_zero() and restrict_slice(beta, T).is_zero(),
           "beta nonzero on an end slice")
    h4 = integrate(sq)
    record("stokes_beta", coboundary(b_pre) == h4, "delta int beta differs from int omega_hat^2")
    record("hopf_total", _oriented_sum(h4) == 0, f"oriented total {_oriented_sum(h4)} of int omega_hat^2")
    o = cert.o
    record("o_bound", (o.as_ring("Q") - h4).norm() <= 1 and _oriented_sum(o) == 0,
           "o is not an integral rounding of int omega_hat^2 with zero total")
    ends3 = P.end_slice_cells(3)
    c_ok = not any(cert.c.values.get(x) for x in ends3)
    record("b_prime_definition", cert.b_prime == b_pre + cert.c and c_ok, "b' differs from int beta + c")
    bp = cert.b_prime
    record("delta_b_prime", coboundary(bp) == o.as_ring("Q"), "delta b' differs from o")
    record("b_prime_ends", not any(bp.values.get(x) for x in ends3), "b' nonzero on an end slice")
    agg = time_slice(bp, "aggregate")
    K = (cert.b0.as_ring("Q") - agg).norm()
    O = time_slice(o, "aggregate")
    agg_ok = (coboundary(cert.b0) == O and time_slice(cert.b, "aggregate") == cert.b0
              and K == cert.K and cert.b0.is_integral())
    record("aggregate", agg_ok, "time aggregate of b does not match b0 or K")
    b = cert.b
    record("delta_b", b.is_integral() and coboundary(b) == o, "delta b differs from o")
    record("b_ends", not any(b.values.get(x) for x in ends3), "b nonzero on an end slice")
    bound = max(K + 1, Fraction(4))
    diff = (b.as_ring("Q") - bp).norm()
    record("b_rounding", diff <= bound and b.norm() <= bp.norm() + bound,
           f"||b - b'|| = {diff} exceeds max(K+1, 4) = {bound}")
    cert_probe = Certificate(L=cert.L, T=T, w=w, a=a, hat_a=hat_a, e_prime=cert.e_prime,
                             eta_loc=cert.eta_loc, c=cert.c, b_prime=bp, o=o, b=b, b0=cert.b0,
                             K=K, fallback=cert.fallback, h4=h4,
                             forms=HatForms(omega_hat, alpha_hat, None, delta_alpha, delta_omega,
                                            alpha, omega))
    norms = _norms(cert_probe)
    rep.norms = norms
    if cert.norms:
        mism = [k for k in cert.norms if k in norms and norms[k] != cert.norms[k]]
        record("norm_ledger", not mism, f"recorded norms differ: {mism}")
    else:
        record("norm_ledger", True)
    rep.timing = time.perf_counter() - t0
    return rep


# -- scale study ----------------------------------------------------------------

CSV_COLUMNS = ["L", "T", "w_norm", "a_norm", "a_norm_over_L", "delta_hat_a_norm", "e_prime_norm",
               "e_prime_norm_over_L2", "max_abs_int_omega_hat_sq", "b_prime_norm", "b_norm",
               "runtime_s"]


def scale_study(L_list, seeds, T_const=1, base_seed=0, verify=False, jobs=1, log=None):
    """One CSV row per (L, seed); per-instance errors are reported as rows with an error field."""
    tasks = [(L, base_seed + s, T_const, verify) for L in L_list for s in range(seeds)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_study_row, tasks))
    else:
        rows = []
        for t in tasks:
            rows.append(_study_row(t))
            if log:
                log(rows[-1])
    return rows


def _study_row(task):
    L, seed, T_const, verify = task
    t0 = time.perf_counter()
    row = {"L": L, "seed": seed}
    try:
        m = generate_instance(L, seed)
        cert = build_certificate(m, T_const=T_const)
        if verify:
            rep = verify_certificate(cert)
            if not rep.passed:
                raise IdentityFailure(",".join(rep.failed))
        n = cert.norms
        row.update({
            "T": cert.T, "w_norm": n["w"], "a_norm": n["a"], "a_norm_over_L": Fraction(n["a"]) / L,
            "delta_hat_a_norm": n["delta_hat_a"], "e_prime_norm": n["e_prime"],
            "e_prime_norm_over_L2": Fraction(n["e_prime"]) / (L * L), "max_abs_int_omega_hat_sq": n["omega_hat_sq"],
            "b_prime_norm": n["b_prime"], "b_norm": n["b"],
        })
        row["error"] = ""
    except Exception as exc:  # recorded, the study continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["runtime_s"] = round(time.perf_counter() - t0, 3)
    return row


SCALE_CHECK_COLUMNS = ("a_norm_over_L", "e_prime_norm_over_L2", "max_abs_int_omega_hat_sq")


def scale_regression(rows, columns=SCALE_CHECK_COLUMNS, tolerance=Fraction(23, 20)):
    """Check that normalized norms do not grow with L.

    The constant for each column is fitted as the maximum over all levels
    below the largest one; the largest level passes if its maximum stays
    within ``tolerance`` times that constant.  Values may be Fractions or
    strings as read back from the CSV.

    Returns
    -------
    dict
        ``column -> {"per_L": {L: max}, "constant": C, "last": value, "ok": bool}``
        plus ``"errors"``, the number of rows that carry an error message.
    """
    good = [r for r in rows if not r.get("error")]
    levels = sorted({int(r["L"]) for r in good})
    out = {"errors": len(rows) - len(good)}
    if len(levels) < 2:
        raise ValueError("need rows for at least two levels")
    for col in columns:
        per_L = {L: max(Fraction(r[col]) for r in good if int(r["L"]) == L) for L in levels}
        const = max(per_L[L] for L in levels[:-1])
        last = per_L[levels[-1]]
        out[col] = {"per_L": per_L, "constant": const, "last": last, "ok": last <= tolerance * const}
    return out


# -- fault injection ------------------------------------------------------------

FAULT_TARGETS = {"b": "delta_b", "eta": "d_eta", "hat_a": "hat_a_definition"}


def inject_fault(cert: Certificate, kind: str, rng: random.Random) -> Certificate:
    """Copy of ``cert`` with one entry of b, eta (its local part) or hat_a changed.

    The identity expected to catch the fault is ``FAULT_TARGETS[kind]``.
    """
    import copy

    bad = copy.copy(cert)
    bad.norms = dict(cert.norms)
    if kind in ("b", "hat_a"):
        c = getattr(cert, kind)
        cells = sorted(c.values) or [0]
        if kind == "hat_a":
            # slice edges only; vertical edges carry no data
            n1 = c.host.n_slices(1)
            cells = [i for i in cells if i < n1] or list(range(min(n1, 8)))
        i = rng.choice(cells)
        vals = dict(c.values)
        vals[i] = vals.get(i, 0) + rng.choice((-1, 1))
        setattr(bad, kind, Cochain(c.host, c.degree, vals, c.ring))
    elif kind == "eta":
        el = cert.eta_loc
        cells = {t: dict(terms) for t, terms in el.cells.items()}
        if cells:
            t = rng.choice(sorted(cells))
            key = rng.choice(sorted(cells[t]))
        else:
            t = 0
            key = next(iter(whitney(Cochain(el.host, el.degree, {0: 1})).cells[0]))
            cells[t] = {}
        cells[t][key] = cells[t].get(key, 0) + Fraction(rng.choice((-1, 1)), rng.randint(1, 4))
        if not cells[t][key]:
            cells[t][key] = Fraction(1, 5)
        bad.eta_loc = PolyForm(el.host, el.degree, cells)
    else:
        raise ValueError(f"unknown fault kind {kind!r}")
    return bad
