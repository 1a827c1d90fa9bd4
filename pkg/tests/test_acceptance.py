"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""
import csv
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import certificate
from nullwidth.certify import (FAULT_TARGETS, generate_instance, inject_fault,
                               scale_regression, scale_study, subdivided_sphere, verify_certificate)
from nullwidth.cli import study_csv
from nullwidth.complexes import Cochain, coboundary, product_with_interval, time_slice
from nullwidth.dga import (build_two_stage_nullhomotopy, homotopy_between_hopf_maps, random_two_stage_model,
                           sphere_model, verify_homotopy, zero_morphism)
from nullwidth.fill import fill_linf_integral, fill_linf_real
from nullwidth.forms import exterior_d, integrate, wedge, whitney, whitney_product
from nullwidth.hopf import hopf_cup, hopf_linking_oracle, simplicial_hopf_map

ROOT = Path(__file__).resolve().parents[1]
CERT_SEEDS = range(5)


@pytest.fixture
def report(capsys):
    def emit(n, name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail
    return emit


def _oriented_total(c):
    X = c.host
    return sum((X.orientation[i] * v for i, v in c.values.items()), Fraction(0))


def _unit_coboundaries(L, count, base):
    out = []
    seed = base
    while len(out) < count:
        m = generate_instance(L, seed, strategy="coboundary-sample")
        seed += 1
        if m.w.norm() == 1:
            out.append(m.w)
    return out


def test_01_de_rham_round_trip(report):
    bad = 0
    total = 0
    for L in (1, 2, 3):
        X = subdivided_sphere(L)
        rng = random.Random(L)
        for k in range(4):
            for _ in range(100):
                c = Cochain(X, k, {i: rng.randint(-5, 5) for i in range(X.count(k))})
                W = whitney(c)
                total += 1
                bad += integrate(W) != c or exterior_d(W) != whitney(coboundary(c))
    report(1, "de Rham round trip", bad == 0, f"{total - bad}/{total} cochains exact")


def test_02_stokes_engine(report):
    rng = random.Random(2)
    bad = 0
    for trial in range(50):
        L = 1 + trial % 2
        X = subdivided_sphere(L)
        if trial % 2:
            P = product_with_interval(X, 2)
            p = rng.randint(0, 3)
            rand = lambda k: Cochain(P, k, {i: rng.randint(-2, 2) for i in range(P.count(k))})
            f = wedge(whitney_product(rand(p)), whitney_product(rand(3 - p)))
        else:
            p = rng.randint(0, 2)
            rand = lambda k: Cochain(X, k, {i: rng.randint(-2, 2) for i in range(X.count(k))})
            f = wedge(whitney(rand(p)), whitney(rand(2 - p)))
        bad += coboundary(integrate(f)) != integrate(exterior_d(f))
    report(2, "Stokes engine", bad == 0, f"{50 - bad}/50 forms satisfy delta(int f) = int(df)")


def test_03_whitney_hopf_vanishing(report):
    values = []
    for L in (1, 2):
        for w in _unit_coboundaries(L, 25, 1000):
            a = fill_linf_integral(w.as_ring("Z")).filler
            values.append(_oriented_total(integrate(wedge(whitney(a), whitney(w)))))
    nonzero = [v for v in values if v != 0]
    report(3, "Whitney Hopf vanishing", not nonzero,
           f"{len(values) - len(nonzero)}/{len(values)} integrals vanish; nonzero examples "
           f"{sorted({str(v) for v in nonzero})[:5]}")


def test_04_coisoperimetry_scaling(report):
    ratios = {}
    below_real = 0
    for L in (1, 2, 3, 4):
        rs = []
        for w in _unit_coboundaries(L, 10, 2000):
            ai = fill_linf_integral(w.as_ring("Z"))
            ar = fill_linf_real(w)
            below_real += ai.norm < ar.norm
            rs.append(Fraction(ai.norm) / (L * w.norm()))
        ratios[L] = max(rs)
    c_star = max(ratios.values())
    trend_ok = all(ratios[L] <= Fraction(11, 10) * max(ratios[M] for M in ratios if M < L) for L in (2, 3, 4))
    ok = trend_ok and below_real == 0
    detail = " ".join(f"L{L}={str(r)}" for L, r in ratios.items())
    report(4, "coisoperimetry scaling", ok, f"max ||a||/(L||w||): {detail}; C*={c_star}; "
           f"integral below real: {below_real}")


def test_05_integral_cocycle_approximation(report):
    spreads = {}
    for seed in CERT_SEEDS:
        ks = [certificate(L, seed).K for L in (1, 2, 3)]
        spreads[seed] = max(ks) - min(ks)
    worst = max(spreads.values())
    report(5, "integral-cocycle approximation", worst <= 1,
           f"max spread of K across L=1,2,3 over {len(spreads)} matched seeds: {worst}")


def test_06_hat_a_properties(report):
    bad = []
    n = 0
    for L in (1, 2, 3):
        for seed in CERT_SEEDS:
            cert = certificate(L, seed)
            n += 1
            d = coboundary(cert.hat_a)
            P = cert.product
            ok = (d.norm() <= 3
                  and time_slice(d, "restrict", 0) == cert.w
                  and time_slice(cert.hat_a, "restrict", 0) == cert.a
                  and time_slice(cert.hat_a, "restrict", P.T).is_zero())
            if not ok:
                bad.append((L, seed))
    report(6, "hat-a properties", not bad, f"{n - len(bad)}/{n} instances; failing {bad}")


def test_07_certificate_identity_suite(report):
    needed = {"d_alpha_hat", "int_alpha_hat", "d_eta", "d_beta", "stokes_beta", "hopf_total", "delta_b",
              "beta_ends", "b_ends", "hat_a_ends"}
    bad = []
    n = 0
    for L in (1, 2, 3):
        for seed in CERT_SEEDS:
            rep = verify_certificate(certificate(L, seed))
            n += 1
            if not rep.passed or not needed <= set(rep.checks):
                bad.append((L, seed, rep.failed))
    report(7, "certificate identity suite", not bad, f"{n - len(bad)}/{n} certificates verified; failing {bad}")


def test_08_norm_ledger(report):
    bad = []
    n = 0
    for L in (1, 2, 3):
        for seed in CERT_SEEDS:
            c = certificate(L, seed).norms
            n += 1
            slack = max(c["K"] + 1, 4)
            if not (c["o_minus_h4"] <= 1 and c["b_minus_b_prime"] <= slack and c["b"] <= c["b_prime"] + slack):
                bad.append((L, seed))
    report(8, "norm ledger", not bad, f"{n - len(bad)}/{n} certificates within the bounds")


def test_09_width_thickness_scaling(report, tmp_path):
    rows = scale_study([1, 2, 3, 4], 10)
    path = tmp_path / "scale_study.csv"
    path.write_text(study_csv(rows))
    proc = subprocess.run([sys.executable, str(ROOT / "scripts" / "check_scale_csv.py"), str(path)],
                          capture_output=True, text=True)
    res = scale_regression(list(csv.DictReader(path.open())))
    detail = "; ".join(f"{col} L4={res[col]['last']} C={res[col]['constant']}"
                       for col in res if col != "errors")
    report(9, "width/thickness scaling", proc.returncode == 0 and res["errors"] == 0,
           f"{detail}; error rows {res['errors']}")


@pytest.fixture(scope="module")
def hopf_maps():
    return {d: simplicial_hopf_map(d, 6, 2 if abs(d) == 1 else 3) for d in (1, -1, 2, -2)}


def test_10_hopf_layer(report, hopf_maps):
    w = hopf_maps[1].degree_cochain()
    h = hopf_cup(w)
    scaling = all(hopf_cup(w.scale(d)) == d * d * h for d in range(-2, 3))
    pairs = []
    for d, f in hopf_maps.items():
        pairs.append((d, hopf_cup(f.degree_cochain()), hopf_linking_oracle(f)))
    agree = all(c == lk == d for d, c, lk in pairs)
    report(10, "Hopf layer", scaling and agree and abs(h) == 1,
           f"square law {'holds' if scaling else 'fails'}; (d, cup, linking) = "
           f"{[(d, str(c), str(lk)) for d, c, lk in pairs]}")


def test_11_dga_suite(report):
    S2 = sphere_model()
    h, f0, target = build_two_stage_nullhomotopy(S2, check=False)
    results = [verify_homotopy(h, f0, zero_morphism(S2, target)).passed]
    rng = random.Random(11)
    for _ in range(20):
        M = random_two_stage_model(rng)
        h, f0, target = build_two_stage_nullhomotopy(M, check=False)
        results.append(verify_homotopy(h, f0, zero_morphism(M, target)).passed)
    h, f1, f2 = homotopy_between_hopf_maps(3, Fraction(1, 2), 5)
    results.append(verify_homotopy(h, f1, f2).passed)
    report(11, "DGA suite", all(results), f"{sum(results)}/{len(results)} homotopies verified "
           "(sphere model, 20 random two-stage models, Hopf-map homotopy)")


def test_12_fault_injection(report):
    rng = random.Random(12)
    hits = total = 0
    for L in (1, 2):
        for seed in CERT_SEEDS:
            cert = certificate(L, seed)
            for kind, identity in FAULT_TARGETS.items():
                rep = verify_certificate(inject_fault(cert, kind, rng))
                total += 1
                hits += (not rep.passed) and identity in rep.failed
    report(12, "fault injection", hits == total and total >= 30, f"{hits}/{total} faults detected")
