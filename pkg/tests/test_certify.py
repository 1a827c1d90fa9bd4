import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import certificate
from nullwidth.certify import (FAULT_TARGETS, IDENTITIES, Certificate, DegreeMap, NotNullhomotopic,
                               build_certificate, build_hat_a, default_T, generate_instance, inject_fault,
                               scale_study, verify_certificate)
from nullwidth.complexes import Cochain, coboundary, product_with_interval
from nullwidth.hopf import simplicial_hopf_map


def test_hat_a_profile(sphere1):
    a = Cochain(sphere1, 1, {0: 5}, "Z")
    P = product_with_interval(sphere1, 4)
    hat = build_hat_a(a, 4, P)
    assert [hat[P.slice_index(1, 0, i)] for i in range(5)] == [5, 2, 1, 0, 0]
    assert all(hat[P.prism_index(1, v, i)] == 0 for v in range(sphere1.count(0)) for i in range(4))


def test_hat_a_rounds_down_for_negative_values(sphere1):
    a = Cochain(sphere1, 1, {0: -5}, "Z")
    P = product_with_interval(sphere1, 4)
    hat = build_hat_a(a, 4, P)
    assert [hat[P.slice_index(1, 0, i)] for i in range(5)] == [-5, -3, -2, -1, 0]


def test_default_T():
    assert [default_T(L) for L in (1, 2, 3)] == [1, 4, 9]
    assert default_T(2, Fraction(1, 2)) == 2
    assert default_T(1, Fraction(1, 10)) == 1


@pytest.mark.parametrize("strategy", ["hopf-repair", "coboundary-sample"])
def test_generated_instances_are_bounded_coboundaries(strategy):
    m = generate_instance(2, 3, strategy=strategy)
    assert m.w.norm() <= 1
    assert coboundary(m.w).is_zero()
    if strategy == "hopf-repair":
        assert m.hopf == 0 and m.helicity == 0


def test_generation_is_seeded():
    assert generate_instance(2, 5).w == generate_instance(2, 5).w


@pytest.mark.parametrize("L,seed", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_certificate_verifies(L, seed):
    cert = certificate(L, seed)
    report = verify_certificate(cert)
    assert report.passed, report.failed
    assert set(report.checks) == set(IDENTITIES)
    assert cert.T == default_T(L)


def test_certificate_json_round_trip(tmp_path):
    cert = certificate(2, 0)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cert.to_json()))
    loaded = Certificate.from_json(json.loads(path.read_text()))
    assert loaded.b == cert.b and loaded.b0 == cert.b0 and loaded.K == cert.K
    assert loaded.eta_loc == cert.eta_loc
    assert verify_certificate(loaded).passed


def test_certificate_rejects_foreign_json():
    with pytest.raises(ValueError):
        Certificate.from_json({"format": "something-else"})


@pytest.mark.parametrize("kind", sorted(FAULT_TARGETS))
def test_injected_faults_are_detected(kind):
    cert = certificate(2, 1)
    bad = inject_fault(cert, kind, random.Random(11))
    report = verify_certificate(bad)
    assert not report.passed
    assert FAULT_TARGETS[kind] in report.failed


@settings(max_examples=8)
@given(st.integers(0, 2**16))
def test_boundary_values_of_b(seed):
    cert = certificate(1, seed % 6)
    P = cert.product
    X = cert.host
    assert all(cert.b[P.slice_index(3, s, P.T)] == 0 for s in range(X.count(3)))
    assert coboundary(cert.b).as_ring("Q") == cert.h4


def test_hopf_obstruction_raises():
    f = simplicial_hopf_map(1, 6, 2)
    with pytest.raises(NotNullhomotopic):
        build_certificate(DegreeMap(f.domain, f.degree_cochain(), 2))


def test_scale_study_rows():
    rows = scale_study([1], 2, verify=True)
    assert len(rows) == 2
    assert all(r["error"] == "" for r in rows)
    assert all(r["a_norm_over_L"] == r["a_norm"] for r in rows)
