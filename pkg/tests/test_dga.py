import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nullwidth.dga import (FreeGCA, ParseError, TwoStageViolation, build_two_stage_nullhomotopy,
                           differential, endpoint_eval, homotopy_between_hopf_maps, homotopy_from_json,
                           integrate01, model_from_json, random_two_stage_model, sphere_model,
                           verify_homotopy, zero_morphism)


@pytest.fixture
def S2():
    return sphere_model()


def test_graded_commutativity(S2):
    x, y = S2.gen("x"), S2.gen("y")
    assert y * x == x * y
    assert (y * y).is_zero()
    assert (S2.dt() * S2.dt()).is_zero()
    odd = FreeGCA([("u", 1), ("v", 3)])
    u, v = odd.gen("u"), odd.gen("v")
    assert u * v == -(v * u)


def test_differential_examples(S2):
    x, y = S2.gen("x"), S2.gen("y")
    assert differential(y) == x * x
    assert differential(x * y) == x ** 3
    assert differential(x * S2.t(2)) == (x * S2.t() * S2.dt()).scale(2)


def test_fiber_integration_examples(S2):
    assert integrate01(S2.parse("x*t^2*dt")) == S2.gen("x").scale(Fraction(1, 3))
    assert integrate01(S2.parse("y*dt")) == -S2.gen("y")
    assert integrate01(S2.parse("x*t^3")).is_zero()


@given(st.integers(0, 2**32 - 1))
def test_d_squared_vanishes_on_random_elements(seed):
    rng = random.Random(seed)
    M = random_two_stage_model(rng)
    assert not M.check_d_squared()
    e = M.zero()
    for g in M.names:
        if rng.random() < 0.6:
            e = e + M.gen(g) * M.t(rng.randint(0, 3))
    assert differential(differential(e)).is_zero()


def test_sphere_model_nullhomotopy(S2):
    h, f0, target = build_two_stage_nullhomotopy(S2)
    report = verify_homotopy(h, f0, zero_morphism(S2, target))
    assert report.passed, report.failures()
    assert str(target.d_of(target.index["eta_y"])) == "-nu_y + omega_x*alpha_x"
    assert endpoint_eval(h, 1).apply(S2.gen("y")).is_zero()


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_random_two_stage_models(seed):
    M = random_two_stage_model(random.Random(seed))
    h, f0, target = build_two_stage_nullhomotopy(M)
    assert verify_homotopy(h, f0, zero_morphism(M, target)).passed


def test_two_stage_violation_detected():
    M = FreeGCA([("x", 2), ("y", 3), ("z", 4)], {"y": "x^2", "z": "x*y"})
    with pytest.raises(TwoStageViolation):
        build_two_stage_nullhomotopy(M)


@pytest.mark.parametrize("p,q1,q2", [(3, Fraction(1, 2), 5), (1, 0, 1), (-2, 3, Fraction(-7, 3))])
def test_hopf_map_homotopy(p, q1, q2):
    h, f1, f2 = homotopy_between_hopf_maps(p, q1, q2)
    assert verify_homotopy(h, f1, f2).passed


def test_hopf_map_homotopy_opposite_sign_fails():
    h, f1, f2 = homotopy_between_hopf_maps(3, Fraction(1, 2), 5, dt_sign=1)
    assert not verify_homotopy(h, f1, f2).passed


def test_model_json_round_trip(S2):
    data = {"name": "S2", "generators": [{"name": "x", "degree": 2}, {"name": "y", "degree": 3, "d": "x^2"}]}
    M = model_from_json(data)
    assert M.to_json() == S2.to_json()
    h, f0, target = build_two_stage_nullhomotopy(M)
    tj = target.to_json()
    hd = {"target": tj, "h": {g: str(e) for g, e in h.images.items()},
          "f0": {g: str(e) for g, e in f0.images.items()}}
    h2, f0b, f1b, _ = homotopy_from_json(M, hd)
    assert verify_homotopy(h2, f0b, f1b).passed


def test_parser_errors(S2):
    with pytest.raises(ParseError):
        S2.parse("x +* y")
    with pytest.raises(ParseError):
        S2.parse("w")
