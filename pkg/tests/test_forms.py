import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nullwidth import forms as fm
from nullwidth.complexes import Cochain, coboundary, product_with_interval, standard_simplex
from nullwidth.forms import (DegreeCapExceeded, PolyForm, PreconditionViolated, boundary_trace_zero,
                             exterior_d, integrate, local_relative_primitive, restrict_slice,
                             time_antiderivative, time_weighted_lift, trace_mismatches, wedge, whitney,
                             whitney_product)


def _random_cochain(host, k, rng, lo=-3, hi=3):
    return Cochain(host, k, {i: rng.randint(lo, hi) for i in range(host.count(k))})


def test_integral_of_lambda0_volume_on_triangle():
    D2 = standard_simplex(2)
    f = PolyForm(D2, 2, {0: fm._cwedge(fm._lam(2, 0), fm._cwedge(fm._dlam(2, 1), fm._dlam(2, 2)))})
    assert integrate(f).values == {0: Fraction(1, 6)}


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_whitney_round_trip_and_chain_map(sphere2, k):
    rng = random.Random(k)
    c = _random_cochain(sphere2, k, rng)
    W = whitney(c)
    assert integrate(W, check_compatible=True) == c
    assert exterior_d(W) == whitney(coboundary(c))
    assert not trace_mismatches(W)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_product_whitney_round_trip(sphere1, k):
    rng = random.Random(10 + k)
    P = product_with_interval(sphere1, 3)
    c = _random_cochain(P, k, rng)
    W = whitney_product(c)
    assert integrate(W, check_compatible=True) == c
    assert exterior_d(W) == whitney_product(coboundary(c))


@given(st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_stokes_on_wedges(sphere1, p, seed):
    rng = random.Random(seed)
    f = wedge(whitney(_random_cochain(sphere1, p, rng)), whitney(_random_cochain(sphere1, 2 - p, rng)))
    assert coboundary(integrate(f)) == integrate(exterior_d(f))


@given(st.integers(0, 2**32 - 1))
def test_exterior_d_squares_to_zero(sphere1, seed):
    rng = random.Random(seed)
    f = wedge(whitney(_random_cochain(sphere1, 1, rng)), whitney(_random_cochain(sphere1, 0, rng)))
    assert exterior_d(exterior_d(f)).is_zero()


def test_wedge_is_graded_commutative(sphere1):
    rng = random.Random(3)
    a = whitney(_random_cochain(sphere1, 1, rng))
    b = whitney(_random_cochain(sphere1, 2, rng))
    c = whitney(_random_cochain(sphere1, 1, rng))
    assert wedge(a, b) == wedge(b, a)
    assert wedge(a, c) == -wedge(c, a)


def test_time_antiderivative(sphere1):
    rng = random.Random(4)
    P = product_with_interval(sphere1, 2)
    h = Cochain(P, 1, {i: rng.randint(-2, 2) for i in range(P.n_slices(1) - sphere1.count(1))})
    omega = whitney_product(coboundary(h))
    alpha = time_antiderivative(omega)
    assert exterior_d(alpha) == omega
    assert restrict_slice(alpha, P.T).is_zero()


def test_time_antiderivative_of_dt_profile(sphere1):
    # omega = (1 - t) dt ^ phi gives -(1 - t)^2 / 2 phi
    P = product_with_interval(sphere1, 1)
    phi = whitney(Cochain(sphere1, 3, {0: 1}))
    omega = time_weighted_lift(phi, P, [1, -1], with_dt=True)
    alpha = time_antiderivative(omega, check=False)
    expected = time_weighted_lift(phi, P, [Fraction(-1, 2), 1, Fraction(-1, 2)])
    assert alpha == expected


def test_antiderivative_rejects_open_forms(sphere1):
    P = product_with_interval(sphere1, 1)
    c = Cochain(P, 1, {0: 1})
    with pytest.raises(PreconditionViolated):
        time_antiderivative(whitney_product(c))


def test_local_relative_primitive_example():
    D3 = standard_simplex(3)
    vol = fm._cwedge(fm._dlam(3, 1), fm._cwedge(fm._dlam(3, 2), fm._dlam(3, 3)))
    mu = fm._cscale(fm._cwedge(fm._cadd(fm._lam(3, 0), fm._lam(3, 1), -1), vol), 24)
    nu = local_relative_primitive(PolyForm(D3, 3, {0: mu}))
    assert exterior_d(nu).cells[0] == mu
    assert boundary_trace_zero(nu.cells[0], 3)


def test_local_relative_primitive_needs_zero_integral():
    D3 = standard_simplex(3)
    vol = fm._cwedge(fm._dlam(3, 1), fm._cwedge(fm._dlam(3, 2), fm._dlam(3, 3)))
    with pytest.raises(PreconditionViolated):
        local_relative_primitive(PolyForm(D3, 3, {0: vol}))


def test_local_relative_primitive_degree_cap():
    D3 = standard_simplex(3)
    vol = fm._cwedge(fm._dlam(3, 1), fm._cwedge(fm._dlam(3, 2), fm._dlam(3, 3)))
    mu = fm._cscale(fm._cwedge(fm._cadd(fm._lam(3, 0), fm._lam(3, 1), -1), vol), 24)
    with pytest.raises(DegreeCapExceeded):
        local_relative_primitive(PolyForm(D3, 3, {0: mu}), degree_cap=0)


def test_form_json_round_trip(sphere1):
    rng = random.Random(5)
    f = wedge(whitney(_random_cochain(sphere1, 1, rng)), whitney(_random_cochain(sphere1, 1, rng)))
    assert PolyForm.from_json(sphere1, f.to_json()) == f


def _elementary_bound(k):
    # triangle inequality over the elementary Whitney forms of one tetrahedron
    D3 = standard_simplex(3)
    return sum(fm.norm_surrogate(whitney(Cochain(D3, k, {i: 1}))) for i in range(D3.count(k)))


@pytest.mark.parametrize("L", [1, 2, 3])
def test_whitney_norm_surrogate_bound_is_level_independent(L):
    from nullwidth.certify import subdivided_sphere
    X = subdivided_sphere(L)
    rng = random.Random(L)
    for k in range(4):
        C = _elementary_bound(k)
        for _ in range(10):
            c = _random_cochain(X, k, rng, -4, 4)
            assert fm.norm_surrogate(whitney(c)) <= C * c.norm()
