import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nullwidth.complexes import Cochain, boundary_sphere_complex, coboundary, cycle_graph, edgewise_subdivide
from nullwidth.fill import (Infeasible, fill_linf, fill_linf_integral, fill_linf_real, ilp_fill_oracle,
                            nearest_integral_cocycle)

F = Fraction


@pytest.fixture(scope="module")
def c4():
    return cycle_graph(4)


def test_c4_real_fill(c4):
    w = Cochain(c4, 1, {0: 1, 1: -1})
    r = fill_linf_real(w)
    assert r.norm == F(1, 2)
    assert r.filler.to_list() == [F(-1, 2), F(1, 2), F(-1, 2), F(-1, 2)]
    assert coboundary(r.filler) == w


def test_c4_integral_fill(c4):
    w = Cochain(c4, 1, {0: 1, 1: -1}, "Z")
    r = fill_linf_integral(w)
    assert r.norm == 1
    assert coboundary(r.filler) == w
    assert ilp_fill_oracle(w, 2).norm == 1


@pytest.mark.parametrize("method", ["auto", "simplex"])
def test_non_coboundary_is_infeasible(c4, method):
    with pytest.raises(Infeasible):
        fill_linf_real(Cochain(c4, 1, {0: 1}), method=method)


def test_nearest_integral_cocycle_constant(c4):
    approx = nearest_integral_cocycle(Cochain(c4, 0, {i: F(2, 5) for i in range(4)}))
    assert approx.cocycle.is_zero()
    assert approx.distance == F(2, 5)


def test_boundary_zero_cells_respected(c4):
    w = Cochain(c4, 1, {0: 1, 1: -1})
    r = fill_linf(w, boundary_zero_cells=[0])
    assert r.filler[0] == 0
    assert coboundary(r.filler) == w


def _balanced_top(Y, rng):
    z = Cochain(Y, 3, {i: rng.randint(-2, 2) for i in range(Y.count(3))})
    tot = sum(Y.orientation[i] * v for i, v in z.values.items())
    return z + Cochain(Y, 3, {0: -tot * Y.orientation[0]})


@pytest.mark.parametrize("seed", range(4))
def test_structured_and_simplex_routes_agree(seed):
    # network solver vs generic LP on both the 1-coboundary and top-degree cases
    rng = random.Random(seed)
    Y = boundary_sphere_complex(3)
    a = Cochain(Y, 1, {i: rng.randint(-1, 1) for i in range(Y.count(1))}, "Z")
    w = coboundary(a)
    assert fill_linf_real(w).norm == fill_linf_real(w, method="simplex").norm
    assert fill_linf_integral(w).norm == ilp_fill_oracle(w, 3).norm
    z = _balanced_top(Y, rng)
    assert fill_linf_real(z).norm == fill_linf_real(z, method="simplex").norm
    assert fill_linf_integral(z.as_ring("Z")).norm == ilp_fill_oracle(z.as_ring("Z"), 5).norm


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_fill_scale_equivariance(seed, k):
    rng = random.Random(seed)
    Y = boundary_sphere_complex(3)
    w = coboundary(Cochain(Y, 1, {i: rng.randint(-2, 2) for i in range(Y.count(1))}))
    r = fill_linf_real(w)
    assert fill_linf_real(w.scale(k)).norm == k * r.norm
    assert coboundary(r.filler) == w


@given(st.integers(0, 2**32 - 1))
def test_integral_optimum_is_ceiling_of_real(seed):
    rng = random.Random(seed)
    Y = edgewise_subdivide(boundary_sphere_complex(3), 2)
    z = _balanced_top(Y, rng).as_ring("Z")
    real = fill_linf_real(z).norm
    integral = fill_linf_integral(z)
    assert integral.norm >= real
    assert integral.norm - real < 1 or integral.k_round > 0
