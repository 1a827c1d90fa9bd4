import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nullwidth.complexes import Cochain, boundary_sphere_complex, coboundary, edgewise_subdivide, standard_simplex
from nullwidth.forms import integrate, wedge, whitney
from nullwidth.hopf import (SimplicialMapData, compose_degree, cup_product, hopf_cup, hopf_form,
                            hopf_linking_oracle, join_sphere, simplicial_hopf_map, whitney_helicity)


def test_cup_product_on_triangle():
    D2 = standard_simplex(2)
    e = D2.index[1]
    chi = lambda s: Cochain(D2, 1, {e[s]: 1}, "Z")
    assert cup_product(chi((0, 1)), chi((1, 2))).values == {0: 1}
    assert cup_product(chi((0, 1)), chi((0, 1))).is_zero()


def test_cup_product_leibniz(sphere1):
    rng = random.Random(0)
    a = Cochain(sphere1, 1, {i: rng.randint(-2, 2) for i in range(sphere1.count(1))})
    b = Cochain(sphere1, 1, {i: rng.randint(-2, 2) for i in range(sphere1.count(1))})
    lhs = coboundary(cup_product(a, b))
    rhs = cup_product(coboundary(a), b) - cup_product(a, coboundary(b))
    assert lhs == rhs


def _random_coboundary(X, rng, lo=-2, hi=2):
    a = Cochain(X, 1, {i: rng.randint(lo, hi) for i in range(X.count(1))})
    return a, coboundary(a)


@given(st.integers(0, 2**32 - 1))
def test_hopf_cup_is_filler_independent(seed):
    X = edgewise_subdivide(boundary_sphere_complex(3), 2)
    rng = random.Random(seed)
    a, w = _random_coboundary(X, rng)
    g = Cochain(X, 0, {i: rng.randint(-3, 3) for i in range(X.count(0))})
    assert hopf_cup(w, a) == hopf_cup(w, a + coboundary(g)) == hopf_cup(w)


@given(st.integers(0, 2**32 - 1), st.integers(-3, 3))
def test_hopf_cup_quadratic_scaling(seed, k):
    X = boundary_sphere_complex(3)
    rng = random.Random(seed)
    a, w = _random_coboundary(X, rng)
    assert hopf_cup(w.scale(k), a.scale(k)) == k * k * hopf_cup(w, a)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_helicity_matches_forms_engine(seed):
    X = edgewise_subdivide(boundary_sphere_complex(3), 2)
    rng = random.Random(seed)
    a, w = _random_coboundary(X, rng)
    top = integrate(wedge(whitney(a), whitney(w)))
    direct = sum((X.orientation[i] * v for i, v in top.values.items()), Fraction(0))
    assert whitney_helicity(w, a) == direct
    assert hopf_form(a)[0] == hopf_cup(w, a)


def test_join_sphere_is_a_three_sphere():
    J = join_sphere(5, 4)
    assert J.dim == 3
    assert J.euler_characteristic() == 0
    assert J.orientation is not None


@pytest.fixture(scope="module")
def hopf_maps():
    return {d: simplicial_hopf_map(d, 6, 2 if abs(d) == 1 else 3) for d in (1, -1, 2)}


@pytest.mark.parametrize("d", [1, -1, 2])
def test_hopf_cup_matches_linking_oracle(hopf_maps, d):
    f = hopf_maps[d]
    for j in range(4):
        assert hopf_cup(f.degree_cochain(j)) == d
    assert hopf_linking_oracle(f, (0, 1)) == d
    assert hopf_linking_oracle(f, (2, 3)) == d


@pytest.mark.parametrize("k", [-2, 0, 3])
def test_compose_degree_square_law(hopf_maps, k):
    f = hopf_maps[1]
    assert hopf_cup(compose_degree(f, k)) == k * k


def test_map_json_round_trip(hopf_maps):
    f = hopf_maps[1]
    g = SimplicialMapData.from_json(f.to_json())
    assert g.vertex_map == f.vertex_map
    assert hopf_cup(g.degree_cochain()) == 1


def test_non_simplicial_vertex_map_rejected():
    X = boundary_sphere_complex(3)
    Y = boundary_sphere_complex(2)
    with pytest.raises(ValueError):
        SimplicialMapData(X, Y, [0, 1, 2, 3, 0])
