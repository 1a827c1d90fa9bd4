from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nullwidth.complexes import (Cochain, ProductComplex, SimplicialComplex, boundary_sphere_complex,
                                 coboundary, cycle_graph, edgewise_subdivide, include_slice,
                                 product_with_interval, standard_simplex, time_slice)


@pytest.mark.parametrize("L, counts", [
    (1, [5, 10, 10, 5]),
    (2, [15, 55, 80, 40]),
    (3, [35, 170, 270, 135]),
    (4, [70, 390, 640, 320]),
])
def test_subdivided_sphere_counts(L, counts):
    Y = edgewise_subdivide(boundary_sphere_complex(3), L)
    assert [Y.count(k) for k in range(4)] == counts
    assert Y.euler_characteristic() == 0
    assert Y.meta["L"] == L


def test_fundamental_cycle_is_a_cycle():
    Y = edgewise_subdivide(boundary_sphere_complex(3), 2)
    z = Y.fundamental_cycle()
    total = {}
    for t, coeff in enumerate(z):
        for f, s in Y.boundary(3)[t]:
            total[f] = total.get(f, 0) + coeff * s
    assert not any(total.values())


def test_coherent_orientation_of_boundary_sphere():
    X = boundary_sphere_complex(3)
    # the facet missing vertex j carries (-1)^j
    for i, s in enumerate(X.simplices[3]):
        missing = (set(range(5)) - set(s)).pop()
        assert X.orientation[i] == (-1) ** missing


def test_cycle_graph_coboundary_example():
    C = cycle_graph(4)
    assert C.simplices[1] == [(0, 1), (1, 2), (2, 3), (0, 3)]
    f = Cochain.from_list(C, 0, [0, 1, 0, 0])
    assert coboundary(f).to_list() == [1, -1, 0, 0]


def test_integral_ring_rejects_fractions():
    C = cycle_graph(4)
    with pytest.raises(ValueError):
        Cochain(C, 0, {0: Fraction(1, 2)}, "Z")


@pytest.mark.parametrize("k", [0, 1, 2])
def test_coboundary_squares_to_zero(sphere2, k):
    c = Cochain(sphere2, k, {i: (i * 7 % 5) - 2 for i in range(sphere2.count(k))})
    assert coboundary(coboundary(c)).is_zero()


@given(st.lists(st.integers(-3, 3), min_size=55, max_size=55))
def test_cochain_json_round_trip(vals):
    Y = edgewise_subdivide(boundary_sphere_complex(3), 2)
    c = Cochain.from_list(Y, 1, [Fraction(v, 3) for v in vals])
    assert Cochain.from_json(Y, c.to_json()) == c


def test_complex_json_round_trip(sphere2):
    Z = SimplicialComplex.from_json(sphere2.to_json())
    assert Z.simplices == sphere2.simplices
    assert Z.orientation == sphere2.orientation


def test_product_counts_and_boundary(sphere1):
    P = product_with_interval(sphere1, 3)
    assert isinstance(P, ProductComplex)
    for k in range(1, 5):
        assert P.count(k) == 4 * sphere1.count(k) + 3 * sphere1.count(k - 1)
    for k in range(2, 5):
        c = Cochain(P, k - 2, {i: i % 3 - 1 for i in range(P.count(k - 2))})
        assert coboundary(coboundary(c)).is_zero()


def test_product_orientation_is_a_relative_cycle(sphere1):
    P = product_with_interval(sphere1, 2)
    ends = set(P.end_slice_cells(3))
    total = {}
    for t in range(P.count(4)):
        for f, s in P.boundary(4)[t]:
            total[f] = total.get(f, 0) + P.orientation[t] * s
    assert all(v == 0 for f, v in total.items() if f not in ends)


def test_time_slice_restrict_and_aggregate(sphere1):
    P = product_with_interval(sphere1, 2)
    c = Cochain(sphere1, 1, {0: 3, 4: -1})
    lifted = include_slice(c, P, 1)
    assert time_slice(lifted, "restrict", 1) == c
    assert time_slice(lifted, "restrict", 0).is_zero()
    prisms = Cochain(P, 1, {P.prism_index(1, 2, 0): 1, P.prism_index(1, 2, 1): 2})
    assert time_slice(prisms, "aggregate").values == {2: 3}


def test_standard_simplex_has_one_top_cell():
    D = standard_simplex(3)
    assert D.count(3) == 1 and D.count(0) == 4
