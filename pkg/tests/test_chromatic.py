"""Exact chromatic polynomials against brute-force coloring counts."""

import numpy as np
import pytest

from chromahqd.chromatic import (
    IntPolynomial,
    chi_at_negative,
    chromatic_polynomial,
    count_report,
    induced_interior,
    predicted_realizations,
    tutte_x_slice,
)
from chromahqd.fixtures import fixture
from chromahqd.graphs import Graph

from oracles import (
    chromatic_coeffs_by_interpolation,
    count_proper_colorings,
    random_connected_graph,
)


def complete_graph(n):
    names = [f"v{i}" for i in range(n)]
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]
    return Graph.build(names, [], pairs)


def test_polynomial_arithmetic():
    p = IntPolynomial.from_coeffs([0, -1, 1])  # x^2 - x
    q = IntPolynomial.from_coeffs([1, 1])
    assert (p + q).coeffs == (1, 0, 1)
    assert (p * q).coeffs == (0, -1, 0, 1)
    assert (p - p).coeffs == ()
    assert p(3) == 6
    assert str(p) == "x^2 - x"
    assert str(IntPolynomial.zero()) == "0"


def test_known_chromatic_polynomials():
    point, _ = fixture("point")
    assert chromatic_polynomial(point).coeffs == (0, 1)
    k2, _ = fixture("k2")
    assert chromatic_polynomial(k2).coeffs == (0, -1, 1)
    path3, _ = fixture("path3")
    assert chromatic_polynomial(path3).coeffs == (0, 1, -2, 1)
    triangle, _ = fixture("triangle")
    assert chromatic_polynomial(triangle).coeffs == (0, 2, -3, 1)
    k4 = complete_graph(4)
    # x(x-1)(x-2)(x-3)
    assert chromatic_polynomial(k4).coeffs == (0, -6, 11, -6, 1)


def test_loops_and_parallels():
    looped = Graph.build(["a", "b"], [], [("a", "b"), ("a", "a")])
    assert chromatic_polynomial(looped).coeffs == ()
    doubled = Graph.build(["a", "b"], [], [("a", "b"), ("a", "b")])
    assert chromatic_polynomial(doubled).coeffs == (0, -1, 1)


def test_disconnected_multiplies():
    g = Graph.build(["a", "b", "c", "d"], [], [("a", "b"), ("c", "d")])
    # (x^2 - x)^2
    assert chromatic_polynomial(g).coeffs == (0, 0, 1, -2, 1)


@pytest.mark.parametrize("seed", range(8))
def test_random_graphs_match_coloring_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 7))
    extra = int(rng.integers(0, 4))
    g = random_connected_graph(rng, n, extra)
    expected = chromatic_coeffs_by_interpolation(g)
    assert list(chromatic_polynomial(g).coeffs) == expected
    for x in range(n + 1):
        assert chromatic_polynomial(g)(x) == count_proper_colorings(g, x)


@pytest.mark.parametrize("seed", range(6))
def test_chi_at_negative_consistency(seed):
    rng = np.random.default_rng(100 + seed)
    g = random_connected_graph(rng, int(rng.integers(2, 6)), int(rng.integers(0, 3)))
    poly = chromatic_polynomial(g)
    for k in (1, 2, 3):
        assert chi_at_negative(g, k) == poly(-k)


def test_chi_at_negative_rejects_bad_input():
    g, _ = fixture("k2")
    with pytest.raises(ValueError):
        chi_at_negative(g, 0)
    disconnected = Graph.build(["a", "b"], [], [])
    with pytest.raises(ValueError, match="connected"):
        chi_at_negative(disconnected, 1)


def test_tutte_slice_trees_and_cycle():
    path3, _ = fixture("path3")
    assert tutte_x_slice(path3).coeffs == (0, 0, 1)  # x^2 for a 2-edge tree
    triangle, _ = fixture("triangle")
    # T(x,0) for a cycle of length 3 is x + x^2
    assert tutte_x_slice(triangle).coeffs == (0, 1, 1)


def test_predicted_realizations_on_augmented_graphs():
    # single interior vertex: prediction is k-1 for boundary size k+1... wait
    # boundary size s gives chi_point(-(s-2)) = -(s-2), count s-2
    point, _ = fixture("point")
    from chromahqd.graphs import augment_k

    for k in (2, 3, 4, 5):
        aug, _ = augment_k(point, k - 1)  # boundary size k
        assert predicted_realizations(aug) == k - 2

    triangle, _ = fixture("triangle")
    aug, _ = augment_k(triangle, 3)  # boundary size 4, chi at -2
    assert predicted_realizations(aug) == abs(chi_at_negative(triangle, 2))


def test_predicted_realizations_requires_full_adjacency():
    g = Graph.build(
        ["a", "x", "y"], ["x", "y"], [("a", "x"), ("a", "y"), ("x", "y")]
    )
    # boundary-boundary edge is fine here; a is adjacent to both
    assert predicted_realizations(g) == 0  # chi_point(0) = 0
    missing = Graph.build(["a", "b", "x", "y"], ["x", "y"], [("a", "x"), ("a", "y"), ("a", "b"), ("b", "x")])
    with pytest.raises(ValueError, match="not adjacent"):
        predicted_realizations(missing)


def test_count_report_fields():
    from chromahqd.graphs import augment_k

    triangle, _ = fixture("triangle")
    aug, _ = augment_k(triangle, 3)
    rep = count_report(aug, graph_id="triangle+4")
    assert rep.boundary_size == 4
    assert rep.k == 2
    assert rep.interior_size == 3
    assert rep.chi_at_minus_k == chi_at_negative(triangle, 2) == -24
    assert rep.predicted_realization_count == 24


def test_induced_interior():
    g, _ = fixture("fig332")
    inner = induced_interior(g)
    assert set(inner.vertices) == set(g.interior)
    assert all(e.u in inner.vertices and e.v in inner.vertices for e in inner.edges)
    assert inner.boundary == frozenset()
