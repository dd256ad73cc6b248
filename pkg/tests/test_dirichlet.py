"""Harmonic extensions, Green's functions, and the energy map."""

import numpy as np
import pytest

from chromahqd.dirichlet import (
    DegenerateEdgeError,
    SingularSystemError,
    dz_dq_edge,
    edge_order,
    greens_function,
    interior_laplacian,
    psi_jacobian_det,
    psi_map,
    solve_dirichlet,
    transfer_current,
)
from chromahqd.fixtures import fixture
from chromahqd.graphs import Graph, augment_k

from oracles import random_connected_graph


def star3():
    g, extras = fixture("star", k=2)
    return g, extras["values"]


def random_instance(seed, max_interior=4, max_extra=4):
    """Random boundary-wired graph with positive conductances and distinct
    boundary values."""
    rng = np.random.default_rng(seed)
    core = random_connected_graph(rng, int(rng.integers(1, max_interior + 1)), int(rng.integers(0, max_extra)))
    k = int(rng.integers(1, 4))
    g, _ = augment_k(core, k)
    c = {e.id: float(rng.uniform(0.2, 2.0)) for e in g.edges}
    b = {}
    vals = rng.uniform(-3.0, 3.0, size=len(g.boundary))
    while len(set(np.round(vals, 6))) < len(vals):
        vals = rng.uniform(-3.0, 3.0, size=len(g.boundary))
    for v, val in zip(sorted(g.boundary), vals):
        b[v] = float(val)
    return g, c, b


def test_star_closed_form():
    g, b = star3()
    c = {0: 0.2, 1: 0.3, 2: 0.5}
    sol = solve_dirichlet(g, c, b)
    b_of = {g.edge(i).other(next(iter(g.interior))): i for i in c}
    # with values 0,1,2 on the spokes and c summing to 1 the center sits at
    # sum of value * conductance
    center = next(iter(g.interior))
    expected = sum(b[v] * c[eid] for v, eid in b_of.items())
    assert sol.values[center] == pytest.approx(expected, abs=1e-14)


def test_path_hand_solution():
    g = Graph.build(["l", "i", "r"], ["l", "r"], [("l", "i"), ("i", "r")])
    sol = solve_dirichlet(g, {0: 1.0, 1: 1.0}, {"l": 0.0, "r": 1.0})
    assert sol.values["i"] == pytest.approx(0.5)
    assert sol.energies[0] == pytest.approx(0.25)
    assert sol.energies[1] == pytest.approx(0.25)
    assert sol.total_energy == pytest.approx(0.5)


def test_constant_boundary_gives_zero_energy():
    g, _ = star3()
    b = {v: 3.0 for v in g.boundary}
    sol = solve_dirichlet(g, {e.id: 1.0 for e in g.edges}, b)
    assert all(v == pytest.approx(3.0) for v in sol.values.values())
    assert sol.total_energy == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_maximum_principle(seed):
    g, c, b = random_instance(seed)
    sol = solve_dirichlet(g, c, b)
    lo, hi = min(b.values()), max(b.values())
    for v, val in sol.values.items():
        assert lo - 1e-12 <= val.real <= hi + 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_energy_conservation(seed):
    """Z equals the power injected through the boundary (Green's identity)."""
    g, c, b = random_instance(seed)
    sol = solve_dirichlet(g, c, b)
    boundary_power = 0.0
    for v in g.boundary:
        current = sum(
            c[e.id] * (sol.values[v] - sol.values[e.other(v)])
            for e in g.adjacency[v]
            if not e.is_loop
        )
        boundary_power += b[v] * current
    assert boundary_power == pytest.approx(sol.total_energy, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("seed", range(6))
def test_psi_homogeneity(seed):
    g, c, b = random_instance(seed)
    q = psi_map(g, c, b)
    scaled = psi_map(g, {e: 3.5 * v for e, v in c.items()}, b)
    for eid in q:
        assert scaled[eid] == pytest.approx(3.5 * q[eid], rel=1e-12)


def test_interior_laplacian_system():
    g, c, b = random_instance(3)
    A, B, interior = interior_laplacian(g, c)
    sol = solve_dirichlet(g, c, b)
    x = np.array([sol.values[v] for v in interior])
    bvec = np.array([b[v] for v in sorted(g.boundary)])
    assert np.max(np.abs(A @ x + B @ bvec)) < 1e-12 * (1 + np.max(np.abs(bvec)))


def test_greens_function_is_inverse():
    g, c, _ = random_instance(4)
    G = greens_function(g, c)
    A, _, interior = interior_laplacian(g, c)
    assert np.max(np.abs(A @ G.matrix - np.eye(len(interior)))) < 1e-10
    # boundary rows are zero by convention
    assert G.entry(sorted(g.boundary)[0], interior[0]) == 0.0


def test_singular_complex_system_raises():
    g = Graph.build(["a", "x", "y"], ["x", "y"], [("a", "x"), ("a", "y")])
    with pytest.raises(SingularSystemError):
        greens_function(g, {0: 1.0 + 0j, 1: -1.0 + 0j}, indefinite=True)
    with pytest.raises(SingularSystemError):
        solve_dirichlet(
            g, {0: 1.0 + 0j, 1: -1.0 + 0j}, {"x": 0.0, "y": 1.0}, indefinite=True
        )


def test_conductance_validation():
    g, _, b = random_instance(5)
    bad = {e.id: -1.0 for e in g.edges}
    with pytest.raises(ValueError, match="nonpositive"):
        solve_dirichlet(g, bad, b)
    with pytest.raises(ValueError, match="missing"):
        solve_dirichlet(g, {}, b)


def test_transfer_current_series_path():
    # two-edge path with the ends grounded: unit current into the middle
    # splits proportionally to conductance
    g = Graph.build(["l", "i", "r"], ["l", "r"], [("l", "i"), ("i", "r")])
    c = {0: 1.0, 1: 3.0}
    # G(i,i) = 1/(1+3); edge 0 carries current i->l (toward its first stored
    # endpoint, positive), edge 1 carries i->r (negative by the convention)
    t0 = transfer_current(g, c, 0, "i")
    t1 = transfer_current(g, c, 1, "i")
    assert t0 == pytest.approx(0.25)
    assert t1 == pytest.approx(-0.75)
    assert abs(t0) + abs(t1) == pytest.approx(1.0)


def test_transfer_current_reciprocity():
    g, c, _ = random_instance(6)
    interior = list(g.interior)
    if len(interior) < 2:
        pytest.skip("needs two interior vertices")
    G = greens_function(g, c)
    v, w = interior[0], interior[1]
    assert G.entry(v, w) == pytest.approx(G.entry(w, v), rel=1e-10)


def resolve_positions(g, q, z_full, boundary_z, iters=40):
    """Newton-iterate the position equations sum_e q_e/(z_v - z_w) = 0 for
    interior z, starting from z_full.  Used as the finite-difference oracle."""
    interior = list(g.interior)
    index = {v: i for i, v in enumerate(interior)}
    z = np.array([complex(z_full[v]) for v in interior])

    def at(v, zvec):
        i = index.get(v)
        return zvec[i] if i is not None else complex(boundary_z[v])

    for _ in range(iters):
        F = np.zeros(len(interior), dtype=complex)
        J = np.zeros((len(interior), len(interior)), dtype=complex)
        for i, v in enumerate(interior):
            for e in g.adjacency[v]:
                w = e.other(v)
                d = z[i] - at(w, z)
                F[i] += q[e.id] / d
                t = q[e.id] / (d * d)
                J[i, i] -= t
                if w in index:
                    J[i, index[w]] += t
        step = np.linalg.solve(J, F)
        z = z - step
        if np.max(np.abs(step)) < 1e-14 * max(1.0, float(np.max(np.abs(z)))):
            break
    return {v: z[index[v]] for v in interior}


@pytest.mark.parametrize("seed", range(8))
def test_dz_dq_derivative_against_fd(seed):
    """The Green's-function quotient matches finite differences of the
    position of each interior vertex under a change of one edge weight,
    re-solving the position equations after each perturbation."""
    g, c, b = random_instance(seed, max_interior=3)
    sol = solve_dirichlet(g, c, b)
    q = {eid: complex(v) for eid, v in sol.energies.items()}
    if min(abs(v) for v in q.values()) < 1e-6:
        pytest.skip("near-degenerate instance")
    eps = 1e-6
    for e in g.edges:
        up = dict(q)
        up[e.id] += eps
        down = dict(q)
        down[e.id] -= eps
        zu = resolve_positions(g, up, sol.values, b)
        zd = resolve_positions(g, down, sol.values, b)
        for v in g.interior:
            fd = (zu[v] - zd[v]) / (2 * eps)
            formula = dz_dq_edge(g, c, sol, v, e.id)
            if abs(fd) < 1e-9:
                assert abs(formula) < 1e-6
            else:
                assert complex(formula) == pytest.approx(complex(fd), rel=1e-4)


def test_dz_dq_zero_on_boundary():
    g, c, b = random_instance(2)
    sol = solve_dirichlet(g, c, b)
    v = sorted(g.boundary)[0]
    eid = max(sol.energies, key=lambda e: abs(sol.energies[e]))
    assert dz_dq_edge(g, c, sol, v, eid) == 0.0


def test_dz_dq_degenerate_edge():
    g, _ = star3()
    b = {v: 1.0 for v in g.boundary}
    c = {e.id: 1.0 for e in g.edges}
    sol = solve_dirichlet(g, c, b)
    with pytest.raises(DegenerateEdgeError):
        dz_dq_edge(g, c, sol, next(iter(g.interior)), 0)


def test_psi_jacobian_product_matches_star_form():
    g, b = star3()
    c = {0: 0.25, 1: 0.35, 2: 0.40}
    sol = solve_dirichlet(g, c, b)
    center = next(iter(g.interior))
    h = sol.values[center]
    spoke_value = {eid: b[g.edge(eid).other(center)] for eid in c}
    expected = 1.0
    for eid in sorted(c):
        expected *= (h - spoke_value[eid]) ** 2
    assert psi_jacobian_det(g, c, b) == pytest.approx(expected.real, rel=1e-12)


def small_edge_instance(seed):
    """Instances with at most 5 edges for numerical-determinant comparisons."""
    rng = np.random.default_rng(seed)
    if seed % 2 == 0:
        core = Graph.build(["a"], [], [])
        g, _ = augment_k(core, int(rng.integers(1, 4)))
    else:
        core = Graph.build(["a", "b"], [], [("a", "b")])
        g, _ = augment_k(core, 1)
    c = {e.id: float(rng.uniform(0.2, 2.0)) for e in g.edges}
    # redraw boundary values until no edge has a tiny potential drop; the
    # finite-difference determinant cannot resolve products near zero
    while True:
        vals = rng.uniform(-2.0, 2.0, size=len(g.boundary))
        b = {v: float(val) for v, val in zip(sorted(g.boundary), vals)}
        if psi_jacobian_det(g, c, b) > 1e-6:
            return g, c, b


@pytest.mark.parametrize("seed", range(8))
def test_psi_jacobian_fd_matches_product(seed):
    g, c, b = small_edge_instance(seed)
    prod = psi_jacobian_det(g, c, b)
    fd = psi_jacobian_det(g, c, b, method="fd")
    assert abs(fd) == pytest.approx(prod, rel=1e-6)
    mag, sign = psi_jacobian_det(g, c, b, want_sign=True)
    assert mag == pytest.approx(prod)
    assert sign in (-1, 1)
    assert sign * mag == pytest.approx(fd, rel=1e-6)


def test_edge_order_is_sorted_ids():
    g, _, _ = random_instance(7)
    assert edge_order(g) == sorted(e.id for e in g.edges)
