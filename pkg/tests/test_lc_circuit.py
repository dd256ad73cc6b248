"""AC network solver, power bookkeeping, and resonance detection."""

import math

import numpy as np
import pytest

from chromahqd.graphs import Graph
from chromahqd.lc_circuit import (
    CircuitSingularError,
    ElementStack,
    PhasorDrive,
    TreePolynomial,
    impedance,
    laplacian_determinant,
    reactive_power_as_hqd,
    resonant_frequencies,
    solve_circuit,
    spanning_tree_polynomial,
)


def series_divider():
    """x --L-- a --C-- y with unit elements."""
    g = Graph.build(["x", "a", "y"], ["x", "y"], [("x", "a"), ("a", "y")])
    stacks = {0: ElementStack(L=1.0), 1: ElementStack(C=1.0)}
    return g, stacks


def random_lc_fixture(seed):
    rng = np.random.default_rng(seed)
    g = Graph.build(
        ["x", "a", "b", "y"],
        ["x", "y"],
        [("x", "a"), ("a", "b"), ("b", "y"), ("a", "y"), ("x", "b")],
    )
    stacks = {}
    for e in g.edges:
        val = float(rng.uniform(0.5, 2.0))
        if rng.integers(2):
            stacks[e.id] = ElementStack(C=val)
        else:
            stacks[e.id] = ElementStack(L=val)
    # ensure both element kinds appear so the tree polynomial is not monomial
    stacks[0] = ElementStack(L=float(rng.uniform(0.5, 2.0)))
    stacks[1] = ElementStack(C=float(rng.uniform(0.5, 2.0)))
    return g, stacks


def test_impedance_hand_values():
    assert impedance(ElementStack(L=2.0), 3.0) == 6j
    assert impedance(ElementStack(C=0.5), 2.0) == pytest.approx(-1j)
    assert impedance(ElementStack(R=5.0), 7.0) == 5.0
    both = impedance(ElementStack(L=1.0, C=1.0, R=1.0), 2.0)
    assert both == pytest.approx(1.0 + 1.5j)
    with pytest.raises(ValueError, match="omega"):
        impedance(ElementStack(L=1.0), 0.0)


def test_element_stack_validation():
    with pytest.raises(ValueError, match="empty"):
        ElementStack()
    with pytest.raises(ValueError, match="positive"):
        ElementStack(L=-1.0)
    with pytest.raises(ValueError, match="positive"):
        ElementStack(C=0.0)


def test_phasor_drive_validation():
    with pytest.raises(ValueError, match="omega"):
        PhasorDrive({"x": 1.0}, 0.0)


def test_series_divider_hand_solution():
    g, stacks = series_divider()
    drive = PhasorDrive({"x": 1.0, "y": 0.0}, 2.0)
    voltages, report = solve_circuit(g, stacks, drive)
    assert voltages["a"] == pytest.approx(-1 / 3)
    # one series current through both elements, oriented x -> a -> y
    i0 = report.edges[0].current
    assert report.edges[1].current == pytest.approx(i0)
    assert i0 == pytest.approx(-2j / 3)
    assert report.edges[0].S == pytest.approx(8j / 9)
    assert report.edges[1].S == pytest.approx(-2j / 9)
    for ep in report.edges.values():
        assert ep.real_power == pytest.approx(0.0, abs=1e-15)


def test_missing_stack_and_zero_impedance():
    g, stacks = series_divider()
    drive = PhasorDrive({"x": 1.0, "y": 0.0}, 2.0)
    with pytest.raises(ValueError, match="missing element stacks"):
        solve_circuit(g, {0: stacks[0]}, drive)
    shorted = {0: ElementStack(L=1.0, C=1.0), 1: stacks[1]}
    with pytest.raises(CircuitSingularError, match="zero impedance"):
        solve_circuit(g, shorted, PhasorDrive({"x": 1.0, "y": 0.0}, 1.0))


def test_solve_at_resonance_raises():
    g, stacks = series_divider()
    with pytest.raises(CircuitSingularError, match="singular"):
        solve_circuit(g, stacks, PhasorDrive({"x": 1.0, "y": 0.0}, 1.0))


def test_power_decomposition_matches_instantaneous():
    g = Graph.build(["x", "a", "y"], ["x", "y"], [("x", "a"), ("a", "y")])
    stacks = {0: ElementStack(R=1.0), 1: ElementStack(R=1.0, L=0.5)}
    drive = PhasorDrive({"x": 1.0, "y": 0.0}, 3.0)
    _, report = solve_circuit(g, stacks, drive)
    period = 2 * math.pi / drive.omega
    for eid in (0, 1):
        for t in np.linspace(0.0, period, 17):
            parts = report.instantaneous_power_decomposition(eid, t)
            assert parts["total"] == pytest.approx(
                report.instantaneous_power(eid, t), abs=1e-12
            )
        grid = np.linspace(0.0, period, 20001)
        avg = float(
            np.trapezoid([report.instantaneous_power(eid, t) for t in grid], grid)
            / period
        )
        assert avg == pytest.approx(report.edges[eid].real_power, abs=1e-6)


def test_resistive_power_hand_value():
    g = Graph.build(["x", "a", "y"], ["x", "y"], [("x", "a"), ("a", "y")])
    stacks = {0: ElementStack(R=1.0), 1: ElementStack(R=1.0)}
    _, report = solve_circuit(g, stacks, PhasorDrive({"x": 1.0, "y": 0.0}, 1.0))
    assert report.edges[0].real_power == pytest.approx(1 / 8)
    assert report.edges[0].reactive_power == pytest.approx(0.0, abs=1e-15)


def test_tree_polynomial_hand_values():
    g, stacks = series_divider()
    poly = spanning_tree_polynomial(g, stacks)
    assert poly.coeffs == (1.0, 1.0)
    assert poly.normalization_power == 1
    assert not poly.is_monomial
    scaled = spanning_tree_polynomial(
        g, {0: ElementStack(L=2.0), 1: ElementStack(C=3.0)}
    )
    assert scaled.coeffs == (0.5, 3.0)
    assert scaled(2.0) == pytest.approx(6.5)


def test_tree_polynomial_validation():
    g, stacks = series_divider()
    with pytest.raises(ValueError, match="exactly one"):
        spanning_tree_polynomial(g, {0: ElementStack(R=1.0), 1: stacks[1]})
    with pytest.raises(ValueError, match="exactly one"):
        spanning_tree_polynomial(g, {0: ElementStack(L=1.0, C=1.0), 1: stacks[1]})
    with pytest.raises(ValueError, match="missing"):
        spanning_tree_polynomial(g, {0: stacks[0]})
    bare = Graph.build(["a", "b"], [], [("a", "b")])
    with pytest.raises(ValueError, match="boundary"):
        spanning_tree_polynomial(bare, {0: ElementStack(L=1.0)})


def test_tree_polynomial_is_monomial_flag():
    assert TreePolynomial(coeffs=(0.0, 2.0, 0.0), normalization_power=2).is_monomial
    assert not TreePolynomial(coeffs=(1.0, 2.0), normalization_power=1).is_monomial


def test_resonance_series_divider():
    g, stacks = series_divider()
    rep = resonant_frequencies(g, stacks)
    assert rep.omegas == pytest.approx((1.0,))
    assert not rep.degenerate
    assert rep.zero_root_multiplicity == 0
    assert rep.verified


def test_resonance_all_inductors_degenerate():
    g, _ = series_divider()
    rep = resonant_frequencies(
        g, {0: ElementStack(L=1.0), 1: ElementStack(L=2.0)}
    )
    assert rep.degenerate
    assert rep.omegas == ()
    assert not rep.verified
    assert rep.zero_root_multiplicity == 0


def test_resonance_forced_capacitor_monomial():
    # the only spanning tree uses the capacitor, so P is a monomial in z
    g = Graph.build(["x", "a", "b"], ["x"], [("x", "a"), ("a", "b")])
    rep = resonant_frequencies(
        g, {0: ElementStack(C=1.0), 1: ElementStack(L=1.0)}
    )
    assert rep.degenerate
    assert rep.zero_root_multiplicity == 1


def test_resonance_structural_zero_root():
    # parallel inductors a--b force every tree through a capacitor, but two
    # tree shapes remain, so P(z) = z * (linear) with one true resonance
    g = Graph.build(
        ["x", "a", "b"],
        ["x"],
        [("x", "a"), ("x", "a"), ("a", "b"), ("a", "b"), ("x", "b")],
    )
    stacks = {
        0: ElementStack(C=1.0),
        1: ElementStack(C=2.0),
        2: ElementStack(L=1.0),
        3: ElementStack(L=0.5),
        4: ElementStack(C=1.5),
    }
    rep = resonant_frequencies(g, stacks)
    assert not rep.degenerate
    assert rep.zero_root_multiplicity == 1
    assert len(rep.omegas) == 1
    assert rep.verified
    poly = rep.polynomial
    assert poly.coeffs[0] == 0.0
    # direct check that the reported omega kills the polynomial
    assert abs(poly(-rep.omegas[0] ** 2)) < 1e-9


@pytest.mark.parametrize("seed", [0, 1])
def test_determinant_identity_random_lc(seed):
    g, stacks = random_lc_fixture(seed)
    poly = spanning_tree_polynomial(g, stacks)
    t = poly.normalization_power
    for omega in np.linspace(0.3, 3.0, 50):
        det = laplacian_determinant(g, stacks, float(omega))
        pred = poly(complex(-(omega**2))) / (1j * omega) ** t
        assert abs(det - pred) <= 1e-8 * max(1.0, abs(pred))


@pytest.mark.parametrize("seed", [0, 1])
def test_resonance_roots_real_negative(seed):
    g, stacks = random_lc_fixture(seed)
    rep = resonant_frequencies(g, stacks)
    assert not rep.degenerate
    for r in rep.roots:
        assert abs(r.imag) <= 1e-6 * max(1.0, abs(r.real))
        assert r.real < 1e-12
    assert rep.verified
    for w in rep.omegas:
        assert w > 0


def test_reactive_power_as_hqd_series():
    g, stacks = series_divider()
    qa, real, rr = reactive_power_as_hqd(g, stacks, PhasorDrive({"x": 1.0, "y": 0.0}, 2.0))
    assert qa.values[0] == pytest.approx(8 / 9)
    assert qa.values[1] == pytest.approx(-2 / 9)
    assert real.residual < 1e-12
    # the balance sums are reported honestly and need not vanish
    assert rr.max_balance == pytest.approx(2 / 3)
    assert not qa.balanced


@pytest.mark.parametrize("seed", range(5))
def test_reactive_power_as_hqd_random(seed):
    g, stacks = random_lc_fixture(seed + 10)
    rng = np.random.default_rng(seed)
    omega = float(rng.uniform(0.4, 2.5))
    rep = resonant_frequencies(g, stacks)
    while any(abs(omega - w) < 1e-3 for w in rep.omegas):
        omega *= 1.01
    drive = PhasorDrive({"x": 1.0, "y": -0.5 + 0.25j}, omega)
    qa, real, _ = reactive_power_as_hqd(g, stacks, drive)
    scale = max(abs(v) for v in qa.values.values())
    assert real.residual < 1e-10 * max(1.0, scale)
    _, report = solve_circuit(g, stacks, drive)
    for ep in report.edges.values():
        assert abs(ep.real_power) < 1e-12 * max(1.0, abs(ep.S))


def test_reactive_power_rejects_resistors():
    g, stacks = series_divider()
    stacks = {0: ElementStack(L=1.0, R=1.0), 1: stacks[1]}
    with pytest.raises(ValueError, match="resistors"):
        reactive_power_as_hqd(g, stacks, PhasorDrive({"x": 1.0, "y": 0.0}, 2.0))
