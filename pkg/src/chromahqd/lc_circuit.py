"""AC circuit analysis on boundary-driven graphs.

Edges carry series element stacks (inductor, capacitor, resistor), boundary
vertices carry phasor drives.  Solving the network is a complex Dirichlet
problem with conductances 1/Z_e(omega).  For resistorless circuits the
per-edge reactive powers realize the voltage phasors in the quadratic-drop
sense, and the resonant frequencies come out of a spanning-tree polynomial
of the boundary-wired graph.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dirichlet import SingularSystemError, interior_laplacian, solve_dirichlet
from .graphs import EdgeId, Graph, wire_boundary
from .hqd import QAssignment, Realization, ResidualReport, realization, residuals

MAX_TREE_EDGES = 16
ROOT_IMAG_BAND = 1e-6
ROOT_DEDUP_TOL = 1e-6
DET_DIP_FACTOR = 1e-6


class CircuitSingularError(SingularSystemError):
    """The network has no unique voltage solution at this frequency."""


@dataclass(frozen=True)
class ElementStack:
    """Series L, C, R on one edge; each optional but at least one present."""

    L: float | None = None
    C: float | None = None
    R: float | None = None

    def __post_init__(self):
        if self.L is None and self.C is None and self.R is None:
            raise ValueError("element stack is empty")
        for name in ("L", "C", "R"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name}={val!r} must be positive")


def impedance(stack: ElementStack, omega: float) -> complex:
    if not omega > 0:
        raise ValueError("omega must be positive")
    z = 0j
    if stack.L is not None:
        z += 1j * omega * stack.L
    if stack.C is not None:
        z += 1.0 / (1j * omega * stack.C)
    if stack.R is not None:
        z += stack.R
    return z


@dataclass(frozen=True)
class PhasorDrive:
    """Boundary voltage phasors at a single angular frequency."""

    amplitudes: Mapping[str, complex]
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class EdgePower:
    """Complex power S = du * conj(I) absorbed by one edge.

    Phasors are peak amplitudes, so the time-averaged dissipation is
    Re(S)/2; the reactive power is reported as Im(S) without the half, the
    amplitude of the oscillating energy exchange term.
    """

    edge_id: EdgeId
    S: complex
    current: complex
    voltage_drop: complex
    impedance: complex

    @property
    def real_power(self) -> float:
        return self.S.real / 2.0

    @property
    def reactive_power(self) -> float:
        return self.S.imag


@dataclass(frozen=True)
class PowerReport:
    omega: float
    edges: dict[EdgeId, EdgePower]

    def instantaneous_power(self, eid: EdgeId, t: float) -> float:
        """Re(du e^{iwt}) * Re(I e^{iwt}) at time t."""
        ep = self.edges[eid]
        rot = cmath.exp(1j * self.omega * t)
        return (ep.voltage_drop * rot).real * (ep.current * rot).real

    def instantaneous_power_decomposition(self, eid: EdgeId, t: float) -> dict:
        """Split p(t) into its dissipative and reactive oscillation.

        With phi = arg(du), p(t) = Re(S)/2 * (1 + cos(2wt + 2phi))
        + Im(S)/2 * sin(2wt + 2phi): the first term has mean Re(S)/2 and
        never changes sign, the second averages to zero.
        """
        ep = self.edges[eid]
        phi = cmath.phase(ep.voltage_drop)
        angle = 2.0 * self.omega * t + 2.0 * phi
        active = 0.5 * ep.S.real * (1.0 + math.cos(angle))
        reactive = 0.5 * ep.S.imag * math.sin(angle)
        return {"active": active, "reactive": reactive, "total": active + reactive}


def _impedances(
    g: Graph, stacks: Mapping[EdgeId, ElementStack], omega: float
) -> dict[EdgeId, complex]:
    missing = [e.id for e in g.edges if e.id not in stacks]
    if missing:
        raise ValueError(f"missing element stacks for edges {missing}")
    out = {}
    for e in g.edges:
        z = impedance(stacks[e.id], omega)
        if z == 0:
            raise CircuitSingularError(
                f"edge {e.id} has zero impedance at omega={omega!r}"
            )
        out[e.id] = z
    return out


def solve_circuit(
    g: Graph,
    stacks: Mapping[EdgeId, ElementStack],
    drive: PhasorDrive,
) -> tuple[dict[str, complex], PowerReport]:
    """Node voltage phasors and per-edge powers under the given drive."""
    Z = _impedances(g, stacks, drive.omega)
    c = {eid: 1.0 / z for eid, z in Z.items()}
    amplitudes = {v: complex(val) for v, val in drive.amplitudes.items()}
    try:
        sol = solve_dirichlet(g, c, amplitudes)
    except SingularSystemError as exc:
        raise CircuitSingularError(
            f"network is singular at omega={drive.omega!r}: {exc}"
        ) from exc
    powers = {}
    for e in sorted(g.edges, key=lambda e: e.id):
        drop = sol.values[e.u] - sol.values[e.v]
        current = drop / Z[e.id]
        powers[e.id] = EdgePower(
            edge_id=e.id,
            S=drop * current.conjugate(),
            current=current,
            voltage_drop=drop,
            impedance=Z[e.id],
        )
    return dict(sol.values), PowerReport(omega=drive.omega, edges=powers)


def reactive_power_as_hqd(
    g: Graph,
    stacks: Mapping[EdgeId, ElementStack],
    drive: PhasorDrive,
) -> tuple[QAssignment, Realization, ResidualReport]:
    """Reactive powers of a resistorless circuit, read as a quadratic drop.

    The voltages realize q_e = Im(S_e): dividing each q by its voltage
    difference recovers the currents, so current conservation is exactly
    the realization identity.  Re(S_e) vanishes edge by edge.  The balance
    sums at interior nodes are reported as found; they need not vanish.
    """
    resistive = [eid for eid, st in stacks.items() if st.R is not None]
    if resistive:
        raise ValueError(f"edges {sorted(resistive)} have resistors")
    voltages, report = solve_circuit(g, stacks, drive)
    q = {eid: ep.S.imag for eid, ep in report.edges.items()}
    qa = QAssignment.from_values(g, q)
    rr = residuals(g, q, voltages)
    return qa, realization(g, q, voltages), rr


@dataclass(frozen=True)
class TreePolynomial:
    """Spanning-tree generating polynomial of the boundary-wired graph.

    Coefficient j collects, over spanning trees with j capacitor edges,
    the products of C_e over capacitors and 1/L_e over inductors.  The
    interior Laplacian determinant satisfies
    det(omega) = P(-omega^2) / (i omega)^t with t = normalization_power.
    """

    coeffs: tuple[float, ...]
    normalization_power: int

    def __call__(self, z: complex) -> complex:
        acc = 0j if isinstance(z, complex) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    @property
    def is_monomial(self) -> bool:
        return sum(1 for c in self.coeffs if c != 0.0) <= 1


def spanning_tree_polynomial(
    g: Graph, stacks: Mapping[EdgeId, ElementStack]
) -> TreePolynomial:
    """Enumerate spanning trees of the wired graph, weighting each edge
    C_e * z for capacitors and 1/L_e for inductors."""
    if not g.boundary:
        raise ValueError("circuit needs at least one boundary (driven) vertex")
    for e in g.edges:
        st = stacks.get(e.id)
        if st is None:
            raise ValueError(f"missing element stack for edge {e.id}")
        if st.R is not None or (st.L is None) == (st.C is None):
            raise ValueError(
                f"edge {e.id} must carry exactly one inductor or one capacitor"
            )
    gw = wire_boundary(g)
    edges = [e for e in gw.edges if not e.is_loop]
    if len(edges) > MAX_TREE_EDGES:
        raise ValueError(
            f"{len(edges)} edges exceeds the spanning-tree cap {MAX_TREE_EDGES}"
        )
    n = gw.num_vertices
    t = n - 1
    vix = gw.vertex_index
    coeffs = [0.0] * (t + 1)
    found = False
    for combo in itertools.combinations(edges, t):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        ok = True
        for e in combo:
            ru, rv = find(vix[e.u]), find(vix[e.v])
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if not ok:
            continue
        found = True
        weight = 1.0
        ncap = 0
        for e in combo:
            st = stacks[e.id]
            if st.C is not None:
                weight *= st.C
                ncap += 1
            else:
                weight *= 1.0 / st.L
        coeffs[ncap] += weight
    if not found:
        raise ValueError("wired graph has no spanning tree (disconnected)")
    return TreePolynomial(coeffs=tuple(coeffs), normalization_power=t)


def laplacian_determinant(
    g: Graph, stacks: Mapping[EdgeId, ElementStack], omega: float
) -> complex:
    """det of the interior block of the admittance Laplacian at omega."""
    Z = _impedances(g, stacks, omega)
    c = {eid: 1.0 / z for eid, z in Z.items()}
    A, _, interior = interior_laplacian(g, c, dtype=complex)
    if not interior:
        return 1.0 + 0j
    return complex(np.linalg.det(A))


@dataclass(frozen=True)
class ResonanceReport:
    omegas: tuple[float, ...]
    degenerate: bool
    polynomial: TreePolynomial
    roots: tuple[complex, ...]
    zero_root_multiplicity: int
    normalization_power: int
    verified: bool


def _polish_root(coeffs_desc: np.ndarray, r: float) -> float:
    deriv = np.polyder(coeffs_desc)
    for _ in range(50):
        dp = np.polyval(deriv, r)
        if dp == 0:
            break
        step = np.polyval(coeffs_desc, r) / dp
        r -= step
        if abs(step) <= 1e-15 * max(1.0, abs(r)):
            break
    return r


def resonant_frequencies(
    g: Graph, stacks: Mapping[EdgeId, ElementStack]
) -> ResonanceReport:
    """Resonances from the roots of the spanning-tree polynomial.

    The determinant identity makes omega a resonance exactly when
    P(-omega^2) = 0, so the report takes the strictly negative real roots
    r of P and returns omega = sqrt(-r), ascending.  Structural zero roots
    (no all-inductor spanning tree) are trimmed and counted separately.  A
    monomial P never vanishes at positive omega and is flagged degenerate.
    Each omega is verified by a determinant dip against nearby frequencies.
    """
    poly = spanning_tree_polynomial(g, stacks)
    t = poly.normalization_power
    if poly.is_monomial:
        nz = next((i for i, c in enumerate(poly.coeffs) if c != 0.0), 0)
        return ResonanceReport(
            omegas=(),
            degenerate=True,
            polynomial=poly,
            roots=(),
            zero_root_multiplicity=nz,
            normalization_power=t,
            verified=False,
        )
    coeffs = list(poly.coeffs)
    zero_mult = 0
    while coeffs[zero_mult] == 0.0:
        zero_mult += 1
    trimmed = coeffs[zero_mult:]
    while trimmed and trimmed[-1] == 0.0:
        trimmed.pop()
    desc = np.array(trimmed[::-1], dtype=float)
    raw = np.roots(desc) if len(desc) > 1 else np.array([])
    accepted = []
    for r in raw:
        if abs(r.imag) <= ROOT_IMAG_BAND * max(1.0, abs(r.real)) and r.real < 0:
            accepted.append(_polish_root(desc, float(r.real)))
    accepted.sort()
    merged: list[float] = []
    for r in accepted:
        if merged and abs(r - merged[-1]) <= ROOT_DEDUP_TOL * max(1.0, abs(r)):
            continue
        merged.append(r)
    omegas = tuple(sorted(math.sqrt(-r) for r in merged))
    verified = True
    for w in omegas:
        dip = abs(laplacian_determinant(g, stacks, w))
        wings = 0.5 * (
            abs(laplacian_determinant(g, stacks, 0.95 * w))
            + abs(laplacian_determinant(g, stacks, 1.05 * w))
        )
        if not dip < DET_DIP_FACTOR * wings:
            verified = False
    return ResonanceReport(
        omegas=omegas,
        degenerate=False,
        polynomial=poly,
        roots=tuple(complex(r) for r in raw),
        zero_root_multiplicity=zero_mult,
        normalization_power=t,
        verified=verified,
    )
