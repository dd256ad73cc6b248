"""Dirichlet problems on conductance networks.

Harmonic extension of boundary data, Green's functions of the interior
Laplacian, the energy map psi (conductances to edge energies), and the
derivative/transfer-current formulas used by the realization solver.

Conductances are positive reals in the classical setting; signed or complex
conductances are accepted with ``indefinite=True`` (the phasor-circuit and
q-derived Laplacians need them), in which case singularity of the interior
block is detected and raised rather than prevented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graphs import EdgeId, Graph

RESIDUAL_TOL = 1e-12


class SingularSystemError(ArithmeticError):
    """Interior Laplacian is singular (or numerically so) for this input."""


class DegenerateEdgeError(ValueError):
    """An edge has coincident endpoint values where a difference is divided."""


@dataclass(frozen=True)
class HarmonicSolution:
    """Solution of a Dirichlet problem: vertex values, per-edge energies
    q_e = c_e (h(u) - h(v))^2, and their sum Z."""

    values: dict[str, complex]
    energies: dict[EdgeId, complex]
    total_energy: complex


@dataclass(frozen=True)
class GreensFunction:
    """Inverse of the interior Laplacian block; zero on boundary rows."""

    interior: tuple[str, ...]
    matrix: np.ndarray

    def entry(self, v: str, w: str) -> complex:
        try:
            i = self.interior.index(v)
            j = self.interior.index(w)
        except ValueError:
            return 0.0
        return self.matrix[i, j]


def _check_conductances(g: Graph, c: Mapping[EdgeId, complex], indefinite: bool):
    missing = [e.id for e in g.edges if e.id not in c]
    if missing:
        raise ValueError(f"missing conductances for edges {missing}")
    is_complex = any(isinstance(c[e.id], complex) for e in g.edges)
    if not is_complex and not indefinite:
        bad = [e.id for e in g.edges if not c[e.id] > 0]
        if bad:
            raise ValueError(
                f"nonpositive conductance on edges {bad}; "
                "pass indefinite=True for signed Laplacians"
            )
    return is_complex


def interior_laplacian(
    g: Graph, c: Mapping[EdgeId, complex], dtype=float
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Interior block A of the weighted Laplacian and the boundary coupling.

    Returns (A, B, interior) where the Dirichlet system is A h_int = -B h_b
    with B the interior-by-boundary coupling block (entries -c_e).
    """
    interior = g.interior
    iidx = {v: i for i, v in enumerate(interior)}
    bnd = sorted(g.boundary)
    bidx = {v: i for i, v in enumerate(bnd)}
    A = np.zeros((len(interior), len(interior)), dtype=dtype)
    B = np.zeros((len(interior), len(bnd)), dtype=dtype)
    for e in g.edges:
        if e.is_loop:
            continue
        w = c[e.id]
        ui, vi = iidx.get(e.u), iidx.get(e.v)
        if ui is not None and vi is not None:
            A[ui, ui] += w
            A[vi, vi] += w
            A[ui, vi] -= w
            A[vi, ui] -= w
        elif ui is not None:
            A[ui, ui] += w
            B[ui, bidx[e.v]] -= w
        elif vi is not None:
            A[vi, vi] += w
            B[vi, bidx[e.u]] -= w
    return A, B, interior


def solve_dirichlet(
    g: Graph,
    c: Mapping[EdgeId, complex],
    b: Mapping[str, complex],
    *,
    indefinite: bool = False,
) -> HarmonicSolution:
    """Harmonic extension of boundary data b under conductances c.

    The returned values agree with b on the boundary and have zero weighted
    Laplacian at interior vertices; energies carry q_e = c_e (h(u)-h(v))^2.
    """
    is_complex = _check_conductances(g, c, indefinite)
    missing = [v for v in g.boundary if v not in b]
    if missing:
        raise ValueError(f"missing boundary values for {sorted(missing)}")
    unknown = [v for v in b if v not in g.boundary]
    if unknown:
        raise ValueError(f"values given for non-boundary vertices {sorted(unknown)}")
    if any(isinstance(b[v], complex) for v in b):
        is_complex = True
    dtype = complex if is_complex else float
    A, B, interior = interior_laplacian(g, c, dtype=dtype)
    bnd = sorted(g.boundary)
    bvec = np.array([b[v] for v in bnd], dtype=dtype)
    rhs = -B @ bvec
    scale = RESIDUAL_TOL * (1.0 + (np.max(np.abs(bvec)) if len(bnd) else 0.0))
    if len(interior):
        try:
            x = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"interior Laplacian is singular: {exc}") from exc
        residual = np.max(np.abs(A @ x - rhs))
        if residual > scale:
            raise SingularSystemError(
                f"interior system residual {residual:.3e} exceeds tolerance {scale:.3e}"
            )
    else:
        x = np.zeros(0, dtype=dtype)
    values: dict[str, complex] = {}
    for i, v in enumerate(interior):
        values[v] = x[i]
    for v in bnd:
        values[v] = b[v]
    values = {v: values[v] for v in g.vertices}
    energies: dict[EdgeId, complex] = {}
    for e in sorted(g.edges, key=lambda e: e.id):
        d = values[e.u] - values[e.v]
        energies[e.id] = c[e.id] * d * d
    total = sum(energies.values())
    return HarmonicSolution(values=values, energies=energies, total_energy=total)


def greens_function(
    g: Graph, c: Mapping[EdgeId, complex], *, indefinite: bool = False
) -> GreensFunction:
    """Inverse of the interior Laplacian block."""
    is_complex = _check_conductances(g, c, indefinite)
    dtype = complex if is_complex else float
    A, _, interior = interior_laplacian(g, c, dtype=dtype)
    n = len(interior)
    try:
        G = np.linalg.inv(A) if n else np.zeros((0, 0), dtype=dtype)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"interior Laplacian is singular: {exc}") from exc
    if n:
        residual = np.max(np.abs(A @ G - np.eye(n)))
        if residual > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(G)))):
            raise SingularSystemError(
                f"Green's function residual {residual:.3e} too large"
            )
    return GreensFunction(interior=interior, matrix=G)


def _vertex_values(z) -> Mapping[str, complex]:
    if isinstance(z, HarmonicSolution):
        return z.values
    if hasattr(z, "z") and isinstance(getattr(z, "z"), dict):
        return z.z
    return z


def dz_dq_edge(g: Graph, c: Mapping[EdgeId, complex], z, v: str, e: EdgeId):
    """Derivative of the position of v with respect to the weight q on e.

    Formula: (G(v, v1) - G(v, v2)) / (z(v1) - z(v2)) for e = v1 v2, where G
    is the Green's function of the Laplacian with conductances c.  Zero for
    boundary v.  The value does not depend on the endpoint order.
    """
    zmap = _vertex_values(z)
    edge = g.edge(e)
    dz = zmap[edge.u] - zmap[edge.v]
    if dz == 0:
        raise DegenerateEdgeError(f"edge {e} has coincident endpoint values")
    G = greens_function(g, c, indefinite=True)
    return (G.entry(v, edge.u) - G.entry(v, edge.v)) / dz


def transfer_current(g: Graph, c: Mapping[EdgeId, complex], e: EdgeId, v: str):
    """Current across e per unit current injected at v (boundary grounded).

    Sign convention: positive when the induced current runs from the second
    stored endpoint of e to the first, i.e. c_e (G(v,u2) - G(v,u1)).
    """
    edge = g.edge(e)
    G = greens_function(g, c, indefinite=True)
    return c[e] * (G.entry(v, edge.v) - G.entry(v, edge.u))


def edge_order(g: Graph) -> list[EdgeId]:
    return sorted(e.id for e in g.edges)


def psi_map(
    g: Graph,
    c: Mapping[EdgeId, complex],
    b: Mapping[str, complex],
    *,
    indefinite: bool = False,
) -> dict[EdgeId, complex]:
    """Edge energies of the harmonic extension, keyed by edge id."""
    sol = solve_dirichlet(g, c, b, indefinite=indefinite)
    return dict(sol.energies)


def _fd_jacobian(g, c, b, step_scale=1e-6):
    order = edge_order(g)
    m = len(order)
    J = np.zeros((m, m))
    base = {eid: float(c[eid]) for eid in order}
    for j, ej in enumerate(order):
        h = step_scale * max(1.0, abs(base[ej]))
        up = dict(base)
        up[ej] = base[ej] + h
        down = dict(base)
        down[ej] = base[ej] - h
        qu = psi_map(g, up, b, indefinite=True)
        qd = psi_map(g, down, b, indefinite=True)
        for i, ei in enumerate(order):
            J[i, j] = (qu[ei] - qd[ei]) / (2 * h)
    return J


def psi_jacobian_det(
    g: Graph,
    c: Mapping[EdgeId, complex],
    b: Mapping[str, complex],
    *,
    method: str = "product",
    want_sign: bool = False,
):
    """|det| of the Jacobian of the energy map c -> q.

    Closed form: prod_e q_e / c_e = prod_e (h(u) - h(v))^2, exact zero if
    any edge has equal endpoint values.  method="fd" instead differentiates
    psi_map numerically (signed determinant).  With want_sign=True returns
    (magnitude, sign) with the sign taken from the numerical Jacobian.
    """
    if method == "fd":
        det = float(np.linalg.det(_fd_jacobian(g, c, b)))
        if want_sign:
            return abs(det), (0 if det == 0 else (1 if det > 0 else -1))
        return det
    if method != "product":
        raise ValueError(f"unknown method {method!r}")
    sol = solve_dirichlet(g, c, b)
    prod = 1.0
    for e in sorted(g.edges, key=lambda e: e.id):
        d = sol.values[e.u] - sol.values[e.v]
        prod *= d * d
        if prod == 0:
            prod = 0.0
            break
    if want_sign:
        det = float(np.linalg.det(_fd_jacobian(g, c, b)))
        return prod, (0 if det == 0 else (1 if det > 0 else -1))
    return prod
