"""Holomorphic quadratic differentials on graphs.

An assignment q on the unoriented edges together with vertex positions z
is checked against two conditions at interior vertices: the balance
condition sum_v q_uv = 0 and the realization condition
sum_v q_uv / (z_u - z_v) = 0.  This module samples balanced q, applies
Moebius transformations, reduces instances by sending a boundary vertex to
infinity, and counts realizations with a multi-start Newton solver.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dirichlet import DegenerateEdgeError
from .graphs import (
    Edge,
    EdgeId,
    Graph,
    is_two_connected_to_boundary,
    wired_spanning_forest,
)

BALANCE_TOL = 1e-12


class PoleError(ValueError):
    """A vertex position hits the pole of a Moebius transformation."""


@dataclass(frozen=True)
class QAssignment:
    """Edge weights q, stored per unoriented edge id.

    `balanced` records whether the balance condition held at every interior
    vertex (within 1e-12) of the graph the assignment was built against.
    """

    values: dict[EdgeId, complex]
    balanced: bool

    @classmethod
    def from_values(cls, g: Graph, values: Mapping[EdgeId, complex]) -> "QAssignment":
        vals = {e.id: values[e.id] for e in sorted(g.edges, key=lambda e: e.id)}
        res = balance_residuals(g, vals)
        scale = max((abs(v) for v in vals.values()), default=0.0)
        ok = all(abs(r) <= BALANCE_TOL * max(1.0, scale) for r in res.values())
        return cls(values=vals, balanced=ok)


@dataclass(frozen=True)
class Realization:
    """Vertex positions z with the recomputed realization-condition residual
    (max interior magnitude)."""

    z: dict[str, complex]
    residual: float


@dataclass(frozen=True)
class MobiusTransform:
    """z -> (a z + b) / (c z + d) with ad - bc != 0."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate transform: ad - bc = 0")

    def __call__(self, z: complex) -> complex:
        den = self.c * z + self.d
        if den == 0:
            raise PoleError(f"point {z} is the pole of the transform")
        return (self.a * z + self.b) / den

    def pole(self) -> complex | None:
        if self.c == 0:
            return None
        return -self.d / self.c

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """Transform acting as self after other."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1, 0, 0, 1)

    @classmethod
    def affine(cls, a: complex, b: complex) -> "MobiusTransform":
        return cls(a, b, 0, 1)

    @classmethod
    def inversion(cls) -> "MobiusTransform":
        return cls(0, 1, 1, 0)


@dataclass(frozen=True)
class ResidualReport:
    """Per-interior-vertex residuals of the two defining conditions."""

    balance: dict[str, complex]
    realization: dict[str, complex]

    @property
    def max_balance(self) -> float:
        return max((abs(v) for v in self.balance.values()), default=0.0)

    @property
    def max_realization(self) -> float:
        return max((abs(v) for v in self.realization.values()), default=0.0)


def _qdict(q) -> Mapping[EdgeId, complex]:
    return q.values if isinstance(q, QAssignment) else q


def _zdict(z) -> Mapping[str, complex]:
    return z.z if isinstance(z, Realization) else z


def balance_residuals(g: Graph, q) -> dict[str, complex]:
    """Sum of q over incident edges, per interior vertex."""
    qv = _qdict(q)
    out: dict[str, complex] = {}
    for v in g.interior:
        out[v] = sum(qv[e.id] for e in g.adjacency[v] if not e.is_loop)
    return out


def realization_residuals(g: Graph, q, z) -> dict[str, complex]:
    """Sum of q_uv / (z_u - z_v) over incident edges, per interior vertex.

    Raises DegenerateEdgeError when adjacent positions coincide.
    """
    qv = _qdict(q)
    zv = _zdict(z)
    out: dict[str, complex] = {}
    for v in g.interior:
        acc = 0j
        for e in g.adjacency[v]:
            w = e.other(v)
            d = zv[v] - zv[w]
            if d == 0:
                raise DegenerateEdgeError(
                    f"edge {e.id} ({e.u!r},{e.v!r}) has coincident positions"
                )
            acc += qv[e.id] / d
        out[v] = acc
    return out


def residuals(g: Graph, q, z) -> ResidualReport:
    """Residuals of both conditions at every interior vertex."""
    return ResidualReport(
        balance=balance_residuals(g, q),
        realization=realization_residuals(g, q, z),
    )


def realization(g: Graph, q, z) -> Realization:
    """Wrap positions with a freshly computed residual."""
    zv = dict(_zdict(z))
    res = realization_residuals(g, q, zv)
    return Realization(z=zv, residual=max((abs(v) for v in res.values()), default=0.0))


def sample_balanced_q(g: Graph, seed: int) -> QAssignment:
    """Random q satisfying the balance condition at every interior vertex.

    Free values are drawn uniformly on [-1, 1] on the complement of a wired
    spanning forest; forest-edge values are then back-solved leaf-inward so
    each interior vertex balances exactly.
    """
    if not is_two_connected_to_boundary(g):
        raise ValueError("graph is not 2-connected to its boundary")
    forest = set(wired_spanning_forest(g))
    rng = np.random.default_rng(seed)
    q: dict[EdgeId, float] = {}
    for e in sorted(g.edges, key=lambda e: e.id):
        if e.id not in forest:
            q[e.id] = float(rng.uniform(-1.0, 1.0))
    # orient each forest component toward its boundary vertex
    children: dict[str, list] = {v: [] for v in g.vertices}
    parent_edge: dict[str, EdgeId] = {}
    depth: dict[str, int] = {}
    adj_forest: dict[str, list] = {v: [] for v in g.vertices}
    for eid in forest:
        e = g.edge(eid)
        adj_forest[e.u].append(e)
        adj_forest[e.v].append(e)
    stack = [(b, 0) for b in sorted(g.boundary)]
    seen = set(g.boundary)
    while stack:
        v, d = stack.pop()
        depth[v] = d
        for e in adj_forest[v]:
            w = e.other(v)
            if w in seen:
                continue
            seen.add(w)
            parent_edge[w] = e.id
            children[v].append(w)
            stack.append((w, d + 1))
    for v in sorted(g.interior, key=lambda v: -depth[v]):
        up = parent_edge[v]
        total = sum(q[e.id] for e in g.adjacency[v] if e.id != up and not e.is_loop)
        q[up] = -total
    return QAssignment.from_values(g, q)


def apply_mobius(g: Graph, m: MobiusTransform, q, z) -> Realization:
    """Transform all positions by m; q is untouched.

    The transformed positions satisfy the realization condition whenever
    the input did; the returned residual is recomputed, not assumed.
    """
    zv = _zdict(z)
    pole = m.pole()
    if pole is not None:
        for v, val in zv.items():
            if abs(complex(val) - pole) <= 1e-12 * (1.0 + abs(pole)):
                raise PoleError(
                    f"vertex {v!r} sits at the pole of the transform; "
                    "use send_boundary_to_infinity for the reduction"
                )
    moved = {v: m(complex(val)) for v, val in zv.items()}
    return realization(g, q, moved)


def send_boundary_to_infinity(
    g: Graph, q, z, v0: str
) -> tuple[Graph, QAssignment, Realization]:
    """Drop a boundary vertex and its edges, keeping the rest of (q, z).

    Requires v0 to be a boundary vertex adjacent to every interior vertex.
    The reduced instance only promises the realization condition (balance
    is lost with the removed edges); the returned residual says how well it
    holds for the supplied z.
    """
    if v0 not in g.boundary:
        raise ValueError(f"{v0!r} is not a boundary vertex")
    touching = {e.other(v0) for e in g.adjacency[v0]}
    missing = [v for v in g.interior if v not in touching]
    if missing:
        raise ValueError(f"{v0!r} is not adjacent to interior vertices {missing}")
    reduced = Graph(
        tuple(v for v in g.vertices if v != v0),
        g.boundary - {v0},
        tuple(e for e in g.edges if v0 not in (e.u, e.v)),
    )
    qv = _qdict(q)
    q_red = {e.id: qv[e.id] for e in reduced.edges}
    zv = {v: _zdict(z)[v] for v in reduced.vertices}
    return reduced, QAssignment.from_values(reduced, q_red), realization(reduced, q_red, zv)


def reattach_infinity(g: Graph, q, v0: str = "vinf") -> tuple[Graph, QAssignment]:
    """Inverse of the reduction: add a boundary vertex wired to every
    interior vertex, with edge weights chosen to restore balance."""
    if g.has_vertex(v0):
        raise ValueError(f"vertex name {v0!r} already taken")
    qv = _qdict(q)
    next_id = max((e.id for e in g.edges), default=-1) + 1
    new_edges = list(g.edges)
    q_new: dict[EdgeId, complex] = {e.id: qv[e.id] for e in g.edges}
    for v in g.interior:
        deficit = sum(qv[e.id] for e in g.adjacency[v] if not e.is_loop)
        new_edges.append(Edge(next_id, v, v0))
        q_new[next_id] = -deficit
        next_id += 1
    bigger = Graph(g.vertices + (v0,), g.boundary | {v0}, tuple(new_edges))
    return bigger, QAssignment.from_values(bigger, q_new)


# --- Newton solver -----------------------------------------------------------


class _System:
    """Dense form of the realization equations for fixed boundary positions."""

    def __init__(self, g: Graph, q, boundary_z: Mapping[str, complex]):
        qv = _qdict(q)
        missing = [v for v in g.boundary if v not in boundary_z]
        if missing:
            raise ValueError(f"missing boundary positions for {sorted(missing)}")
        vals = [complex(boundary_z[v]) for v in sorted(g.boundary)]
        if len(set(vals)) != len(vals):
            raise ValueError("boundary positions must be pairwise distinct")
        self.g = g
        self.interior = g.interior
        self.index = {v: i for i, v in enumerate(self.interior)}
        self.boundary_z = {v: complex(boundary_z[v]) for v in g.boundary}
        # per interior vertex: list of (q, interior index of other, fixed z)
        self.terms: list[list[tuple[complex, int, complex]]] = []
        for v in self.interior:
            row = []
            for e in g.adjacency[v]:
                if e.is_loop:
                    raise DegenerateEdgeError(f"self-loop {e.id} at {v!r}")
                w = e.other(v)
                j = self.index.get(w, -1)
                zb = 0j if j >= 0 else self.boundary_z[w]
                row.append((complex(qv[e.id]), j, zb))
            self.terms.append(row)

    def residual(self, z: np.ndarray) -> np.ndarray:
        n = len(self.interior)
        F = np.zeros(n, dtype=complex)
        for i in range(n):
            acc = 0j
            for qe, j, zb in self.terms[i]:
                d = z[i] - (z[j] if j >= 0 else zb)
                acc += qe / d
            F[i] = acc
        return F

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        n = len(self.interior)
        J = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for qe, j, zb in self.terms[i]:
                d = z[i] - (z[j] if j >= 0 else zb)
                t = qe / (d * d)
                J[i, i] -= t
                if j >= 0:
                    J[i, j] += t
        return J

    def min_separation(self, z: np.ndarray) -> float:
        out = np.inf
        for i in range(len(self.interior)):
            for _, j, zb in self.terms[i]:
                d = abs(z[i] - (z[j] if j >= 0 else zb))
                out = min(out, d)
        return out

    def _diffs(self, z: np.ndarray, i: int) -> np.ndarray:
        return np.array(
            [z[i] - (z[j] if j >= 0 else zb) for _, j, zb in self.terms[i]],
            dtype=complex,
        )

    def poly_residual(self, z: np.ndarray) -> np.ndarray:
        """The equations with denominators cleared: at each interior vertex,
        sum_e q_e prod_{e' != e} (z_u - z_{w'}).  Same zero set as residual()
        away from collisions, but polynomial, so the configuration at
        infinity repels Newton instead of attracting it."""
        n = len(self.interior)
        F = np.zeros(n, dtype=complex)
        for i in range(n):
            D = self._diffs(z, i)
            loo = _leave_one_out_products(D)
            F[i] = sum(row[0] * loo[a] for a, row in enumerate(self.terms[i]))
        return F

    def poly_jacobian(self, z: np.ndarray) -> np.ndarray:
        n = len(self.interior)
        J = np.zeros((n, n), dtype=complex)
        for i in range(n):
            row = self.terms[i]
            D = self._diffs(z, i)
            m = len(D)
            for a in range(m):
                qa = row[a][0]
                loo2 = _leave_one_out_products(np.delete(D, a))
                for pos in range(m - 1):
                    b = pos if pos < a else pos + 1
                    val = qa * loo2[pos]
                    J[i, i] += val
                    jb = row[b][1]
                    if jb >= 0:
                        J[i, jb] -= val
        return J


def _leave_one_out_products(d: np.ndarray) -> np.ndarray:
    m = len(d)
    pre = np.ones(m + 1, dtype=complex)
    for a in range(m):
        pre[a + 1] = pre[a] * d[a]
    suf = np.ones(m + 1, dtype=complex)
    for a in range(m - 1, -1, -1):
        suf[a] = suf[a + 1] * d[a]
    return pre[:m] * suf[1:]


def _newton(system: _System, z0: np.ndarray, iters: int, escape: float):
    """Newton iteration on the cleared-denominator form; stops on a tiny
    step.  The caller re-checks the rational residual before accepting."""
    z = z0.astype(complex)
    for _ in range(iters):
        F = system.poly_residual(z)
        try:
            step = np.linalg.solve(system.poly_jacobian(z), F)
        except np.linalg.LinAlgError:
            return None
        z = z - step
        if np.max(np.abs(z)) > escape:
            return None
        if np.max(np.abs(step)) <= 1e-14 * max(1.0, float(np.max(np.abs(z)))):
            return z
    return z


def solve_realizations(
    g: Graph,
    q,
    boundary_z: Mapping[str, complex],
    n_starts: int = 400,
    seed: int = 0,
    *,
    residual_tol: float = 1e-10,
    dedup_tol: float = 1e-6,
    newton_iters: int = 80,
    escape_radius: float | None = None,
) -> list[Realization]:
    """Distinct finite solutions of the realization condition, by multi-start
    Newton.

    Half the starts are drawn from the disk of radius 2 max|boundary z|
    around the boundary centroid, where solutions cluster; the other half
    use log-uniform radii out to the escape radius, because balanced q can
    place genuine solutions far outside the boundary scale.  Converged
    solutions are accepted at residual below residual_tol and deduplicated
    at max-coordinate distance dedup_tol.
    A balanced q always admits the configuration at infinity (every term
    decays, and balance cancels the leading 1/z order too, so the residual
    passes any tolerance far out); iterates that leave the escape_radius
    disk (default 1e4 * (1 + max |boundary z|)) are treated as that escape
    and discarded.  An empty list is a valid outcome.  Near-singular
    Jacobians at accepted solutions emit a warning (the q may be
    nongeneric).
    """
    system = _System(g, q, boundary_z)
    n = len(system.interior)
    if n == 0:
        return []
    bvals = np.array(list(system.boundary_z.values()), dtype=complex)
    center = bvals.mean() if len(bvals) else 0j
    bscale = float(np.max(np.abs(bvals))) if len(bvals) else 1.0
    radius = 2.0 * max(1e-3, bscale)
    if escape_radius is None:
        escape_radius = 1e4 * (1.0 + bscale)
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    spread = max(np.log(escape_radius / radius), 1.0)
    for start in range(n_starts):
        if start % 2 == 0:
            r = radius * np.sqrt(rng.uniform(0, 1, size=n))
        else:
            r = radius * np.exp(rng.uniform(0, 1, size=n) * spread)
        theta = rng.uniform(0, 2 * np.pi, size=n)
        z0 = center + r * np.exp(1j * theta)
        z = _newton(system, z0, newton_iters, escape_radius)
        if z is None:
            continue
        if system.min_separation(z) < 1e-12:
            continue
        res = float(np.max(np.abs(system.residual(z))))
        if not res < residual_tol:
            continue
        if any(np.max(np.abs(z - prev)) < dedup_tol for prev in found):
            continue
        found.append(z)
        sv = np.linalg.svd(system.jacobian(z), compute_uv=False)
        if sv[-1] < 1e-8 * max(sv[0], 1e-12):
            warnings.warn(
                "near-singular Jacobian at a solution; q may be nongeneric",
                stacklevel=2,
            )
    out = []
    for z in found:
        full = dict(system.boundary_z)
        for v, i in system.index.items():
            full[v] = complex(z[i])
        out.append(realization(g, q, full))
    return out


@dataclass(frozen=True)
class RankReport:
    """Numerical rank of the realization-condition Jacobian at a solution."""

    rank: int
    corank: int
    singular_values: tuple[float, ...]
    tolerance: float


def detect_solution_family(
    g: Graph, q, boundary_z: Mapping[str, complex], solution
) -> RankReport:
    """Rank analysis at a solution; corank > 0 flags a continuous family."""
    zv = _zdict(solution)
    system = _System(g, q, boundary_z)
    zvec = np.array([complex(zv[v]) for v in system.interior])
    res = np.max(np.abs(system.residual(zvec))) if len(zvec) else 0.0
    if res >= 1e-10:
        raise ValueError(f"not a solution: residual {res:.3e} >= 1e-10")
    J = system.jacobian(zvec)
    sv = np.linalg.svd(J, compute_uv=False) if len(zvec) else np.zeros(0)
    tol = 1e-8 * max(float(sv[0]) if len(sv) else 0.0, 1e-4)
    rank = int(np.sum(sv > tol))
    return RankReport(
        rank=rank,
        corank=len(sv) - rank,
        singular_values=tuple(float(s) for s in sv),
        tolerance=tol,
    )
