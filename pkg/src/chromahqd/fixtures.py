"""Small named graphs used by the CLI, tests, and benchmarks.

Each fixture returns a fresh Graph plus a dict of extras (known chromatic
coefficients, suggested boundary data).  The tripartite-hub fixture comes
with helpers that build a balanced edge assignment and the one-parameter
family of realizations it admits.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .graphs import EdgeId, Graph, augment_k
from .hqd import QAssignment

_FIG332_HUBS = ("v6", "v7", "v8")
_FIG332_SPOKES = ("v1", "v2", "v3", "v4", "v5")


def _point() -> tuple[Graph, dict]:
    g = Graph.build(["a"], [], [])
    return g, {"chromatic": (0.0, 1.0)}


def _k2() -> tuple[Graph, dict]:
    g = Graph.build(["a", "b"], [], [("a", "b")])
    return g, {"chromatic": (0.0, -1.0, 1.0)}


def _path3() -> tuple[Graph, dict]:
    g = Graph.build(["a", "b", "c"], [], [("a", "b"), ("b", "c")])
    return g, {"chromatic": (0.0, 1.0, -2.0, 1.0)}


def _triangle() -> tuple[Graph, dict]:
    g = Graph.build(["a", "b", "c"], [], [("a", "b"), ("b", "c"), ("a", "c")])
    return g, {"chromatic": (0.0, 2.0, -3.0, 1.0)}


def _star(k: int) -> tuple[Graph, dict]:
    base, _ = _point()
    g, values = augment_k(base, k)
    return g, {"values": values, "k": k}


def _fig332() -> tuple[Graph, dict]:
    vertices = [f"v{i}" for i in range(1, 9)]
    edges = [(f"v{j}", f"v{i}") for i in (6, 7, 8) for j in range(1, 6)]
    g = Graph.build(vertices, ["v1", "v2", "v3"], edges)
    return g, {
        "hubs": _FIG332_HUBS,
        "spokes": _FIG332_SPOKES,
        "suggested_boundary_z": {"v1": 0.0, "v2": 1.0, "v3": 2.0},
    }


_REGISTRY = {
    "point": _point,
    "k2": _k2,
    "path3": _path3,
    "triangle": _triangle,
    "star": _star,
    "fig332": _fig332,
}


def list_fixtures() -> list[str]:
    return sorted(_REGISTRY)


def fixture(name: str, k: int | None = None) -> tuple[Graph, dict]:
    """Build a named fixture; `star` needs k, the rest ignore it."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown fixture {name!r}; have {list_fixtures()}")
    if name == "star":
        if k is None:
            raise ValueError("fixture 'star' needs k")
        return _star(k)
    return _REGISTRY[name]()


def _fig332_edge(i: int, j: int) -> EdgeId:
    """Edge id of spoke vj -- hub vi (i in 6..8, j in 1..5)."""
    return (i - 6) * 5 + (j - 1)


def fig332_balanced_q(seed: int) -> tuple[Graph, QAssignment]:
    """Random edge assignment summing to zero around every vertex.

    The unsigned incidence matrix of the hub fixture has an 8-dimensional
    nullspace; a seeded Gaussian combination of an orthonormal basis for it
    gives q with all eight vertex sums (interior and boundary) zero.
    """
    g, _ = _fig332()
    n, m = g.num_vertices, g.num_edges
    M = np.zeros((n, m))
    for e in g.edges:
        M[g.vertex_index[e.u], e.id] += 1.0
        M[g.vertex_index[e.v], e.id] += 1.0
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * s[0]))
    basis = vt[rank:]
    rng = np.random.default_rng(seed)
    combo = basis.T @ rng.standard_normal(basis.shape[0])
    scale = np.max(np.abs(combo))
    if scale == 0:
        raise ArithmeticError("degenerate nullspace draw; try another seed")
    combo = combo / scale
    det = combo[_fig332_edge(6, 4)] * combo[_fig332_edge(7, 5)]
    det -= combo[_fig332_edge(6, 5)] * combo[_fig332_edge(7, 4)]
    if abs(det) < 1e-8:
        raise ArithmeticError(
            f"seed {seed} gives a near-singular hub pair; try another seed"
        )
    values = {eid: float(combo[eid]) for eid in range(m)}
    return g, QAssignment.from_values(g, values)


def fig332_family_solution(
    g: Graph,
    q,
    boundary_z: Mapping[str, complex],
    b: complex,
) -> dict[str, complex]:
    """Member of the one-parameter solution family with hub value b.

    All three hubs sit at b; the equations at v4 and v5 then vanish by
    balance, and the first two hub equations fix 1/(b - z4) and 1/(b - z5)
    linearly.  The third hub equation follows from the spoke balances, so
    the whole configuration solves the realization system for any valid b.
    """
    qv = q.values if isinstance(q, QAssignment) else q
    z: dict[str, complex] = {}
    for j in (1, 2, 3):
        name = f"v{j}"
        if name not in boundary_z:
            raise ValueError(f"missing boundary value for {name}")
        z[name] = complex(boundary_z[name])
        if abs(b - z[name]) < 1e-12 * (1.0 + abs(b)):
            raise ArithmeticError(f"hub value b coincides with z({name})")
    acc = {}
    for i in (6, 7, 8):
        acc[i] = sum(qv[_fig332_edge(i, j)] / (b - z[f"v{j}"]) for j in (1, 2, 3))
    M = np.array(
        [
            [qv[_fig332_edge(6, 4)], qv[_fig332_edge(6, 5)]],
            [qv[_fig332_edge(7, 4)], qv[_fig332_edge(7, 5)]],
        ],
        dtype=complex,
    )
    rhs = np.array([-acc[6], -acc[7]], dtype=complex)
    try:
        xy = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"hub pair is singular for this q: {exc}") from exc
    x, y = xy
    if x == 0 or y == 0:
        raise ArithmeticError("family member escapes to infinity at this b")
    z["v4"] = b - 1.0 / x
    z["v5"] = b - 1.0 / y
    for name in _FIG332_HUBS:
        z[name] = complex(b)
    return z
