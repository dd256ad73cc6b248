"""Graph data model and structural operations.

Graphs are finite multigraphs with a distinguished set of boundary
vertices.  Vertices are identified by strings, edges by stable integer
ids that survive deletion and contraction.  All operations are pure:
they return new Graph instances and never mutate their input.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

EdgeId = int


class UnknownEdgeError(KeyError):
    """Raised when an edge id is not present in the graph."""


class SelfLoopContractionError(ValueError):
    """Raised when asked to contract a self-loop."""


@dataclass(frozen=True)
class Edge:
    """Undirected edge with a stable id.  u/v order is storage order only."""

    id: EdgeId
    u: str
    v: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def endpoints(self) -> tuple[str, str]:
        return (self.u, self.v)

    def other(self, w: str) -> str:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise ValueError(f"vertex {w!r} is not an endpoint of edge {self.id}")

    def pair(self) -> frozenset[str]:
        """Unordered endpoint pair (a 1-element set for loops)."""
        return frozenset((self.u, self.v))


@dataclass(frozen=True)
class Graph:
    """Multigraph with boundary.  Immutable; derived indexes are cached."""

    vertices: tuple[str, ...]
    boundary: frozenset[str]
    edges: tuple[Edge, ...]

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        boundary: Iterable[str],
        edge_pairs: Iterable[tuple[str, str]],
        edge_ids: Sequence[EdgeId] | None = None,
    ) -> "Graph":
        """Construct a graph from endpoint pairs, assigning ids 0..m-1 by default."""
        vs = tuple(vertices)
        pairs = list(edge_pairs)
        if edge_ids is None:
            edge_ids = range(len(pairs))
        edges = tuple(Edge(i, u, v) for i, (u, v) in zip(edge_ids, pairs))
        return cls(vs, frozenset(boundary), edges)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def interior(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.boundary)

    @cached_property
    def edge_by_id(self) -> dict[EdgeId, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def adjacency(self) -> dict[str, tuple[Edge, ...]]:
        """vertex -> incident edges (loops listed once)."""
        adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append(e)
            if e.v != e.u:
                adj[e.v].append(e)
        return {v: tuple(es) for v, es in adj.items()}

    def edge(self, eid: EdgeId) -> Edge:
        try:
            return self.edge_by_id[eid]
        except KeyError:
            raise UnknownEdgeError(f"no edge with id {eid}") from None

    def degree(self, v: str) -> int:
        """Edge-multiplicity degree; a loop counts twice."""
        d = 0
        for e in self.adjacency[v]:
            d += 2 if e.is_loop else 1
        return d

    def has_vertex(self, v: str) -> bool:
        return v in self.vertex_index

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(e.other(v) for e in self.adjacency[v] if not e.is_loop)


def validate(g: Graph) -> list[str]:
    """Return a list of invariant violations (empty when g is well formed).

    Checks: unique vertex/edge ids, boundary contained in the vertex set,
    edge endpoints present, every edge incident to at least one interior
    vertex, and no self-loops at interior vertices.
    """
    problems: list[str] = []
    if len(set(g.vertices)) != len(g.vertices):
        problems.append("duplicate vertex names")
    ids = [e.id for e in g.edges]
    if len(set(ids)) != len(ids):
        problems.append("duplicate edge ids")
    vset = set(g.vertices)
    for b in g.boundary:
        if b not in vset:
            problems.append(f"boundary vertex {b!r} not in vertex set")
    for e in g.edges:
        if e.u not in vset or e.v not in vset:
            problems.append(f"edge {e.id} has endpoint outside vertex set")
            continue
        if e.u in g.boundary and e.v in g.boundary:
            problems.append(f"edge {e.id} joins two boundary vertices")
        if e.is_loop and e.u not in g.boundary:
            problems.append(f"self-loop {e.id} at interior vertex {e.u!r}")
    return problems


def delete_edge(g: Graph, eid: EdgeId) -> Graph:
    """Remove one edge, keeping all vertices and the remaining edge ids."""
    g.edge(eid)
    return Graph(g.vertices, g.boundary, tuple(e for e in g.edges if e.id != eid))


def contract_edge(g: Graph, eid: EdgeId) -> Graph:
    """Contract an edge: its endpoints merge into one vertex keeping u's name.

    Parallel copies of the contracted edge become self-loops and are kept
    (callers that want simple graphs merge or drop them explicitly).  The
    merged vertex is boundary iff either endpoint was.
    """
    e = g.edge(eid)
    if e.is_loop:
        raise SelfLoopContractionError(f"edge {eid} is a self-loop")
    keep, gone = e.u, e.v

    def rename(w: str) -> str:
        return keep if w == gone else w

    vertices = tuple(v for v in g.vertices if v != gone)
    boundary = set(g.boundary)
    if gone in boundary:
        boundary.discard(gone)
        boundary.add(keep)
    edges = tuple(
        Edge(f.id, rename(f.u), rename(f.v)) for f in g.edges if f.id != eid
    )
    return Graph(vertices, frozenset(boundary), edges)


def multi_edge_classes(g: Graph) -> dict[frozenset[str], list[EdgeId]]:
    """Group edge ids by unordered endpoint pair, in id order."""
    classes: dict[frozenset[str], list[EdgeId]] = {}
    for e in sorted(g.edges, key=lambda e: e.id):
        classes.setdefault(e.pair(), []).append(e.id)
    return classes


def merge_multi_edges(
    g: Graph, q: Mapping[EdgeId, complex]
) -> tuple[Graph, dict[EdgeId, complex]]:
    """Merge each parallel class into one edge, summing the q values.

    The surviving edge keeps the smallest id of its class.  A class whose
    q values cancel exactly keeps its merged edge with q = 0 and triggers
    a warning, since downstream solvers treat zero-q edges as degenerate.
    """
    merged_edges: list[Edge] = []
    merged_q: dict[EdgeId, complex] = {}
    for pair, eids in multi_edge_classes(g).items():
        rep = g.edge(eids[0])
        merged_edges.append(rep)
        total = sum(q[i] for i in eids)
        if len(eids) > 1 and total == 0:
            warnings.warn(
                f"parallel class {sorted(pair)} merged to q = 0", stacklevel=2
            )
        merged_q[rep.id] = total
    merged_edges.sort(key=lambda e: e.id)
    return Graph(g.vertices, g.boundary, tuple(merged_edges)), merged_q


def reduce_degree2(g: Graph) -> tuple[Graph, dict[str, str]]:
    """Contract away interior degree-2 vertices with two distinct neighbors.

    Each such vertex forces its neighbors to share a position, so both of
    its edges are contracted; the process repeats until no reducible vertex
    remains.  Returns the reduced graph and the map from original vertices
    to their surviving representative.
    """
    current = g
    rep = {v: v for v in g.vertices}
    while True:
        target = None
        for v in current.interior:
            inc = current.adjacency[v]
            if len(inc) == 2 and current.degree(v) == 2:
                a, b = inc[0].other(v), inc[1].other(v)
                if a != b:
                    target = (v, inc[0], inc[1])
                    break
        if target is None:
            break
        v, e1, e2 = target
        # First contraction folds v into its first neighbor, the second
        # identifies the two neighbors.  Edge e2 moves with v.
        a = e1.other(v)
        step = contract_edge(current, e1.id)  # v or a survives by name rule
        survivor = e1.u if e1.u in step.vertex_index else e1.v
        folded = e1.v if survivor == e1.u else e1.u
        for key, val in rep.items():
            if val == folded:
                rep[key] = survivor
        moved = step.edge(e2.id)
        current = contract_edge(step, e2.id)
        keep2, gone2 = moved.u, moved.v
        for key, val in rep.items():
            if val == gone2:
                rep[key] = keep2
    return current, rep


def augment_k(
    g: Graph, k: int, values: Sequence[float] | None = None
) -> tuple[Graph, dict[str, float]]:
    """Attach k+1 new boundary vertices, each adjacent to every vertex of g.

    Previous boundary vertices of g become interior.  Returns the augmented
    graph and the value map for the new boundary.  Default values are
    0, 1, ..., k; explicit values must be distinct.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if values is None:
        values = [float(i) for i in range(k + 1)]
    values = list(values)
    if len(values) != k + 1:
        raise ValueError(f"need {k + 1} boundary values, got {len(values)}")
    if len(set(values)) != len(values):
        raise ValueError("boundary values must be distinct")
    taken = set(g.vertices)
    names = []
    for i in range(k + 1):
        name = f"b{i}"
        while name in taken:
            name = "_" + name
        taken.add(name)
        names.append(name)
    next_id = max((e.id for e in g.edges), default=-1) + 1
    edges = list(g.edges)
    for name in names:
        for v in g.vertices:
            edges.append(Edge(next_id, v, name))
            next_id += 1
    aug = Graph(g.vertices + tuple(names), frozenset(names), tuple(edges))
    return aug, dict(zip(names, values))


def wire_boundary(g: Graph) -> Graph:
    """Identify all boundary vertices into a single boundary vertex.

    Edges between two boundary vertices would become boundary self-loops
    and are dropped.  Used for spanning-tree counts relative to the
    boundary.
    """
    if not g.boundary:
        raise ValueError("graph has no boundary to wire")
    hub = min(g.boundary)

    def rename(w: str) -> str:
        return hub if w in g.boundary else w

    vertices = tuple(v for v in g.vertices if v not in g.boundary or v == hub)
    edges = []
    for e in g.edges:
        u, v = rename(e.u), rename(e.v)
        if u == v == hub:
            continue
        edges.append(Edge(e.id, u, v))
    return Graph(vertices, frozenset({hub}), tuple(edges))


def is_two_connected_to_boundary(g: Graph) -> bool:
    """True iff every interior vertex lies on two vertex-disjoint paths to
    two distinct boundary vertices.

    Equivalent formulation: join an auxiliary vertex to all boundary
    vertices; the property holds iff every interior vertex shares a
    biconnected block with the auxiliary vertex.
    """
    import networkx as nx

    if len(g.boundary) < 2:
        raise ValueError("need at least 2 boundary vertices")
    if not g.interior:
        return True
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from((e.u, e.v) for e in g.edges if not e.is_loop)
    aux = object()
    h.add_edges_from((aux, b) for b in g.boundary)
    blocks_of: dict = {v: set() for v in h.nodes}
    for i, block in enumerate(nx.biconnected_components(h)):
        for v in block:
            blocks_of[v].add(i)
    aux_blocks = blocks_of[aux]
    return all(blocks_of[v] & aux_blocks for v in g.interior)


def wired_spanning_forest(g: Graph) -> list[EdgeId]:
    """Edge ids of a spanning tree of the graph with boundary identified.

    Greedy union-find scan in edge-id order, so the result is deterministic.
    Raises if some interior vertex cannot reach the boundary.
    """
    parent: dict[str, str] = {v: v for v in g.vertices}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    hub = None
    for b in sorted(g.boundary):
        if hub is None:
            hub = b
        else:
            parent[find(b)] = find(hub)
    chosen: list[EdgeId] = []
    for e in sorted(g.edges, key=lambda e: e.id):
        ru, rv = find(e.u), find(e.v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(e.id)
    roots = {find(v) for v in g.vertices}
    if len(roots) > 1:
        unreached = sorted(
            v for v in g.interior if hub is None or find(v) != find(hub)
        )
        raise ValueError(
            f"interior vertices not connected to the boundary: {unreached}"
        )
    return chosen


# --- JSON interchange -------------------------------------------------------


def _value_to_json(x):
    if isinstance(x, complex):
        if x.imag == 0:
            return x.real
        return [x.real, x.imag]
    return x


def _value_from_json(x):
    if isinstance(x, list):
        re, im = x
        return complex(re, im)
    return float(x) if x is not None else None


def graph_to_json(
    g: Graph,
    boundary_values: Mapping[str, complex] | None = None,
    edge_attrs: Mapping[EdgeId, Mapping[str, float]] | None = None,
) -> dict:
    """Serialize to the interchange dict: vertices, boundary map, edge list."""
    boundary_values = boundary_values or {}
    edge_attrs = edge_attrs or {}
    doc = {
        "vertices": list(g.vertices),
        "boundary": {
            b: _value_to_json(boundary_values.get(b)) for b in sorted(g.boundary)
        },
        "edges": [],
    }
    for e in sorted(g.edges, key=lambda e: e.id):
        rec: dict = {"id": e.id, "u": e.u, "v": e.v}
        for key, val in (edge_attrs.get(e.id) or {}).items():
            rec[key] = val
        doc["edges"].append(rec)
    return doc


def graph_from_json(doc: dict) -> tuple[Graph, dict[str, float], dict[EdgeId, dict]]:
    """Parse the interchange dict.

    Returns (graph, boundary value map, extra edge attributes).  Boundary
    values may be null (vertex is boundary but carries no value yet).
    """
    try:
        vertices = tuple(doc["vertices"])
        bmap = doc["boundary"]
        edge_recs = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph document: missing {exc}") from exc
    edges = []
    attrs: dict[EdgeId, dict] = {}
    for rec in edge_recs:
        try:
            e = Edge(int(rec["id"]), str(rec["u"]), str(rec["v"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(
                f"malformed edge record {rec!r}: needs id, u, v"
            ) from exc
        edges.append(e)
        extra = {k: v for k, v in rec.items() if k not in ("id", "u", "v")}
        if extra:
            attrs[e.id] = extra
    g = Graph(vertices, frozenset(bmap), tuple(edges))
    values = {}
    for b, raw in bmap.items():
        val = _value_from_json(raw)
        if val is not None:
            values[b] = val
    problems = validate(g)
    if problems:
        raise ValueError("invalid graph: " + "; ".join(problems))
    return g, values, attrs


def load_graph(path: str) -> tuple[Graph, dict[str, float], dict[EdgeId, dict]]:
    with open(path) as fh:
        return graph_from_json(json.load(fh))


def dump_graph(
    path: str,
    g: Graph,
    boundary_values: Mapping[str, complex] | None = None,
    edge_attrs: Mapping[EdgeId, Mapping[str, float]] | None = None,
) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_json(g, boundary_values, edge_attrs), fh, indent=2)
        fh.write("\n")
