"""Graph model: construction, edit operations, reductions, serialization."""

import json

import pytest

from chromahqd.graphs import (
    Graph,
    SelfLoopContractionError,
    UnknownEdgeError,
    augment_k,
    contract_edge,
    delete_edge,
    graph_from_json,
    graph_to_json,
    is_two_connected_to_boundary,
    load_graph,
    dump_graph,
    merge_multi_edges,
    multi_edge_classes,
    reduce_degree2,
    validate,
    wire_boundary,
    wired_spanning_forest,
)


def square():
    return Graph.build(
        ["a", "b", "c", "d"],
        ["a", "c"],
        [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
    )


def test_basic_indexes():
    g = square()
    assert g.num_vertices == 4
    assert g.num_edges == 4
    assert g.interior == ("b", "d")
    assert g.edge(2).endpoints() == ("c", "d")
    assert set(g.neighbors("b")) == {"a", "c"}
    assert g.degree("a") == 2
    with pytest.raises(UnknownEdgeError):
        g.edge(99)


def test_validate_flags_problems():
    ok = square()
    assert validate(ok) == []
    bad = Graph.build(["a", "b"], ["a", "b"], [("a", "b")])
    assert any("two boundary" in p for p in validate(bad))
    looped = Graph.build(["a", "b"], ["b"], [("a", "a")])
    assert any("self-loop" in p for p in validate(looped))


def test_delete_and_contract():
    g = square()
    smaller = delete_edge(g, 0)
    assert smaller.num_edges == 3
    assert smaller.num_vertices == 4
    merged = contract_edge(g, 0)
    assert merged.num_vertices == 3
    assert not merged.has_vertex("b")
    assert "a" in merged.boundary
    # the two other edges at b now touch a
    assert {frozenset(e.endpoints()) for e in merged.edges} == {
        frozenset(("a", "c")),
        frozenset(("c", "d")),
        frozenset(("d", "a")),
    }
    with pytest.raises(SelfLoopContractionError):
        contract_edge(Graph.build(["a"], [], [("a", "a")]), 0)


def test_contract_keeps_parallel_as_loops_elsewhere():
    g = Graph.build(["a", "b", "c"], ["c"], [("a", "b"), ("a", "b"), ("b", "c")])
    out = contract_edge(g, 0)
    loops = [e for e in out.edges if e.is_loop]
    assert len(loops) == 1 and loops[0].id == 1


def test_multi_edge_merge_sums_q():
    g = Graph.build(["a", "b", "c"], ["c"], [("a", "b"), ("b", "a"), ("b", "c")])
    classes = multi_edge_classes(g)
    assert classes[frozenset(("a", "b"))] == [0, 1]
    merged, q = merge_multi_edges(g, {0: 1.5, 1: 2.0, 2: -3.5})
    assert merged.num_edges == 2
    assert q[0] == 3.5
    with pytest.warns(UserWarning):
        merge_multi_edges(g, {0: 1.0, 1: -1.0, 2: 0.5})


def test_reduce_degree2_chain():
    # path a - x - y - b: both interior vertices fold into the a side,
    # leaving a single edge between the boundary vertices
    g = Graph.build(
        ["a", "x", "y", "b"], ["a", "b"], [("a", "x"), ("x", "y"), ("y", "b")]
    )
    reduced, rep = reduce_degree2(g)
    assert len(reduced.interior) == 0
    assert reduced.num_edges == 1
    assert rep["x"] == rep["y"] == rep["a"]
    assert rep["b"] == "b"


def test_reduce_degree2_square():
    # reducing b identifies the boundary corners a and c; d then sits between
    # two parallel edges to the merged corner, which is not reducible
    g = square()
    reduced, rep = reduce_degree2(g)
    assert rep["b"] == rep["a"] == rep["c"]
    assert reduced.interior == ("d",)
    assert reduced.num_edges == 2
    assert len(reduced.boundary) == 1


def test_augment_k_structure():
    base = Graph.build(["u", "v"], [], [("u", "v")])
    aug, values = augment_k(base, 2)
    assert sorted(values.values()) == [0.0, 1.0, 2.0]
    assert len(aug.boundary) == 3
    assert aug.num_edges == 1 + 3 * 2
    assert validate(aug) == []
    # former boundary becomes interior
    based = Graph.build(["u", "v"], ["v"], [("u", "v")])
    aug2, _ = augment_k(based, 1)
    assert set(aug2.interior) == {"u", "v"}


def test_augment_k_rejects_bad_values():
    base = Graph.build(["u"], [], [])
    with pytest.raises(ValueError):
        augment_k(base, 1, values=[1.0])
    with pytest.raises(ValueError):
        augment_k(base, 1, values=[1.0, 1.0])
    with pytest.raises(ValueError):
        augment_k(base, -1)


def test_augment_k_avoids_name_clash():
    base = Graph.build(["b0"], [], [])
    aug, values = augment_k(base, 0)
    assert "b0" in aug.vertices
    assert len(aug.vertices) == 2
    assert set(values) == aug.boundary


def test_wire_boundary():
    g = square()
    wired = wire_boundary(g)
    assert len(wired.boundary) == 1
    assert wired.num_edges == 4
    hub = next(iter(wired.boundary))
    assert all(hub in e.endpoints() for e in wired.edges)
    with pytest.raises(ValueError):
        wire_boundary(Graph.build(["a"], [], []))


def test_two_connectivity():
    assert is_two_connected_to_boundary(square())
    # pendant interior vertex reaches the boundary through one cut vertex
    g = Graph.build(
        ["a", "b", "c", "p"],
        ["a", "c"],
        [("a", "b"), ("b", "c"), ("b", "p")],
    )
    assert not is_two_connected_to_boundary(g)


def test_wired_spanning_forest_deterministic():
    g = square()
    chosen = wired_spanning_forest(g)
    assert chosen == wired_spanning_forest(g)
    # one tree edge per interior vertex once the boundary is identified
    assert len(chosen) == len(g.interior)
    isolated = Graph.build(["a", "b", "x"], ["a", "b"], [("a", "b")])
    with pytest.raises(ValueError, match="x"):
        wired_spanning_forest(isolated)


def test_json_round_trip(tmp_path):
    g = square()
    values = {"a": 1.0, "c": complex(0.0, 2.0)}
    doc = graph_to_json(g, values, {0: {"L": 2.5}})
    text = json.dumps(doc)
    g2, values2, attrs = graph_from_json(json.loads(text))
    assert g2 == g
    assert values2["a"] == 1.0
    assert values2["c"] == complex(0.0, 2.0)
    assert attrs[0] == {"L": 2.5}
    path = tmp_path / "g.json"
    dump_graph(str(path), g, values)
    g3, values3, _ = load_graph(str(path))
    assert g3 == g and values3 == values2


def test_json_null_boundary_value():
    doc = graph_to_json(square())
    g, values, _ = graph_from_json(doc)
    assert values == {}
    assert g.boundary == frozenset({"a", "c"})


def test_json_rejects_invalid():
    with pytest.raises(ValueError, match="malformed"):
        graph_from_json({"vertices": ["a"]})
    bad = {
        "vertices": ["a", "b"],
        "boundary": {"a": 0, "b": 1},
        "edges": [{"id": 0, "u": "a", "v": "b"}],
    }
    with pytest.raises(ValueError, match="invalid graph"):
        graph_from_json(bad)


def test_json_rejects_malformed_edge_record():
    doc = {
        "vertices": ["a", "b"],
        "boundary": {"a": 0},
        "edges": [{"id": 0, "ends": ["a", "b"]}],
    }
    with pytest.raises(ValueError, match="malformed edge record"):
        graph_from_json(doc)
