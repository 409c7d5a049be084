from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamperturb.graph import (
    Digraph,
    Graph,
    GraphInputError,
    complete_bipartite,
    connected_components,
    core,
    cycle_graph,
    degeneracy_ordering,
    degree_stats,
    disjoint_union,
    format_graph,
    induced,
    is_connected,
    neighborhood,
    parse_graph,
    path_graph,
    petersen_graph,
    read_graph,
    remove_vertices,
    union,
    write_graph,
)


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def test_degree_stats_examples():
    assert degree_stats(Graph.complete(4)) == (3, 3, Fraction(3))
    assert degree_stats(complete_bipartite(1, 5)) == (1, 5, Fraction(10, 6))
    assert degree_stats(petersen_graph()) == (3, 3, Fraction(3))


def test_induced_examples():
    c6 = cycle_graph(6)
    assert induced(c6, [0, 1, 2]) == path_graph(3)
    assert induced(Graph.complete(5), [1, 3, 4]) == Graph.complete(3)
    outer = induced(petersen_graph(), range(5))
    assert outer == cycle_graph(5)


def test_induced_records_parent_labels_one_level():
    g = cycle_graph(8)
    h = induced(g, [2, 3, 4, 5])
    hh = induced(h, [1, 2])
    assert [h.lift(v) for v in range(h.n)] == [2, 3, 4, 5]
    assert [hh.lift(v) for v in range(hh.n)] == [1, 2]


def test_union_examples():
    c4 = cycle_graph(4)
    assert union(c4, Graph.empty(4)) == c4
    assert union(c4, Graph.from_edges(4, [(0, 2), (1, 3)])) == Graph.complete(4)
    assert union(c4, c4) == c4
    with pytest.raises(GraphInputError):
        union(c4, Graph.empty(5))


def test_degeneracy_examples():
    tree = Graph.from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    assert degeneracy_ordering(tree, 1).ok
    res = degeneracy_ordering(Graph.complete(5), 3)
    assert not res.ok and res.witness == (0, 1, 2, 3, 4)
    assert degeneracy_ordering(cycle_graph(6), 2).ok


def test_neighborhood_examples():
    assert neighborhood(Graph.complete(4), [0]) == (1, 2, 3)
    two = disjoint_union(Graph.complete(3), Graph.complete(3))
    assert neighborhood(two, [0, 1, 2]) == ()
    assert neighborhood(cycle_graph(5), [0, 1]) == (2, 4)


def test_components_examples():
    comps = connected_components(disjoint_union(Graph.complete(3), Graph.complete(4)))
    assert sorted(len(c) for c in comps) == [3, 4]
    assert len(connected_components(Graph.empty(5))) == 5
    assert is_connected(cycle_graph(10))


def test_core_keeps_min_degree():
    g = disjoint_union(Graph.complete(5), path_graph(4))
    assert core(g, 3) == (0, 1, 2, 3, 4)
    assert core(g, 5) == ()


def test_input_validation():
    with pytest.raises(GraphInputError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(GraphInputError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(GraphInputError):
        parse_graph("3 2\n0 1\n")
    with pytest.raises(GraphInputError):
        parse_graph("3 1\n1 0\n")
    with pytest.raises(GraphInputError):
        parse_graph("x y\n")


def test_file_round_trip(tmp_path):
    g = petersen_graph()
    path = tmp_path / "p.graph"
    write_graph(g, path)
    first = path.read_bytes()
    h = read_graph(path)
    assert h == g
    write_graph(h, path)
    assert path.read_bytes() == first


def test_digraph_round_trip():
    d = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0), (1, 0)])
    assert parse_graph(format_graph(d), directed=True) == d
    assert d.m == 4


@given(graphs())
def test_graph_invariants(g):
    for v in range(g.n):
        assert v not in g.adj[v]
        assert list(g.adj[v]) == sorted(set(g.adj[v]))
        for u in g.adj[v]:
            assert v in g.adj[u]
    assert 2 * g.m == sum(len(nb) for nb in g.adj)


@given(graphs(), graphs(), graphs())
def test_union_algebra(a, b, c):
    n = min(a.n, b.n, c.n)
    a, b, c = (induced(x, range(n)) for x in (a, b, c))
    a, b, c = (Graph(x.n, x.adj) for x in (a, b, c))
    assert union(a, b) == union(b, a)
    assert union(union(a, b), c) == union(a, union(b, c))
    assert union(a, a) == a


@given(graphs(), st.data())
def test_induced_and_neighborhood(g, data):
    assert induced(g, range(g.n)) == g
    s = data.draw(st.lists(st.integers(0, g.n - 1), unique=True))
    assert not set(neighborhood(g, s)) & set(s)
    h = remove_vertices(g, s)
    assert h.n == g.n - len(s)


@given(graphs())
def test_degeneracy_with_max_degree_succeeds(g):
    max_deg = max(len(nb) for nb in g.adj)
    res = degeneracy_ordering(g, max_deg)
    assert res.ok and sorted(res.ordering) == list(range(g.n))


@settings(max_examples=50)
@given(graphs())
def test_text_format_round_trip(g):
    assert parse_graph(format_graph(g)) == g
