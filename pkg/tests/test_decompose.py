import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hamperturb.certificates import CapacityError, verify_certificate
from hamperturb.checkers.connectivity import vertex_connectivity
from hamperturb.decompose import (
    connectivity_bisection,
    disjoint_paths,
    extract_highly_connected,
    kappa_of,
    partition_bfkm,
    partition_lemma29,
    spanning_path_system,
)
from hamperturb.families import FamilySpec, build_family
from hamperturb.graph import (
    Graph,
    GraphInputError,
    complete_bipartite,
    cycle_graph,
    disjoint_union,
    induced,
    petersen_graph,
)


def grid(rows, cols):
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def assert_partition(g, res):
    assert sorted(v for b in res.blocks for v in b) == list(range(g.n))
    for b, k in zip(res.blocks, res.per_block_connectivity):
        assert k == vertex_connectivity(induced(g, b))[0]


# ---- extraction --------------------------------------------------------


def test_extract_examples():
    assert extract_highly_connected(Graph.complete(10), 9) == tuple(range(10))
    two = disjoint_union(Graph.complete(6), Graph.complete(6))
    assert extract_highly_connected(two, 5) == tuple(range(6))
    assert extract_highly_connected(petersen_graph(), 3) == tuple(range(10))
    assert extract_highly_connected(petersen_graph(), 4) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_extracted_set_meets_target(seed, target):
    rng = random.Random(seed)
    g = oracles.random_graph(rng, rng.randint(4, 18), rng.uniform(0.2, 0.8))
    a = extract_highly_connected(g, target)
    if a is not None:
        assert vertex_connectivity(induced(g, a))[0] >= target
    elif g.n <= 9:
        # nothing qualifies: no subset of size > target is target-connected
        import itertools

        for size in range(target + 1, g.n + 1):
            for s in itertools.combinations(range(g.n), size):
                assert oracles.kappa(induced(g, s)) < target


# ---- partitions ----------------------------------------------------------


def test_bfkm_examples():
    three = disjoint_union(*[Graph.complete(8)] * 3)
    res = partition_bfkm(three)
    assert res.ok and res.blocks == [tuple(range(i, i + 8)) for i in (0, 8, 16)]
    assert res.per_block_connectivity == [7, 7, 7]
    res = partition_bfkm(Graph.complete(20))
    assert res.ok and len(res.blocks) == 1
    five = build_family(FamilySpec("BalancedCliques", 30, delta=0.15))
    res = partition_bfkm(five)
    assert res.ok and len(res.blocks) == 5 and res.per_block_connectivity == [5] * 5
    assert_partition(five, res)


def test_bfkm_rejects_isolated_vertex():
    with pytest.raises(GraphInputError):
        partition_bfkm(Graph.empty(3))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_bfkm_random_blocks_are_verified(seed):
    rng = random.Random(seed)
    g = oracles.random_graph(rng, rng.randint(8, 30), rng.uniform(0.25, 0.7))
    k = min(len(a) for a in g.adj)
    if k == 0:
        return
    res = partition_bfkm(g)
    assert_partition(g, res)
    if res.ok:
        assert all(kp >= k * k / (16 * g.n) for kp in res.per_block_connectivity)
        assert all(len(b) >= k / 8 for b in res.blocks)
    else:
        assert res.refusal


def test_lemma29_examples():
    for n in (4, 9, 25):
        res = partition_lemma29(Graph.complete(n))
        assert res.ok and len(res.blocks) == 1
    two = disjoint_union(Graph.complete(10), Graph.complete(10))
    res = partition_lemma29(two, alpha_bound=2)
    assert res.ok and len(res.blocks) == 2
    forest = build_family(FamilySpec("CliqueForest", 60, d=9, k=5))
    res = partition_lemma29(forest, alpha_bound=5)
    assert res.ok
    assert_partition(forest, res)
    from hamperturb.graph import connected_components

    assert sorted(res.blocks) == sorted(connected_components(forest))


def test_lemma29_conclusions_are_recomputed():
    g = disjoint_union(Graph.complete(10), Graph.complete(10))
    res = partition_lemma29(g, alpha_bound=2)
    p = res.detail["params"]
    assert p["alpha"] == 2 and math.isclose(p["logn"], math.log(20))
    assert set(res.checks) == {
        "partition",
        "i_block_count",
        "ii_large_blocks_cover_half",
        "iii_block_size",
        "iv_block_connectivity",
    }
    assert min(res.per_block_connectivity) >= p["block_conn_target"]


# ---- bisection ---------------------------------------------------------


def test_bisection_examples():
    k20 = connectivity_bisection(Graph.complete(20))
    assert k20.ok and k20.attempts == 1
    assert sorted(k20.s1 + k20.s2) == list(range(20))
    c6 = connectivity_bisection(cycle_graph(6))
    assert not c6.ok and c6.attempts == 64 and "min_degree_into_half" in c6.stats
    kb = connectivity_bisection(complete_bipartite(10, 10))
    assert kb.ok
    g = complete_bipartite(10, 10)
    for s in (kb.s1, kb.s2):
        assert kappa_of(g, s) >= 10 / 8


def test_bisection_is_seed_deterministic():
    g = complete_bipartite(10, 10)
    assert connectivity_bisection(g, seed=5) == connectivity_bisection(g, seed=5)


# ---- linkages ----------------------------------------------------------


def test_disjoint_paths_examples():
    k6 = Graph.complete(6)
    res = disjoint_paths(k6, [(0, 1), (2, 3)])
    assert res.yes and verify_certificate(k6, res.witness)
    assert disjoint_paths(cycle_graph(4), [(0, 2), (1, 3)]).no
    g = grid(4, 4)
    res = disjoint_paths(g, [(0, 3), (12, 15)])
    assert res.yes and verify_certificate(g, res.witness)


def test_disjoint_paths_input_errors():
    with pytest.raises(GraphInputError):
        disjoint_paths(Graph.complete(5), [(0, 1), (1, 2)])
    with pytest.raises(CapacityError):
        disjoint_paths(Graph.complete(70), [(0, 1)])
    with pytest.raises(CapacityError):
        disjoint_paths(Graph.complete(20), [(2 * i, 2 * i + 1) for i in range(9)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_disjoint_paths_match_exhaustive_enumeration(seed, spanning):
    rng = random.Random(seed)
    n = rng.randint(4, 9)
    g = oracles.random_graph(rng, n, rng.uniform(0.2, 0.7))
    ends = rng.sample(range(n), 2 * rng.randint(1, min(3, n // 2)))
    pairs = list(zip(ends[::2], ends[1::2]))
    res = disjoint_paths(g, pairs, spanning=spanning)
    assert res.yes == oracles.linkable(g, pairs, spanning)
    if res.yes:
        assert verify_certificate(g, res.witness, spanning=spanning)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_disjoint_paths_refusals_on_twelve_vertices(seed):
    rng = random.Random(seed)
    g = oracles.random_graph(rng, 12, rng.uniform(0.15, 0.3))
    ends = rng.sample(range(12), 4)
    pairs = [(ends[0], ends[1]), (ends[2], ends[3])]
    res = disjoint_paths(g, pairs)
    assert res.yes == oracles.linkable(g, pairs)


def test_spanning_path_system_examples():
    k8 = Graph.complete(8)
    res = spanning_path_system(k8, [(0, 1)])
    assert res.yes and res.witness.paths[0][0] == 0 and res.witness.paths[0][-1] == 1
    assert verify_certificate(k8, res.witness, spanning=True)
    res = spanning_path_system(k8, [(0, 1), (2, 3)])
    assert res.yes and verify_certificate(k8, res.witness, spanning=True)
    assert oracles.linkable(cycle_graph(5), [(0, 2)], spanning=True) is False
    assert spanning_path_system(cycle_graph(5), [(0, 2)], c=0).no


def test_spanning_precondition_enforced():
    # kappa(C_8) = 2 is below max(alpha=4, log 8, r)
    res = spanning_path_system(cycle_graph(8), [(0, 4)])
    assert res.no and res.detail["stage"] == "precondition"


def test_spanning_larger_instance_uses_bisection():
    g = Graph.complete(30)
    pairs = [(0, 1), (2, 3), (4, 5)]
    res = spanning_path_system(g, pairs)
    assert res.yes and res.detail["stage"] == "bisection"
    assert verify_certificate(g, res.witness, spanning=True)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_spanning_matches_exhaustive_on_small_graphs(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 9)
    g = oracles.random_graph(rng, n, rng.uniform(0.3, 0.9))
    ends = rng.sample(range(n), 2 * rng.randint(1, 2))
    pairs = list(zip(ends[::2], ends[1::2]))
    res = spanning_path_system(g, pairs, c=0)
    assert res.yes == oracles.linkable(g, pairs, spanning=True)
    if res.yes:
        assert verify_certificate(g, res.witness, spanning=True)


def test_lemma29_reports_large_block_indices():
    g = disjoint_union(Graph.complete(4), Graph.complete(16))
    res = partition_lemma29(g, alpha_bound=2)
    assert res.detail["J"] == [i for i, b in enumerate(res.blocks) if len(b) >= 0.1 * 20 / 2]
    assert sum(len(res.blocks[i]) for i in res.detail["J"]) >= 10
