"""Immutable simple graphs and digraphs on vertices ``0..n-1``.

Adjacency is stored as sorted tuples; bitset views (Python ints) are cached
for the exact solvers, which do nearly all of their work with ``&``/``|``.
"""

from __future__ import annotations

import dataclasses
import functools
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence


VertexSet = tuple  # sorted, duplicate-free tuple of vertex labels


class GraphInputError(ValueError):
    """Malformed graph data or an out-of-range vertex."""


def _normalize(n: int, neighbor_lists: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(set(nb))) for nb in neighbor_lists)


@dataclasses.dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[tuple[int, ...], ...]
    # labels[i] is the vertex of the parent graph that vertex i came from (see induced)
    labels: tuple[int, ...] | None = dataclasses.field(default=None, compare=False, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphInputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphInputError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, _normalize(n, nbrs))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, tuple(() for _ in range(n)))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, tuple(tuple(u for u in range(n) if u != v) for v in range(n)))

    @functools.cached_property
    def m(self) -> int:
        return sum(len(nb) for nb in self.adj) // 2

    @functools.cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << u for u in nb) for nb in self.adj)

    @functools.cached_property
    def _adj_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nb) for nb in self.adj)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj_sets[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def lift(self, v: int) -> int:
        """Label of ``v`` in the graph this one was induced from."""
        return v if self.labels is None else self.labels[v]

    def is_complete(self) -> bool:
        return all(len(nb) == self.n - 1 for nb in self.adj)


@dataclasses.dataclass(frozen=True)
class Digraph:
    n: int
    out_adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> Digraph:
        outs: list[set[int]] = [set() for _ in range(n)]
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphInputError(f"arc ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphInputError(f"self-loop at {u}")
            outs[u].add(v)
        return cls(n, _normalize(n, outs))

    @classmethod
    def complete(cls, n: int) -> Digraph:
        return cls(n, tuple(tuple(u for u in range(n) if u != v) for v in range(n)))

    @functools.cached_property
    def m(self) -> int:
        return sum(len(nb) for nb in self.out_adj)

    @functools.cached_property
    def out_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << u for u in nb) for nb in self.out_adj)

    @functools.cached_property
    def in_masks(self) -> tuple[int, ...]:
        ins = [0] * self.n
        for u, nb in enumerate(self.out_adj):
            for v in nb:
                ins[v] |= 1 << u
        return tuple(ins)

    def has_arc(self, u: int, v: int) -> bool:
        return (self.out_masks[u] >> v) & 1 == 1

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.out_adj[u]]


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def _check_members(g: Graph | Digraph, s: Iterable[int]) -> tuple[int, ...]:
    members = tuple(sorted(set(s)))
    for v in members:
        if not 0 <= v < g.n:
            raise GraphInputError(f"vertex {v} out of range for n={g.n}")
    return members


def degree_stats(g: Graph) -> tuple[int, int, Fraction]:
    if g.n < 1:
        raise GraphInputError("degree_stats needs at least one vertex")
    degs = [len(nb) for nb in g.adj]
    return min(degs), max(degs), Fraction(sum(degs), g.n)


def min_degree(g: Graph) -> int:
    return min((len(nb) for nb in g.adj), default=0)


def induced(g: Graph, s: Iterable[int]) -> Graph:
    members = _check_members(g, s)
    index = {v: i for i, v in enumerate(members)}
    adj = tuple(tuple(index[u] for u in g.adj[v] if u in index) for v in members)
    return Graph(len(members), adj, labels=members)


def union(g: Graph, h: Graph) -> Graph:
    if g.n != h.n:
        raise GraphInputError(f"union of graphs on {g.n} and {h.n} vertices")
    return Graph(g.n, tuple(tuple(sorted(set(a) | set(b))) for a, b in zip(g.adj, h.adj)))


def remove_vertices(g: Graph, s: Iterable[int]) -> Graph:
    drop = set(s)
    return induced(g, [v for v in range(g.n) if v not in drop])


def neighborhood(g: Graph, s: Iterable[int]) -> VertexSet:
    members = set(_check_members(g, s))
    out: set[int] = set()
    for v in members:
        out.update(g.adj[v])
    return tuple(sorted(out - members))


def components_mask(masks: Sequence[int], alive: int) -> list[int]:
    """Connected components (as bitsets) of the subgraph induced by ``alive``."""
    comps = []
    rest = alive
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                nxt |= masks[b.bit_length() - 1]
                f ^= b
            nxt &= alive & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        rest &= ~comp
    return comps


def connected_components(g: Graph) -> list[VertexSet]:
    comps = components_mask(g.masks, (1 << g.n) - 1)
    # each component's lowest bit is its minimum member, and the bitset sweep is ascending
    return [tuple(bits(c)) for c in comps]


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components_mask(g.masks, (1 << g.n) - 1)) == 1


@dataclasses.dataclass(frozen=True)
class DegeneracyResult:
    ordering: tuple[int, ...] | None
    max_forward_degree: int
    witness: VertexSet | None = None  # induced subgraph with min degree > bound

    @property
    def ok(self) -> bool:
        return self.ordering is not None


def degeneracy_ordering(g: Graph, bound: float) -> DegeneracyResult:
    """Peel a minimum-degree vertex at a time (smallest label on ties).

    Each vertex's degree into the vertices after it is its degree at removal
    time, so the ordering certifies ``bound``-degeneracy exactly when no
    removal exceeds ``bound``. Otherwise the vertices still present when the
    first violation occurs form a subgraph of minimum degree > ``bound``.
    """
    deg = [len(nb) for nb in g.adj]
    alive = [True] * g.n
    buckets: dict[int, set[int]] = {}
    for v, d in enumerate(deg):
        buckets.setdefault(d, set()).add(v)
    order = []
    worst = 0
    witness = None
    for _ in range(g.n):
        d = min(k for k, b in buckets.items() if b)
        v = min(buckets[d])
        if d > bound and witness is None:
            witness = tuple(u for u in range(g.n) if alive[u])
        worst = max(worst, d)
        buckets[d].discard(v)
        alive[v] = False
        order.append(v)
        for u in g.adj[v]:
            if alive[u]:
                buckets[deg[u]].discard(u)
                deg[u] -= 1
                buckets.setdefault(deg[u], set()).add(u)
    if witness is not None:
        return DegeneracyResult(None, worst, witness)
    return DegeneracyResult(tuple(order), worst)


def core(g: Graph, k: float, within: Iterable[int] | None = None) -> VertexSet:
    """Vertices surviving repeated deletion of vertices with degree < k."""
    alive = set(range(g.n)) if within is None else set(within)
    deg = {v: sum(1 for u in g.adj[v] if u in alive) for v in alive}
    stack = [v for v in alive if deg[v] < k]
    removed = set()
    while stack:
        v = stack.pop()
        if v in removed:
            continue
        removed.add(v)
        for u in g.adj[v]:
            if u in alive and u not in removed:
                deg[u] -= 1
                if deg[u] < k:
                    stack.append(u)
    return tuple(sorted(alive - removed))


# ---- text format -------------------------------------------------------


def format_graph(g: Graph | Digraph) -> str:
    pairs = g.arcs() if isinstance(g, Digraph) else g.edges()
    lines = [f"{g.n} {len(pairs)}"] + [f"{u} {v}" for u, v in pairs]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, directed: bool = False) -> Graph | Digraph:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise GraphInputError("header must be 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        pairs = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise GraphInputError(f"non-integer token: {exc}") from None
    if len(pairs) != m:
        raise GraphInputError(f"header declares {m} edges, found {len(pairs)}")
    if directed:
        return Digraph.from_arcs(n, pairs)
    for u, v in pairs:
        if not u < v:
            raise GraphInputError(f"edge line '{u} {v}' must satisfy u < v")
    if len(set(pairs)) != len(pairs):
        raise GraphInputError("duplicate edge")
    return Graph.from_edges(n, pairs)


def read_graph(path: str | Path, directed: bool = False) -> Graph | Digraph:
    return parse_graph(Path(path).read_text(), directed=directed)


def write_graph(g: Graph | Digraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


# ---- small named graphs used throughout tests and docs ----------------


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges())
        offset += h.n
    return Graph.from_edges(offset, edges)
