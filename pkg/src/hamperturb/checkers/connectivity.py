"""Vertex connectivity by unit-capacity flow on the vertex-split graph."""

from __future__ import annotations

from collections import deque

from ..graph import Graph, components_mask

COMPLETE = "complete"


def local_connectivity(g: Graph, s: int, t: int, limit: int | None = None) -> tuple[int, tuple[int, ...]]:
    """Maximum number of internally disjoint s-t paths, with a minimum separator.

    ``s`` and ``t`` must be non-adjacent. With ``limit`` the search stops
    once that many paths are found; the returned separator is then empty.
    """
    if g.has_edge(s, t):
        raise ValueError(f"{s} and {t} are adjacent; no vertex separator exists")
    n = g.n
    # node 2v is v_in, 2v+1 is v_out; v_in -> v_out has capacity 1 except at s, t
    big = n + 1
    cap: dict[tuple[int, int], int] = {}
    out: list[list[int]] = [[] for _ in range(2 * n)]

    def arc(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            out[a].append(b)
            out[b].append(a)
            cap[(b, a)] = cap.get((b, a), 0)
        cap[(a, b)] = cap.get((a, b), 0) + c

    for v in range(n):
        arc(2 * v, 2 * v + 1, big if v in (s, t) else 1)
        for u in g.adj[v]:
            arc(2 * v + 1, 2 * u, big)
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while limit is None or flow < limit:
        parent = {source: source}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b in out[a]:
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            cut = tuple(v for v in range(n) if 2 * v in parent and 2 * v + 1 not in parent)
            return flow, cut
        b = sink
        while b != source:
            a = parent[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    return flow, ()


def vertex_connectivity(g: Graph) -> tuple[int, tuple[int, ...] | str]:
    """``(kappa, minimum separator)``; complete graphs give ``(n-1, "complete")``.

    Pairs follow Esfahanian and Hakimi: with ``v`` of minimum degree, only
    pairs ``(v, w)`` for non-neighbours ``w`` and non-adjacent pairs inside
    ``N(v)`` need a flow computation.
    """
    n = g.n
    if n <= 1:
        return 0, ()
    if g.is_complete():
        return n - 1, COMPLETE
    if len(components_mask(g.masks, (1 << n) - 1)) > 1:
        return 0, ()
    v = min(range(n), key=lambda x: (len(g.adj[x]), x))
    best = len(g.adj[v])
    best_cut: tuple[int, ...] = g.adj[v]
    pairs = [(v, w) for w in range(n) if w != v and not g.has_edge(v, w)]
    nb = g.adj[v]
    pairs += [(x, y) for i, x in enumerate(nb) for y in nb[i + 1 :] if not g.has_edge(x, y)]
    for s, t in pairs:
        k, cut = local_connectivity(g, s, t, limit=best)
        if k < best:
            best, best_cut = k, cut
    return best, tuple(sorted(best_cut))


def is_k_connected(g: Graph, k: float) -> bool:
    return vertex_connectivity(g)[0] >= k
