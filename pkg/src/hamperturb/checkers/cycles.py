"""Exact Hamilton cycle / path, circumference and pancyclicity solvers.

Small instances go through subset dynamic programs, vectorised over all
masks of one popcount at a time: ``dp[M]`` is the bitset of vertices ``w``
such that some path from the fixed start covers exactly ``M`` and ends at
``w``. Larger instances use depth-first branch-and-bound with degree and
connectivity pruning under a node budget.
"""

from __future__ import annotations

import dataclasses
import functools

import numpy as np

from ..certificates import CycleCertificate, Decision, PathCertificate, Status, no, unknown, yes
from ..graph import Digraph, Graph, GraphInputError, bits, components_mask

HAM_DP_CAP = 24
CYCLE_DP_CAP = 20
DEFAULT_BUDGET = 500_000


class _BudgetExceeded(Exception):
    pass


@functools.lru_cache(maxsize=4)
def _popcounts(nbits: int) -> np.ndarray:
    idx = np.arange(1 << nbits, dtype=np.uint32)
    pc = np.zeros(1 << nbits, dtype=np.uint8)
    for b in range(nbits):
        pc += ((idx >> np.uint32(b)) & np.uint32(1)).astype(np.uint8)
    pc.setflags(write=False)
    return pc


def _layer(nbits: int, k: int) -> np.ndarray:
    return np.flatnonzero(_popcounts(nbits) == k).astype(np.uint32)


# ---- fixed-start path DP ------------------------------------------------


def _fixed_start_dp(in_masks, n: int, start: int):
    """DP over subsets of the other ``n-1`` vertices (compressed indices)."""
    others = [v for v in range(n) if v != start]
    pos = {v: i for i, v in enumerate(others)}
    nb = len(others)

    def compress(mask: int) -> int:
        out = 0
        for v in bits(mask):
            if v != start:
                out |= 1 << pos[v]
        return out

    in_c = [compress(in_masks[v]) for v in others]
    dp = np.zeros(1 << nb, dtype=np.uint32)
    for i, v in enumerate(others):
        if (in_masks[v] >> start) & 1:
            dp[1 << i] = 1 << i
    for k in range(2, nb + 1):
        idx = _layer(nb, k)
        for i in range(nb):
            sel = idx[((idx >> np.uint32(i)) & np.uint32(1)).astype(bool)]
            prev = sel ^ np.uint32(1 << i)
            hit = (dp[prev] & np.uint32(in_c[i])) != 0
            dp[sel[hit]] |= np.uint32(1 << i)
    return dp, others, in_c


def _rebuild_fixed(dp, others, in_c, start: int, mask: int, end: int) -> list[int]:
    seq = [end]
    i = end
    while mask != (1 << i):
        mask ^= 1 << i
        cand = int(dp[mask]) & in_c[i]
        i = (cand & -cand).bit_length() - 1
        seq.append(i)
    return [start] + [others[i] for i in reversed(seq)]


# ---- all-cycles DP (start = lowest vertex of the cycle) --------------


def _all_cycles_dp(in_masks, n: int, min_len: int):
    """Return ``{length: (mask, end)}`` for one cycle of every length, and dp."""
    dp = np.zeros(1 << n, dtype=np.uint32)
    for s in range(n):
        dp[1 << s] = 1 << s
    in_arr = np.array(in_masks, dtype=np.uint32)
    found: dict[int, tuple[int, int]] = {}
    for k in range(2, n + 1):
        idx = _layer(n, k)
        for w in range(1, n):
            has_w = ((idx >> np.uint32(w)) & np.uint32(1)).astype(bool)
            below = (idx & np.uint32((1 << w) - 1)) != 0
            sel = idx[has_w & below]
            prev = sel ^ np.uint32(1 << w)
            hit = (dp[prev] & in_arr[w]) != 0
            dp[sel[hit]] |= np.uint32(1 << w)
        if k < min_len:
            continue
        low = idx & (~idx + np.uint32(1))
        lowpos = np.log2(low.astype(np.float64)).astype(np.int64)
        closing = dp[idx] & in_arr[lowpos]
        # dp[M] includes the start bit only for singletons, never here
        hits = np.flatnonzero(closing != 0)
        if hits.size:
            j = hits[0]
            cl = int(closing[j])
            found[k] = (int(idx[j]), (cl & -cl).bit_length() - 1)
    return found, dp


def _rebuild_cycle(dp, in_masks, mask: int, end: int) -> list[int]:
    start = (mask & -mask).bit_length() - 1
    seq = [end]
    w = end
    while w != start:
        mask ^= 1 << w
        cand = int(dp[mask]) & in_masks[w]
        w = (cand & -cand).bit_length() - 1
        seq.append(w)
    return list(reversed(seq))


# ---- branch and bound ------------------------------------------------


def _reachable(masks, source: int, alive: int) -> int:
    seen = source
    frontier = source
    while frontier:
        nxt = 0
        f = frontier
        while f:
            b = f & -f
            nxt |= masks[b.bit_length() - 1]
            f ^= b
        nxt &= alive & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def _biconnected(masks, alive: int, a: int, b: int) -> bool:
    """Is ``G[alive]`` plus the edge ``ab`` connected without cut vertices?"""
    count = bin(alive).count("1")
    if count <= 2:
        return True

    def nbrs(v: int) -> int:
        m = masks[v] & alive
        if v == a:
            m |= 1 << b
        elif v == b:
            m |= 1 << a
        return m & ~(1 << v)

    root = (alive & -alive).bit_length() - 1
    disc = {root: 0}
    low = {root: 0}
    clock = 1
    root_children = 0
    stack = [(root, -1, nbrs(root))]
    while stack:
        v, parent, pending = stack[-1]
        if pending:
            bit = pending & -pending
            stack[-1] = (v, parent, pending ^ bit)
            w = bit.bit_length() - 1
            if w == parent:
                continue
            if w in disc:
                if disc[w] < low[v]:
                    low[v] = disc[w]
                continue
            disc[w] = low[w] = clock
            clock += 1
            if v == root:
                root_children += 1
            stack.append((w, v, nbrs(w)))
        else:
            stack.pop()
            if parent >= 0:
                if low[v] < low[parent]:
                    low[parent] = low[v]
                if parent != root and low[v] >= disc[parent]:
                    return False
    return len(disc) == count and root_children <= 1


class _Search:
    """Depth-first Hamilton path search on bitsets with pruning."""

    def __init__(self, out_masks, in_masks, n, budget, directed):
        self.out = out_masks
        self.inn = in_masks
        self.n = n
        self.budget = budget
        self.nodes = 0
        self.directed = directed

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExceeded

    def feasible(self, rest: int, end: int, goal: int | None, close_to: int | None) -> bool:
        """Cheap necessary conditions for extending a path ending at ``end``.

        ``goal`` is a fixed final vertex (inside ``rest``); ``close_to`` is a
        vertex the final vertex must point back to (cycle search).
        """
        if not rest:
            return True
        out, inn = self.out, self.inn
        endbit = 1 << end
        back = 0 if close_to is None else 1 << close_to
        r = rest
        while r:
            b = r & -r
            v = b.bit_length() - 1
            r ^= b
            ins = inn[v] & (rest | endbit)
            outs = out[v] & (rest | back)
            if v == goal:
                if not ins:
                    return False
                continue
            if not ins or not outs:
                return False
            if not self.directed:
                # undirected interior vertex needs two distinct usable neighbours
                usable = out[v] & (rest | endbit | back)
                if usable & (usable - 1) == 0:
                    return False
        # the rest plus both path ends, closed by a virtual edge end-target,
        # must be Hamiltonian: 2-connected (undirected) or strongly connected
        target = goal if goal is not None else close_to
        if target is None:
            return _reachable(out, endbit, rest | endbit) == rest | endbit
        alive = rest | endbit | (1 << target)
        if self.directed:
            return (
                _reachable(out, endbit, alive) == alive
                and _reachable(inn, 1 << target, alive) == alive
            )
        return _biconnected(out, alive, end, target)

    def extend(self, path: list[int], rest: int, goal: int | None, close_to: int | None) -> bool:
        self.tick()
        end = path[-1]
        if not rest:
            return close_to is None or (self.out[end] >> close_to) & 1 == 1
        cands = self.out[end] & rest
        if goal is not None and rest != 1 << goal:
            cands &= ~(1 << goal)
        order = []
        while cands:
            b = cands & -cands
            v = b.bit_length() - 1
            cands ^= b
            order.append((bin(self.out[v] & rest).count("1"), v))
        order.sort()
        for _, v in order:
            nrest = rest & ~(1 << v)
            if not self.feasible(nrest, v, goal, close_to):
                continue
            path.append(v)
            if self.extend(path, nrest, goal, close_to):
                return True
            path.pop()
        return False


def _bnb_hamilton(out_masks, in_masks, n, start, goal, cycle, budget, directed) -> Decision:
    search = _Search(out_masks, in_masks, n, budget, directed)
    full = (1 << n) - 1
    rest = full & ~(1 << start)
    close_to = start if cycle else None
    try:
        if not search.feasible(rest, start, goal, close_to):
            return no("exhausted", nodes=search.nodes)
        path = [start]
        if search.extend(path, rest, goal, close_to):
            return yes(tuple(path), nodes=search.nodes)
    except _BudgetExceeded:
        return unknown("budget", nodes=search.nodes)
    return no("exhausted", nodes=search.nodes)


# ---- public deciders -------------------------------------------------


def _has_cut_vertex(g: Graph) -> int | None:
    full = (1 << g.n) - 1
    for v in range(g.n):
        if len(components_mask(g.masks, full & ~(1 << v))) > 1:
            return v
    return None


def _quick_refute_cycle(g: Graph) -> str | None:
    full = (1 << g.n) - 1
    if len(components_mask(g.masks, full)) > 1:
        return "disconnected"
    if any(len(nb) < 2 for nb in g.adj):
        return "vertex of degree < 2"
    if _has_cut_vertex(g) is not None:
        return "cut vertex"
    return None


def is_hamiltonian(g: Graph, budget: int = DEFAULT_BUDGET, dp_cap: int = HAM_DP_CAP) -> Decision:
    if g.n < 3:
        raise GraphInputError("Hamiltonicity needs at least 3 vertices")
    reason = _quick_refute_cycle(g)
    if reason:
        return no(reason)
    start = min(range(g.n), key=lambda v: (len(g.adj[v]), v))
    quick = _bnb_hamilton(g.masks, g.masks, g.n, start, None, True, min(budget, 4 * g.n * g.n), False)
    if quick.yes:
        return yes(CycleCertificate(quick.witness))
    if quick.no:
        return quick
    if g.n <= dp_cap:
        dp, others, in_c = _fixed_start_dp(g.masks, g.n, start)
        full = (1 << (g.n - 1)) - 1
        closing = int(dp[full])
        back = 0
        for i, v in enumerate(others):
            if (g.masks[start] >> v) & 1:
                back |= 1 << i
        ends = closing & back
        if not ends:
            return no("exhausted")
        end = (ends & -ends).bit_length() - 1
        return yes(CycleCertificate(tuple(_rebuild_fixed(dp, others, in_c, start, full, end))))
    res = _bnb_hamilton(g.masks, g.masks, g.n, start, None, True, budget, False)
    return yes(CycleCertificate(res.witness)) if res.yes else res


def hamilton_path_between(
    g: Graph, u: int, v: int, budget: int = DEFAULT_BUDGET, dp_cap: int = HAM_DP_CAP
) -> Decision:
    if u == v:
        raise GraphInputError("endpoints must differ")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise GraphInputError("endpoint out of range")
    full = (1 << g.n) - 1
    if len(components_mask(g.masks, full)) > 1:
        return no("disconnected")
    if g.n == 2:
        return yes(PathCertificate((u, v))) if g.has_edge(u, v) else no("exhausted")
    for w in range(g.n):
        if w not in (u, v) and len(g.adj[w]) < 2:
            return no("interior vertex of degree < 2")
    quick = _bnb_hamilton(g.masks, g.masks, g.n, u, v, False, min(budget, 4 * g.n * g.n), False)
    if quick.yes:
        return yes(PathCertificate(quick.witness))
    if quick.no:
        return quick
    if g.n <= dp_cap:
        dp, others, in_c = _fixed_start_dp(g.masks, g.n, u)
        fullc = (1 << (g.n - 1)) - 1
        i = others.index(v)
        if not (int(dp[fullc]) >> i) & 1:
            return no("exhausted")
        return yes(PathCertificate(tuple(_rebuild_fixed(dp, others, in_c, u, fullc, i))))
    res = _bnb_hamilton(g.masks, g.masks, g.n, u, v, False, budget, False)
    return yes(PathCertificate(res.witness)) if res.yes else res


def is_hamilton_connected(g: Graph, budget: int = DEFAULT_BUDGET, dp_cap: int = HAM_DP_CAP) -> Decision:
    """YES iff every pair is joined by a Hamilton path; NO names the first failing pair."""
    if g.n < 3:
        raise GraphInputError("Hamilton-connectedness needs at least 3 vertices")
    pending_unknown = None
    if g.n <= dp_cap:
        if len(components_mask(g.masks, (1 << g.n) - 1)) > 1:
            return no("disconnected", pair=(0, next(w for w in range(1, g.n) if not _reach(g, 0, w))))
        fullc = (1 << (g.n - 1)) - 1
        for u in range(g.n):
            dp, others, _ = _fixed_start_dp(g.masks, g.n, u)
            ends = int(dp[fullc])
            for i, w in enumerate(others):
                if w > u and not (ends >> i) & 1:
                    return no("exhausted", pair=(u, w))
        return yes()
    for u in range(g.n):
        for w in range(u + 1, g.n):
            res = hamilton_path_between(g, u, w, budget, dp_cap)
            if res.no:
                return no(res.reason, pair=(u, w))
            if res.status is Status.UNKNOWN and pending_unknown is None:
                pending_unknown = (u, w)
    if pending_unknown is not None:
        return unknown("budget", pair=pending_unknown)
    return yes()


def _reach(g: Graph, u: int, w: int) -> bool:
    comps = components_mask(g.masks, (1 << g.n) - 1)
    return any((c >> u) & 1 and (c >> w) & 1 for c in comps)


# ---- cycle lengths ---------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PancyclicityReport:
    n: int
    present: dict[int, CycleCertificate]
    missing: frozenset[int]
    indeterminate: frozenset[int] = frozenset()

    @property
    def present_lengths(self) -> frozenset[int]:
        return frozenset(self.present)

    @property
    def is_pancyclic(self) -> bool:
        return not self.missing and not self.indeterminate

    @property
    def status(self) -> Status:
        if self.missing:
            return Status.NO
        return Status.UNKNOWN if self.indeterminate else Status.YES


@dataclasses.dataclass(frozen=True)
class LongestCycle:
    length: int
    witness: CycleCertificate | None
    status: Status = Status.YES  # UNKNOWN: length is only a lower bound


def _cycle_of_length(out_masks, in_masks, n, length, budget, directed) -> Decision:
    """Search a cycle with exactly ``length`` vertices whose minimum vertex is its start."""
    nodes = 0
    for s in range(n):
        allowed = ((1 << n) - 1) & ~((1 << (s + 1)) - 1)
        if bin(allowed).count("1") < length - 1:
            break
        # BFS distance back to s inside allowed vertices, for pruning
        dist = {s: 0}
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for x in frontier:
                for y in bits(in_masks[x] & allowed):
                    if y not in dist:
                        dist[y] = d
                        nxt.append(y)
            frontier = nxt
        path = [s]

        def dfs(end: int, used: int) -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise _BudgetExceeded
            k = len(path)
            if k == length:
                return (out_masks[end] >> s) & 1 == 1
            remaining = length - k
            c = out_masks[end] & allowed & ~used
            for y in bits(c):
                if dist.get(y, n + 1) > remaining:
                    continue
                path.append(y)
                if dfs(y, used | (1 << y)):
                    return True
                path.pop()
            return False

        try:
            if dfs(s, 1 << s):
                return yes(CycleCertificate(tuple(path), directed), nodes=nodes)
        except _BudgetExceeded:
            return unknown("budget", nodes=nodes)
    return no("exhausted", nodes=nodes)


def _is_forest(g: Graph) -> bool:
    comps = components_mask(g.masks, (1 << g.n) - 1)
    return g.m == g.n - len(comps)


def _chord_lengths(cycle: tuple[int, ...], g: Graph) -> dict[int, CycleCertificate]:
    n = len(cycle)
    pos = {v: i for i, v in enumerate(cycle)}
    out = {n: CycleCertificate(tuple(cycle))}
    for i, v in enumerate(cycle):
        for w in g.adj[v]:
            j = pos.get(w)
            if j is None or j <= i + 1 or (i == 0 and j == n - 1):
                continue
            a = j - i + 1
            if a not in out:
                out[a] = CycleCertificate(tuple(cycle[i : j + 1]))
            b = n - (j - i) + 1
            if b not in out:
                out[b] = CycleCertificate(tuple(cycle[j:]) + tuple(cycle[: i + 1]))
    return out


def pancyclicity_report(
    g: Graph,
    budget: int = DEFAULT_BUDGET,
    dp_cap: int = CYCLE_DP_CAP,
    hamilton_cycle: tuple[int, ...] | None = None,
) -> PancyclicityReport:
    """Which lengths ``3..n`` occur as cycle lengths, each with a witness.

    ``hamilton_cycle`` (if known) seeds the report with every length its
    chords close; remaining lengths are searched longest first.
    """
    n = g.n
    wanted = set(range(3, n + 1))
    if n <= dp_cap:
        found, dp = _all_cycles_dp(g.masks, n, 3)
        present = {
            k: CycleCertificate(tuple(_rebuild_cycle(dp, g.masks, mask, end))) for k, (mask, end) in found.items()
        }
        return PancyclicityReport(n, present, frozenset(wanted - set(present)))
    present: dict[int, CycleCertificate] = {}
    if hamilton_cycle is None and n >= 3:
        ham = is_hamiltonian(g, budget)
        if ham.yes:
            hamilton_cycle = ham.witness.vertices
    if hamilton_cycle is not None:
        present.update(_chord_lengths(tuple(hamilton_cycle), g))
    missing, undecided = set(), set()
    for k in sorted(wanted - set(present), reverse=True):
        res = _cycle_of_length(g.masks, g.masks, n, k, budget, False)
        if res.yes:
            present[k] = res.witness
        elif res.no:
            missing.add(k)
        else:
            undecided.add(k)
    return PancyclicityReport(n, present, frozenset(missing), frozenset(undecided))


def circumference(g: Graph, budget: int = DEFAULT_BUDGET, dp_cap: int = CYCLE_DP_CAP) -> LongestCycle:
    if g.n < 3 or _is_forest(g):
        return LongestCycle(0, None)
    if g.n <= dp_cap:
        found, dp = _all_cycles_dp(g.masks, g.n, 3)
        k = max(found)
        mask, end = found[k]
        return LongestCycle(k, CycleCertificate(tuple(_rebuild_cycle(dp, g.masks, mask, end))))
    return _longest_by_search(g.masks, g.masks, g.n, budget, directed=False, min_len=3)


def _longest_by_search(out_masks, in_masks, n, budget, directed, min_len) -> LongestCycle:
    exact = True
    for k in range(n, min_len - 1, -1):
        res = _cycle_of_length(out_masks, in_masks, n, k, budget, directed)
        if res.yes:
            return LongestCycle(k, res.witness, Status.YES if exact else Status.UNKNOWN)
        if res.status is Status.UNKNOWN:
            exact = False
    return LongestCycle(0, None, Status.YES if exact else Status.UNKNOWN)


# ---- digraphs -------------------------------------------------------


def _is_acyclic(d: Digraph) -> bool:
    indeg = [0] * d.n
    for u in range(d.n):
        for v in d.out_adj[u]:
            indeg[v] += 1
    stack = [v for v in range(d.n) if indeg[v] == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for v in d.out_adj[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    return seen == d.n


def directed_hamilton_cycle(d: Digraph, budget: int = DEFAULT_BUDGET, dp_cap: int = HAM_DP_CAP) -> Decision:
    if d.n < 2:
        raise GraphInputError("directed Hamiltonicity needs at least 2 vertices")
    if any(not o for o in d.out_masks) or any(not i for i in d.in_masks):
        return no("vertex without in- or out-arc")
    if _is_acyclic(d):
        return no("acyclic")
    start = min(range(d.n), key=lambda v: (bin(d.out_masks[v]).count("1"), v))
    quick = _bnb_hamilton(d.out_masks, d.in_masks, d.n, start, None, True, min(budget, 4 * d.n * d.n), True)
    if quick.yes:
        return yes(CycleCertificate(quick.witness, directed=True))
    if quick.no:
        return quick
    if d.n <= dp_cap:
        dp, others, in_c = _fixed_start_dp(d.in_masks, d.n, start)
        full = (1 << (d.n - 1)) - 1
        back = 0
        for i, v in enumerate(others):
            if (d.out_masks[v] >> start) & 1:
                back |= 1 << i
        ends = int(dp[full]) & back
        if not ends:
            return no("exhausted")
        end = (ends & -ends).bit_length() - 1
        seq = _rebuild_fixed(dp, others, in_c, start, full, end)
        return yes(CycleCertificate(tuple(seq), directed=True))
    res = _bnb_hamilton(d.out_masks, d.in_masks, d.n, start, None, True, budget, True)
    return yes(CycleCertificate(res.witness, directed=True)) if res.yes else res


def longest_directed_cycle(d: Digraph, budget: int = DEFAULT_BUDGET, dp_cap: int = CYCLE_DP_CAP) -> LongestCycle:
    if d.n < 2 or _is_acyclic(d):
        return LongestCycle(0, None)
    if d.n <= dp_cap:
        found, dp = _all_cycles_dp(d.in_masks, d.n, 2)
        k = max(found)
        mask, end = found[k]
        seq = _rebuild_cycle(dp, d.in_masks, mask, end)
        return LongestCycle(k, CycleCertificate(tuple(seq), directed=True))
    ham = directed_hamilton_cycle(d, budget, dp_cap)
    if ham.yes:
        return LongestCycle(d.n, ham.witness)
    return _longest_by_search(d.out_masks, d.in_masks, d.n, budget, directed=True, min_len=2)


def directed_cycle_at_least(d: Digraph, min_len: int, budget: int = DEFAULT_BUDGET) -> LongestCycle:
    """Longest directed cycle with at least ``min_len`` vertices, searched longest first.

    Status YES means the returned length is the longest above ``min_len``;
    UNKNOWN means some longer length ran out of budget. A missing witness
    with status YES says no such cycle exists.
    """
    if d.n < 2 or _is_acyclic(d):
        return LongestCycle(0, None)
    if d.n <= CYCLE_DP_CAP:
        res = longest_directed_cycle(d, budget)
        return res if res.length >= min_len else LongestCycle(0, None)
    ham = directed_hamilton_cycle(d, budget)
    if ham.yes:
        return LongestCycle(d.n, ham.witness)
    exact = ham.no
    for k in range(d.n - 1, max(min_len, 2) - 1, -1):
        res = _cycle_of_length(d.out_masks, d.in_masks, d.n, k, budget, True)
        if res.yes:
            return LongestCycle(k, res.witness, Status.YES if exact else Status.UNKNOWN)
        if res.status is Status.UNKNOWN:
            exact = False
    return LongestCycle(0, None, Status.YES if exact else Status.UNKNOWN)
