"""Independence number, toughness, expansion, bipartite matching, cycle covers."""

from __future__ import annotations

import dataclasses
import itertools
import math
from fractions import Fraction

from ..certificates import CapacityError, CycleCertificate, Decision, no, unknown, yes
from ..graph import Graph, bits, components_mask, induced, to_mask
from . import cycles
from .connectivity import vertex_connectivity

ALPHA_CAP = 200
TOUGHNESS_CAP = 20
EXPANDER_SUBSET_BUDGET = 1 << 22


# ---- independence number ---------------------------------------------


def _clique_cover_bound(masks, cand: int) -> int:
    count = 0
    while cand:
        low = cand & -cand
        clique_cand = cand & masks[low.bit_length() - 1]
        taken = low
        while clique_cand:
            b = clique_cand & -clique_cand
            taken |= b
            clique_cand &= masks[b.bit_length() - 1]
        cand &= ~taken
        count += 1
    return count


def independence_number(g: Graph, cap: int = ALPHA_CAP) -> tuple[int, tuple[int, ...]]:
    """Exact ``alpha(g)`` by branch and bound, pruned by a greedy clique cover."""
    if g.n > cap:
        raise CapacityError(f"independence number capped at n={cap}, got n={g.n}")
    masks = g.masks
    best = [0, 0]

    def search(cand: int, chosen: int, size: int) -> None:
        # vertices with at most one candidate neighbour can always be taken
        changed = True
        while changed:
            changed = False
            c = cand
            while c:
                b = c & -c
                c ^= b
                v = b.bit_length() - 1
                nb = masks[v] & cand
                if nb & (nb - 1) == 0:
                    chosen |= b
                    size += 1
                    cand &= ~(b | nb)
                    c &= cand
                    changed = True
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + _clique_cover_bound(masks, cand) <= best[0]:
            return
        v = max(bits(cand), key=lambda x: (bin(masks[x] & cand).count("1"), -x))
        b = 1 << v
        search(cand & ~(b | masks[v]), chosen | b, size + 1)
        search(cand & ~b, chosen, size)

    search((1 << g.n) - 1, 0, 0)
    return best[0], tuple(bits(best[1]))


def is_independent(g: Graph, s) -> bool:
    m = to_mask(s)
    return all(not (g.masks[v] & m) for v in s)


# ---- toughness -------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ToughnessReport:
    toughness: Fraction | float  # math.inf when no separating set exists
    witness_set: tuple[int, ...] | None
    components: int = 0


def _component_count(g: Graph, removed: int) -> int:
    alive = ((1 << g.n) - 1) & ~removed
    return len(components_mask(g.masks, alive))


def toughness(g: Graph, cap: int = TOUGHNESS_CAP) -> ToughnessReport:
    """Minimum of ``|S| / c(G - S)`` over sets ``S`` leaving at least two components.

    Every subset is examined by size; a size ``s`` is only skipped once
    ``s / (n - s)``, an upper bound on the ratio any larger set can beat,
    already reaches the best ratio.
    """
    n = g.n
    if n > cap:
        raise CapacityError(f"exact toughness capped at n={cap}, got n={n}")
    best: Fraction | float = math.inf
    witness = None
    comps_at = 0
    for s in range(0, n - 1):
        if best != math.inf and Fraction(s, n - s) >= best:
            break
        for combo in itertools.combinations(range(n), s):
            c = _component_count(g, to_mask(combo))
            if c >= 2:
                r = Fraction(s, c)
                if r < best:
                    best, witness, comps_at = r, combo, c
    return ToughnessReport(best, witness, comps_at)


def is_t_tough(
    g: Graph,
    t: float,
    cap: int = TOUGHNESS_CAP,
    samples: int = 2000,
    seed: int = 0,
) -> Decision:
    """Decide whether every separating ``S`` leaves at most ``|S|/t`` components.

    Up to ``cap`` vertices the answer is exact. Beyond it only structured
    and sampled candidate sets are tried: a violation found is a proof of
    NO, otherwise the result is indeterminate.
    """
    n = g.n
    t = Fraction(t).limit_denominator(10**9)
    if n <= cap:
        for s in range(0, n - 1):
            # a violation needs c > s/t with c <= n - s
            if n - s <= s / t:
                break
            for combo in itertools.combinations(range(n), s):
                c = _component_count(g, to_mask(combo))
                if c >= 2 and c > s / t:
                    return no("violation", witness_set=combo, components=c)
        return yes()
    import random

    rng = random.Random(seed)
    candidates = [()]
    candidates += [g.adj[v] for v in range(n)]
    kappa, cut = vertex_connectivity(g)
    if isinstance(cut, tuple):
        candidates.append(cut)
    for _ in range(samples):
        v = rng.randrange(n)
        size = rng.randint(1, max(1, len(g.adj[v])))
        candidates.append(tuple(sorted(rng.sample(range(n), size))))
    for combo in candidates:
        c = _component_count(g, to_mask(combo))
        if c >= 2 and c > len(combo) / t:
            return no("violation", witness_set=tuple(combo), components=c)
    return unknown("sampled", checked=len(candidates))


# ---- expansion -------------------------------------------------------


def expander_check(g: Graph, k: int, d: float, subset_budget: int = EXPANDER_SUBSET_BUDGET) -> Decision:
    """Is ``|N(S)| >= d|S|`` for all ``S`` with ``|S| <= k``? NO carries the smallest violator."""
    n = g.n
    total = sum(math.comb(n, s) for s in range(1, min(k, n) + 1))
    if total > subset_budget:
        raise CapacityError(f"{total} subsets exceed the budget {subset_budget}")
    masks = g.masks
    for s in range(1, min(k, n) + 1):
        for combo in itertools.combinations(range(n), s):
            m = to_mask(combo)
            nb = 0
            for v in combo:
                nb |= masks[v]
            if bin(nb & ~m).count("1") < d * s:
                return no("violation", witness_set=combo)
    return yes()


# ---- bipartite matching ----------------------------------------------


def bipartite_max_matching(left: int, right: int, edges) -> tuple[int, list[tuple[int, int]]]:
    """Maximum matching between ``range(left)`` and ``range(right)`` by augmenting paths."""
    adj: list[list[int]] = [[] for _ in range(left)]
    for a, b in edges:
        if not (0 <= a < left and 0 <= b < right):
            raise ValueError(f"edge ({a}, {b}) outside the bipartition")
        adj[a].append(b)
    for row in adj:
        row.sort()
    match_right = [-1] * right
    match_left = [-1] * left

    def augment(a: int, seen: list[bool]) -> bool:
        for b in adj[a]:
            if not seen[b]:
                seen[b] = True
                if match_right[b] < 0 or augment(match_right[b], seen):
                    match_right[b] = a
                    match_left[a] = b
                    return True
        return False

    for a in range(left):
        augment(a, [False] * right)
    pairs = [(a, match_left[a]) for a in range(left) if match_left[a] >= 0]
    return len(pairs), pairs


# ---- cycle cover -----------------------------------------------------


@dataclasses.dataclass(frozen=True)
class CycleCover:
    cycles: tuple[CycleCertificate, ...]
    uncovered: tuple[int, ...]

    @property
    def quantity(self) -> int:
        return len(self.cycles) + len(self.uncovered)


def _dfs_long_cycle(g: Graph) -> tuple[int, ...] | None:
    """Longest cycle closed by a single back edge of a DFS forest."""
    best = None
    depth: dict[int, int] = {}
    parent: dict[int, int] = {}
    for root in range(g.n):
        if root in depth:
            continue
        depth[root] = 0
        parent[root] = -1
        stack = [(root, iter(g.adj[root]))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in depth:
                    depth[w] = depth[v] + 1
                    parent[w] = v
                    stack.append((w, iter(g.adj[w])))
                    break
                if w != parent[v] and depth[w] < depth[v] - 1:
                    length = depth[v] - depth[w] + 1
                    if best is None or length > len(best):
                        seq = [v]
                        while seq[-1] != w:
                            seq.append(parent[seq[-1]])
                        best = tuple(reversed(seq))
            else:
                stack.pop()
    return best


def cycle_cover_greedy(g: Graph, budget: int = cycles.DEFAULT_BUDGET) -> CycleCover:
    """Peel vertex-disjoint cycles, longest first where an exact search fits."""
    remaining = list(range(g.n))
    found: list[CycleCertificate] = []
    while len(remaining) >= 3:
        h = induced(g, remaining)
        if h.m < h.n - len(components_mask(h.masks, (1 << h.n) - 1)) + 1:
            break  # forest
        seq = None
        if h.n <= cycles.CYCLE_DP_CAP:
            res = cycles.circumference(h, budget)
            seq = res.witness.vertices if res.witness else None
        else:
            ham = cycles.is_hamiltonian(h, budget)
            seq = ham.witness.vertices if ham.yes else _dfs_long_cycle(h)
        if not seq:
            break
        lifted = tuple(h.lift(v) for v in seq)
        found.append(CycleCertificate(lifted))
        used = set(lifted)
        remaining = [v for v in remaining if v not in used]
    return CycleCover(tuple(found), tuple(remaining))
