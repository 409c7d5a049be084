"""Connectivity decompositions and linkages.

Every block bound and every path system produced here is re-checked by
the exact checkers before it is reported.
"""

from __future__ import annotations

import dataclasses
import math
import random
from collections import deque

from .certificates import (
    CapacityError,
    Decision,
    PathSystem,
    Status,
    no,
    unknown,
    verify_certificate,
    yes,
)
from .checkers import cycles
from .checkers.connectivity import vertex_connectivity
from .checkers.structure import independence_number
from .graph import (
    Graph,
    GraphInputError,
    bits,
    components_mask,
    core,
    degeneracy_ordering,
    induced,
    min_degree,
    to_mask,
)
from .random_models import mix_seed

LINKAGE_MAX_PAIRS = 8
LINKAGE_MAX_N = 64
LINKAGE_BUDGET = 200_000
EXHAUSTIVE_SPANNING_N = 20


def _popcount(x: int) -> int:
    return bin(x).count("1")


def kappa_of(g: Graph, vertices) -> int:
    return vertex_connectivity(induced(g, vertices))[0]


# ---- highly connected subsets ----------------------------------------


def extract_highly_connected(g: Graph, target: float, within=None) -> tuple[int, ...] | None:
    """Largest verified set ``A`` (greedy) with ``kappa(G[A]) >= target``.

    Candidates are components of the ``ceil(target)``-core, largest first.
    A candidate failing the connectivity test is split along a minimum
    vertex cut and each side, together with the cut, is re-cored and
    retried. ``None`` when no candidate survives.
    """
    need = max(0, math.ceil(target - 1e-12))
    alive = to_mask(range(g.n) if within is None else within)
    if need == 0:
        return tuple(bits(alive)) or None

    def cored(mask: int) -> list[int]:
        kept = to_mask(core(g, need, within=bits(mask)))
        return components_mask(g.masks, kept)

    best = 0
    seen: set[int] = set()
    pending = cored(alive)
    while pending:
        pending.sort(key=lambda c: (-_popcount(c), c & -c))
        comp = pending.pop(0)
        if comp in seen or _popcount(comp) <= _popcount(best):
            continue
        seen.add(comp)
        members = bits(comp)
        h = induced(g, members)
        kappa, cut = vertex_connectivity(h)
        if kappa >= need:
            best = comp
            continue
        cut_mask = to_mask(members[v] for v in cut)
        for piece in components_mask(g.masks, comp & ~cut_mask):
            pending.extend(cored(piece | cut_mask))
    return tuple(bits(best)) if best else None


# ---- partitions ------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Lemma29Params:
    delta: int
    alpha: int
    logn: float
    block_conn_target: float
    extraction_conn: float
    attach_threshold: float

    @classmethod
    def derive(cls, delta: int, alpha: int, n: int) -> Lemma29Params:
        logn = math.log(n)
        attach = delta / (20 * alpha * logn)
        return cls(delta, alpha, logn, attach, delta / logn, attach)


@dataclasses.dataclass
class PartitionResult:
    blocks: list[tuple[int, ...]]
    per_block_connectivity: list[int]
    method: str
    refusal: str | None = None
    stuck_vertex: int | None = None
    checks: dict[str, bool] = dataclasses.field(default_factory=dict)
    detail: dict = dataclasses.field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.refusal is None and all(self.checks.values())

    def block_of(self) -> dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "blocks": [list(b) for b in self.blocks],
            "per_block_connectivity": list(self.per_block_connectivity),
            "refusal": self.refusal,
            "stuck_vertex": self.stuck_vertex,
            "checks": dict(self.checks),
            "detail": self.detail,
        }


def _attach_residual(g: Graph, blocks: list[set[int]], order, threshold: float) -> int | None:
    """Append each vertex of ``order`` to the first block where it has >= threshold neighbours."""
    for w in order:
        for blk in blocks:
            if sum(1 for u in g.adj[w] if u in blk) >= threshold:
                blk.add(w)
                break
        else:
            return w
    return None


def _finish(g: Graph, blocks: list[set[int]], method: str, **detail) -> PartitionResult:
    ordered = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0])
    kappas = [kappa_of(g, b) for b in ordered]
    return PartitionResult(ordered, kappas, method, detail=detail)


def partition_bfkm(g: Graph) -> PartitionResult:
    """Blocks with verified ``kappa >= k^2/(16n)`` and size ``>= k/8``, ``k`` the minimum degree.

    Blocks are extracted at connectivity ``k/4`` (falling back to the
    target itself), then leftover vertices join the first block in which
    they have at least ``ceil(k^2/(16n))`` neighbours; repeated passes
    handle vertices whose neighbours attach later.
    """
    n, k = g.n, min_degree(g)
    if k <= 0:
        raise GraphInputError("partition needs minimum degree > 0")
    conn_target = k * k / (16 * n)
    size_target = k / 8
    need = max(1, math.ceil(conn_target - 1e-12))
    remaining = set(range(n))
    blocks: list[set[int]] = []
    for ext in (max(need, math.ceil(k / 4)), need):
        while remaining:
            a = extract_highly_connected(g, ext, within=remaining)
            if a is None or len(a) < size_target:
                break
            blocks.append(set(a))
            remaining -= set(a)
    stuck = None
    pending = sorted(remaining)
    while pending:
        stuck = _attach_residual(g, blocks, pending, need)
        attached = {v for b in blocks for v in b}
        rest = [v for v in pending if v not in attached]
        if stuck is None or len(rest) == len(pending):
            break
        pending = rest
    res = _finish(g, blocks, "BFKM", conn_target=conn_target, size_target=size_target)
    if stuck is not None and pending:
        res.refusal = f"vertex {stuck} has fewer than {need} neighbours in every block"
        res.stuck_vertex = stuck
        res.blocks.append(tuple(sorted(pending)))
        res.per_block_connectivity.append(kappa_of(g, pending))
    res.checks = {
        "partition": sorted(v for b in res.blocks for v in b) == list(range(n)),
        "connectivity": all(kp >= conn_target for kp in res.per_block_connectivity),
        "size": all(len(b) >= size_target for b in res.blocks),
    }
    if res.refusal is None and not all(res.checks.values()):
        bad = next(
            i
            for i, b in enumerate(res.blocks)
            if res.per_block_connectivity[i] < conn_target or len(b) < size_target
        )
        res.refusal = f"block {bad} misses the connectivity or size target"
    return res


def partition_lemma29(g: Graph, alpha_bound: int | None = None) -> PartitionResult:
    """Greedy maximum extraction, degeneracy-ordered reattachment, then the four checks.

    ``checks`` holds conclusions (i) block count, (ii) large blocks cover
    half, (iii) block sizes and (iv) block connectivity, each computed
    from the output by the exact checkers.
    """
    n = g.n
    if n < 2:
        raise GraphInputError("partition needs at least 2 vertices")
    delta = min_degree(g)
    if delta <= 0:
        raise GraphInputError("partition needs minimum degree > 0")
    alpha = alpha_bound if alpha_bound is not None else independence_number(g)[0]
    if alpha < 1:
        raise GraphInputError("alpha bound must be positive")
    params = Lemma29Params.derive(delta, alpha, n)

    remaining = set(range(n))
    blocks: list[set[int]] = []
    while remaining:
        u = extract_highly_connected(g, params.extraction_conn, within=remaining)
        if u is None:
            break
        blocks.append(set(u))
        remaining -= set(u)
    w = sorted(remaining)
    hw = induced(g, w)
    peel = degeneracy_ordering(hw, hw.n)
    degenerate = degeneracy_ordering(hw, 4 * delta / params.logn).ok
    order = [w[i] for i in peel.ordering]
    extracted = len(blocks)
    stuck = _attach_residual(g, blocks, order, params.attach_threshold) if blocks else (order[0] if order else None)

    detail = {"params": dataclasses.asdict(params), "extracted": extracted, "leftover": len(w), "leftover_degenerate": degenerate}
    if stuck is not None:
        placed = {v for b in blocks for v in b}
        res = _finish(g, blocks, "Lemma29", **detail)
        res.refusal = f"vertex {stuck} has no block with >= {params.attach_threshold:.4g} neighbours"
        res.stuck_vertex = stuck
        res.detail["unplaced"] = sorted(set(range(n)) - placed)
        return res
    res = _finish(g, blocks, "Lemma29", **detail)
    res.checks = lemma29_conclusions(g, res, params)
    res.detail["J"] = large_blocks(res, n, params.alpha)
    return res


def large_blocks(res: PartitionResult, n: int, alpha: int) -> list[int]:
    """Indices of blocks with at least ``0.1 n / alpha`` vertices."""
    return [i for i, b in enumerate(res.blocks) if len(b) >= 0.1 * n / alpha]


def lemma29_conclusions(g: Graph, res: PartitionResult, params: Lemma29Params) -> dict[str, bool]:
    n = g.n
    sizes = [len(b) for b in res.blocks]
    big = sum(sizes[i] for i in large_blocks(res, n, params.alpha))
    kappas = [kappa_of(g, b) for b in res.blocks]
    return {
        "partition": sorted(v for b in res.blocks for v in b) == list(range(n)),
        "i_block_count": len(res.blocks) <= 19 * params.alpha * params.logn,
        "ii_large_blocks_cover_half": big >= n / 2,
        "iii_block_size": all(s >= params.delta / params.logn for s in sizes),
        "iv_block_connectivity": all(kp >= params.block_conn_target for kp in kappas),
    }


# ---- random bisection ------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Bisection:
    ok: bool
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    attempts: int
    stats: dict


def _bisection_quality(g: Graph, s1, s2, kappa: int) -> tuple[bool, dict]:
    m1, m2 = to_mask(s1), to_mask(s2)
    worst_deg = min(
        (min(_popcount(g.masks[u] & m1), _popcount(g.masks[u] & m2)) for u in range(g.n)),
        default=0,
    )
    stats = {"min_degree_into_half": worst_deg}
    if worst_deg < kappa / 4:
        return False, stats
    k1 = kappa_of(g, s1) if s1 else 0
    k2 = kappa_of(g, s2) if s2 else 0
    stats.update(kappa_s1=k1, kappa_s2=k2)
    return min(k1, k2) >= kappa / 8, stats


def connectivity_bisection(g: Graph, retries: int = 64, seed: int = 0, ground=None, kappa: int | None = None) -> Bisection:
    """Fair coin split of ``ground`` (default all vertices) until both halves are well connected.

    Success means ``kappa(G[S_j]) >= kappa(G)/8`` for both halves and every
    vertex of ``g`` has at least ``kappa(G)/4`` neighbours in each half.
    Attempts are seeded by ``(seed, attempt)`` and the first success wins.
    """
    ground = sorted(range(g.n) if ground is None else ground)
    if kappa is None:
        kappa = vertex_connectivity(g)[0]
    best: dict = {}
    for attempt in range(retries):
        rng = random.Random(mix_seed(seed, attempt))
        s1 = tuple(v for v in ground if rng.random() < 0.5)
        s1_set = set(s1)
        s2 = tuple(v for v in ground if v not in s1_set)
        ok, stats = _bisection_quality(g, s1, s2, kappa)
        if ok:
            return Bisection(True, s1, s2, attempt + 1, stats)
        if stats.get("min_degree_into_half", -1) > best.get("min_degree_into_half", -1):
            best = stats
    return Bisection(False, (), (), retries, best)


# ---- linkages --------------------------------------------------------


def _reach_mask(masks, src: int, alive: int) -> int:
    seen = 1 << src
    frontier = seen
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


class _Linkage:
    def __init__(self, g: Graph, pairs, budget: int, spanning: bool):
        self.g = g
        self.masks = g.masks
        self.pairs = pairs
        self.budget = budget
        self.spanning = spanning
        self.nodes = 0
        self.full = (1 << g.n) - 1
        self.endpoint_masks = [to_mask(p) for p in pairs]
        self.failed: set[tuple[int, int]] = set()

    def _later_endpoints(self, i: int) -> int:
        m = 0
        for em in self.endpoint_masks[i + 1 :]:
            m |= em
        return m

    def _feasible(self, i: int, used: int) -> bool:
        # every remaining pair must still be connected avoiding used and other endpoints
        ends = self._later_endpoints(i - 1)
        for j in range(i, len(self.pairs)):
            x, y = self.pairs[j]
            alive = self.full & ~used & ~(ends & ~self.endpoint_masks[j])
            if not (_reach_mask(self.masks, x, alive) >> y) & 1:
                return False
        if self.spanning and i < len(self.pairs):
            # every free vertex must be reachable from some remaining endpoint
            alive = self.full & ~used
            cover = 0
            for j in range(i, len(self.pairs)):
                cover |= _reach_mask(self.masks, self.pairs[j][0], alive)
            if alive & ~cover:
                return False
        return True

    def solve(self, i: int, used: int, acc: list) -> bool:
        if i == len(self.pairs):
            return not self.spanning or used == self.full
        if (i, used) in self.failed:
            return False
        if not self._feasible(i, used):
            self.failed.add((i, used))
            return False
        x, y = self.pairs[i]
        forbidden = used | self._later_endpoints(i)
        last = i == len(self.pairs) - 1
        path = [x]
        if self._paths(x, y, forbidden | (1 << x), path, i, used, acc, last):
            return True
        self.failed.add((i, used))
        return False

    def _order(self, v: int, y: int, alive: int) -> list[int]:
        # shortest-first towards y; spanning mode prefers long detours
        dist = _bfs_dist(self.masks, y, alive | (1 << y))
        nb = [u for u in bits(self.masks[v] & alive) if u in dist]
        nb.sort(key=lambda u: (dist[u], u), reverse=self.spanning)
        if self.spanning:
            nb.sort(key=lambda u: u == y)
        return nb

    def _paths(self, v, y, blocked, path, i, used, acc, last) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _LinkageBudget
        alive = self.full & ~blocked
        for u in self._order(v, y, alive | (1 << y)):
            if u == y:
                pm = to_mask(path) | (1 << y)
                if last and self.spanning and (used | pm) != self.full:
                    continue
                acc.append(tuple(path) + (y,))
                if self.solve(i + 1, used | pm, acc):
                    return True
                acc.pop()
                continue
            if (blocked >> u) & 1:
                continue
            path.append(u)
            if self._paths(u, y, blocked | (1 << u), path, i, used, acc, last):
                return True
            path.pop()
        return False


class _LinkageBudget(Exception):
    pass


def _bfs_dist(masks, src: int, alive: int) -> dict[int, int]:
    dist = {src: 0}
    q = deque([src])
    while q:
        v = q.popleft()
        for u in bits(masks[v] & alive):
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def _check_pairs(g: Graph, pairs) -> list[tuple[int, int]]:
    pairs = [(int(x), int(y)) for x, y in pairs]
    flat = [v for p in pairs for v in p]
    if len(set(flat)) != len(flat):
        raise GraphInputError("endpoints must be 2r distinct vertices")
    for v in flat:
        if not 0 <= v < g.n:
            raise GraphInputError(f"endpoint {v} out of range")
    return pairs


def disjoint_paths(
    g: Graph,
    pairs,
    budget: int = LINKAGE_BUDGET,
    spanning: bool = False,
    max_pairs: int = LINKAGE_MAX_PAIRS,
    max_n: int = LINKAGE_MAX_N,
) -> Decision:
    """Vertex-disjoint ``x_i``-``y_i`` paths by backtracking with memoised dead states.

    With ``spanning`` the paths must also cover every vertex. NO means the
    search space was exhausted; UNKNOWN means the node budget ran out.
    """
    pairs = _check_pairs(g, pairs)
    if len(pairs) > max_pairs or g.n > max_n:
        raise CapacityError(f"linkage search capped at r <= {max_pairs}, n <= {max_n}")
    if not pairs:
        return yes(PathSystem((), ())) if not spanning or g.n == 0 else no("nothing to cover with")
    search = _Linkage(g, pairs, budget, spanning)
    acc: list[tuple[int, ...]] = []
    try:
        found = search.solve(0, 0, acc)
    except _LinkageBudget:
        return unknown("budget", nodes=search.nodes)
    if not found:
        return no("exhausted", nodes=search.nodes)
    return yes(PathSystem(tuple(acc), tuple(pairs)), nodes=search.nodes)


def _lift_system(h: Graph, system: PathSystem) -> PathSystem:
    paths = tuple(tuple(h.lift(v) for v in p) for p in system.paths)
    pairs = tuple((h.lift(x), h.lift(y)) for x, y in system.endpoint_pairs)
    return PathSystem(paths, pairs)


def _local(h: Graph, pairs):
    index = {h.lift(v): v for v in range(h.n)}
    return [(index[x], index[y]) for x, y in pairs]


def _split_route(g: Graph, pairs, s1, budget, max_pairs=LINKAGE_MAX_PAIRS) -> Decision:
    """Pairs 1..r-1 inside ``G[s1 + their endpoints]``, then a Hamilton path for pair r on the rest."""
    head, (xr, yr) = pairs[:-1], pairs[-1]
    g1_vertices = set(s1) | {v for p in head for v in p}
    g1 = induced(g, sorted(g1_vertices))
    link = disjoint_paths(g1, _local(g1, head), budget=budget, max_pairs=max_pairs)
    if not link.yes:
        return Decision(link.status, None, "linkage", {"stage": "linkage"})
    system = _lift_system(g1, link.witness)
    used = system.covered()
    g2 = induced(g, [v for v in range(g.n) if v not in used])
    (lx, ly), = _local(g2, [(xr, yr)])
    ham = cycles.hamilton_path_between(g2, lx, ly, budget=budget)
    if not ham.yes:
        return Decision(ham.status, None, "hamilton-path", {"stage": "hamilton-path"})
    last = tuple(g2.lift(v) for v in ham.witness.vertices)
    return yes(PathSystem(system.paths + (last,), tuple(pairs)))


def spanning_path_system(
    g: Graph,
    pairs,
    c: float = 1.0,
    retries: int = 64,
    seed: int = 0,
    budget: int = LINKAGE_BUDGET,
    alpha: int | None = None,
    kappa: int | None = None,
    max_pairs: int = LINKAGE_MAX_PAIRS,
) -> Decision:
    """Disjoint paths with the given endpoints that together cover every vertex.

    Route: a random bisection of the non-endpoint vertices, pairs ``1..r-1``
    linked inside the first half, and a Hamilton path for the last pair on
    what is left. If no bisection attempt works, the same two steps are
    tried on the whole graph, and for ``n <= 20`` an exhaustive spanning
    linkage search settles the question. The connectivity precondition
    ``kappa >= c * max(alpha, log n, r)`` is enforced unless ``c <= 0``.
    """
    pairs = _check_pairs(g, pairs)
    r = len(pairs)
    if r == 0:
        raise GraphInputError("at least one endpoint pair is required")
    detail: dict = {}
    if c > 0:
        kappa = vertex_connectivity(g)[0] if kappa is None else kappa
        alpha = independence_number(g)[0] if alpha is None else alpha
        bound = c * max(alpha, math.log(g.n) if g.n > 1 else 0.0, r)
        detail.update(kappa=kappa, alpha=alpha, precondition=bound)
        if kappa < bound:
            return no("precondition", stage="precondition", **detail)

    def done(res: Decision, stage: str) -> Decision:
        assert verify_certificate(g, res.witness, spanning=True), "spanning path system failed verification"
        return yes(res.witness, stage=stage, **detail)

    if r == 1:
        (x, y), = pairs
        ham = cycles.hamilton_path_between(g, x, y, budget=budget)
        if ham.yes:
            return done(yes(PathSystem((ham.witness.vertices,), tuple(pairs))), "hamilton-path")
        return Decision(ham.status, None, "hamilton-path", {"stage": "hamilton-path", **detail})

    endpoints = {v for p in pairs for v in p}
    ground = [v for v in range(g.n) if v not in endpoints]
    statuses = []
    bis_seed = seed
    tried = 0
    while tried < retries:
        bis = connectivity_bisection(g, retries=retries - tried, seed=bis_seed, ground=ground, kappa=kappa)
        if not bis.ok:
            break
        tried += bis.attempts
        res = _split_route(g, pairs, bis.s1, budget, max_pairs)
        if res.yes:
            return done(res, "bisection")
        statuses.append(res.status)
        bis_seed = mix_seed(seed, tried)
    res = _split_route(g, pairs, ground, budget, max_pairs)
    if res.yes:
        return done(res, "direct")
    statuses.append(res.status)
    if g.n <= EXHAUSTIVE_SPANNING_N:
        ex = disjoint_paths(g, pairs, budget=budget * 10, spanning=True, max_pairs=max_pairs)
        if ex.yes:
            return done(ex, "exhaustive")
        return Decision(ex.status, None, ex.reason, {"stage": "exhaustive", **detail})
    # the routes tried are not exhaustive, so failing them all proves nothing
    return unknown("routes-failed", stage="routes", statuses=[st.value for st in statuses], **detail)
