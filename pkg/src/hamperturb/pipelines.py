"""Constructive cycle-building pipelines.

Each pipeline partitions the seed graph, builds an auxiliary digraph
whose arcs are realised by concrete edges, finds a (long) directed cycle
in it and translates that cycle back into a cycle of ``G u R`` through
path systems inside the blocks. Stage failures are values recorded in
the trace, never exceptions.
"""

from __future__ import annotations

import dataclasses
import json
import math
import random
import time
from typing import Any

from .certificates import (
    CapacityError,
    CycleCertificate,
    Decision,
    Status,
    verify_certificate,
)
from .checkers import cycles
from .checkers.structure import bipartite_max_matching, independence_number, is_t_tough
from .decompose import partition_bfkm, partition_lemma29, spanning_path_system
from .families import balanced_sizes
from .graph import Digraph, Graph, core, induced, min_degree, union
from .random_models import mix_seed

EDGE_SOURCES = ("union", "random")


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by the pipelines.

    ``edge_source`` decides which graph realises auxiliary arcs and
    matching edges: ``"union"`` uses ``G u R``, ``"random"`` only ``R``.
    ``constant_overrides`` accepts ``linkage_c`` (connectivity factor of
    the spanning linkage precondition), ``pancyclic_c`` (alpha <= c*sqrt(n)
    gate for the pancyclicity check), ``small_block_size`` and
    ``part_size`` (block and part thresholds of the small-alpha pipeline).
    """

    delta_ratio: float | None = None
    epsilon: float = 0.25
    constant_overrides: dict = dataclasses.field(default_factory=dict)
    budget: int = 200_000
    aux_budget: int = 20_000
    seed: int = 0
    alpha_bound: int | None = None
    edge_source: str = "union"
    split_attempts: int = 8
    check_pancyclic: bool = True

    def __post_init__(self):
        if self.delta_ratio is not None and not 0 < self.delta_ratio < 1:
            raise ValueError("delta_ratio must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.edge_source not in EDGE_SOURCES:
            raise ValueError(f"edge_source must be one of {EDGE_SOURCES}")
        if self.split_attempts < 1:
            raise ValueError("split_attempts must be >= 1")

    def const(self, name: str, default: float) -> float:
        return float(self.constant_overrides.get(name, default))


@dataclasses.dataclass
class PipelineTrace:
    pipeline: str
    stages: list[dict] = dataclasses.field(default_factory=list)
    certificate: CycleCertificate | None = None
    failure_stage: str | None = None
    status: Status = Status.UNKNOWN
    warnings: list[str] = dataclasses.field(default_factory=list)
    timings: dict[str, float] = dataclasses.field(default_factory=dict)
    summary: dict = dataclasses.field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.YES

    def stage(self, name: str, ok: bool, **info) -> None:
        self.stages.append({"stage": name, "ok": ok, **info})

    def fail(self, name: str, status: Status = Status.NO, **info) -> PipelineTrace:
        self.stage(name, False, **info)
        self.failure_stage = name
        self.status = status
        return self

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "pipeline": self.pipeline,
            "status": self.status.value,
            "failure_stage": self.failure_stage,
            "stages": self.stages,
            "warnings": self.warnings,
            "summary": self.summary,
            "certificate": list(self.certificate.vertices) if self.certificate else None,
        }
        if timings:
            out["timings"] = self.timings
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, Status):
        return x.value
    raise TypeError(f"not serialisable: {type(x).__name__}")


class _Clock:
    def __init__(self, trace: PipelineTrace):
        self.trace = trace
        self.t = time.perf_counter()

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.trace.timings[name] = self.trace.timings.get(name, 0.0) + now - self.t
        self.t = now


# ---- auxiliary digraph -------------------------------------------------


@dataclasses.dataclass(frozen=True)
class AuxDigraphMap:
    """Auxiliary digraph with the meaning of each node and a witness edge per arc.

    Arc ``(i, j)`` exists iff some edge runs from ``exit_sets[i]`` to
    ``entry_sets[j]``; its witness is the lexicographically smallest such
    ``(exit vertex, entry vertex)`` pair.
    """

    aux: Digraph
    node_meaning: tuple[dict, ...]
    exit_sets: tuple[tuple[int, ...], ...]
    entry_sets: tuple[tuple[int, ...], ...]
    arc_witness: dict[tuple[int, int], tuple[int, int]]

    def to_dict(self) -> dict:
        return {
            "nodes": len(self.node_meaning),
            "arcs": self.aux.m,
            "node_meaning": list(self.node_meaning),
        }


def build_aux(source: Graph, exit_sets, entry_sets, meanings, self_loops: bool = False) -> AuxDigraphMap:
    masks = source.masks
    entry_masks = [sum(1 << v for v in s) for s in entry_sets]
    witness: dict[tuple[int, int], tuple[int, int]] = {}
    for i, ex in enumerate(exit_sets):
        for j, em in enumerate(entry_masks):
            if i == j and not self_loops:
                continue
            for a in sorted(ex):
                hit = masks[a] & em
                if hit:
                    witness[(i, j)] = (a, (hit & -hit).bit_length() - 1)
                    break
    arcs = [ij for ij in witness if ij[0] != ij[1]]
    aux = Digraph.from_arcs(len(exit_sets), arcs)
    return AuxDigraphMap(
        aux,
        tuple(meanings),
        tuple(tuple(s) for s in exit_sets),
        tuple(tuple(s) for s in entry_sets),
        witness,
    )


def _aux_hamilton_cycle(amap: AuxDigraphMap, budget: int) -> Decision:
    k = amap.aux.n
    if k == 1:
        if (0, 0) in amap.arc_witness:
            return Decision(Status.YES, CycleCertificate((0,), directed=True))
        return Decision(Status.NO, None, "no self arc")
    return cycles.directed_hamilton_cycle(amap.aux, budget)


def _endpoints(amap: AuxDigraphMap, order) -> tuple[dict[int, int], dict[int, int]]:
    """Exit and entry vertex of each node on the directed cycle ``order``."""
    exits, entries = {}, {}
    for pos, i in enumerate(order):
        j = order[(pos + 1) % len(order)]
        a, b = amap.arc_witness[(i, j)]
        exits[i] = a
        entries[j] = b
    return exits, entries


def _orient(path, start: int) -> list[int]:
    path = list(path)
    return path if path[0] == start else path[::-1]


def _source(g: Graph, r: Graph, cfg: PipelineConfig) -> tuple[Graph, Graph]:
    if g.n != r.n:
        raise ValueError(f"seed graph has {g.n} vertices, random graph {r.n}")
    host = union(g, r)
    return host, (host if cfg.edge_source == "union" else r)


def _shuffled(block, attempt: int, seed: int, salt: int) -> list[int]:
    order = sorted(block)
    if attempt:
        random.Random(mix_seed(seed, attempt, salt)).shuffle(order)
    return order


def _link_block(g: Graph, block, pairs, cfg: PipelineConfig, salt: int, kappa: int | None) -> Decision:
    """Spanning path system of ``G[block]`` for global endpoint pairs, lifted back."""
    h = induced(g, block)
    local = {v: i for i, v in enumerate(sorted(block))}
    lp = [(local[x], local[y]) for x, y in pairs]
    try:
        res = spanning_path_system(
            h,
            lp,
            c=cfg.const("linkage_c", 1.0),
            seed=mix_seed(cfg.seed, salt),
            budget=cfg.budget,
            kappa=kappa,
            max_pairs=max(len(lp), 8),
        )
    except CapacityError as exc:
        return Decision(Status.UNKNOWN, None, f"capacity: {exc}")
    if not res.yes:
        return res
    paths = [tuple(h.lift(v) for v in p) for p in res.witness.paths]
    return Decision(Status.YES, paths, "", res.detail)


def _finish_cycle(trace: PipelineTrace, host: Graph, seq: list[int], spanning: bool) -> PipelineTrace:
    cert = CycleCertificate(tuple(seq))
    check = verify_certificate(host, cert, spanning=spanning)
    if not check:
        return trace.fail("assembly", Status.NO, violation=check.violation)
    trace.stage("assembly", True, length=len(seq))
    trace.certificate = cert
    trace.status = Status.YES
    return trace


# ---- dense seed graphs: block partition and sub-blocks ---------------


def _chunk(order: list[int], lo: float, hi: float, trace: PipelineTrace, block_id: int) -> list[list[int]]:
    """Consecutive chunks of size ``floor(hi)`` (at least 2); a short tail merges into the last chunk."""
    size = max(2, math.floor(hi))
    if len(order) < max(2, lo) or len(order) < 2 * size:
        if len(order) < lo:
            trace.warnings.append(f"block {block_id} smaller than the sub-block window; kept whole")
        return [order]
    chunks = [order[i : i + size] for i in range(0, len(order), size)]
    if len(chunks[-1]) < max(2, math.ceil(lo)):
        tail = chunks.pop()
        chunks[-1].extend(tail)
        if len(chunks[-1]) > hi:
            trace.warnings.append(f"block {block_id}: merged tail exceeds the upper window")
    return chunks


def hamiltonicity_pipeline_thm1(g: Graph, r: Graph, cfg: PipelineConfig | None = None) -> PipelineTrace:
    """Hamilton cycle of ``G u R`` for a seed graph of linear minimum degree.

    Stages: partition into highly connected blocks, chunk blocks into
    sub-blocks split into exit half ``B1`` and entry half ``B2``, an
    auxiliary digraph with an arc ``u -> w`` iff an edge joins ``B1(u)``
    and ``B2(w)``, a directed Hamilton cycle of it, a spanning path system
    per block joining each sub-block's entry to its exit, and assembly.
    Up to ``split_attempts`` seeded re-splits are tried when the
    auxiliary or linkage stage fails.
    """
    cfg = cfg or PipelineConfig()
    trace = PipelineTrace("thm1")
    clock = _Clock(trace)
    host, src = _source(g, r, cfg)
    n, delta = g.n, min_degree(g)
    if n < 3 or delta == 0:
        return trace.fail("partition", reason="needs n >= 3 and minimum degree > 0")
    dn = (cfg.delta_ratio or delta / n) * n
    part = partition_bfkm(g)
    clock.lap("partition")
    if not part.ok:
        return trace.fail("partition", reason=part.refusal, checks=part.checks)
    trace.stage("partition", True, blocks=len(part.blocks), connectivity=part.per_block_connectivity)
    lo, hi = dn / 16, dn / 8
    last_fail: tuple[str, Status, dict] = ("aux-not-hamiltonian", Status.NO, {})
    for attempt in range(cfg.split_attempts):
        subs: list[tuple[int, list[int]]] = []
        for bi, block in enumerate(part.blocks):
            for chunk in _chunk(_shuffled(block, attempt, cfg.seed, bi), lo, hi, trace, bi):
                subs.append((bi, chunk))
        exit_sets = [c[: len(c) // 2] for _, c in subs]  # B1, the smaller half
        entry_sets = [c[len(c) // 2 :] for _, c in subs]  # B2
        meanings = [{"block": bi, "sub_block": k, "B1": sorted(b1), "B2": sorted(b2)}
                    for k, ((bi, _), b1, b2) in enumerate(zip(subs, exit_sets, entry_sets))]
        amap = build_aux(src, exit_sets, entry_sets, meanings, self_loops=len(subs) == 1)
        ham = _aux_hamilton_cycle(amap, cfg.aux_budget)
        clock.lap("aux")
        if not ham.yes:
            last_fail = ("aux-not-hamiltonian", ham.status if ham.status is Status.UNKNOWN else Status.NO,
                         {"attempt": attempt, "aux_nodes": amap.aux.n, "aux_arcs": amap.aux.m})
            continue
        order = list(ham.witness.vertices)
        exits, entries = _endpoints(amap, order)
        paths: dict[int, list[int]] = {}
        failed = None
        for bi, block in enumerate(part.blocks):
            members = [k for k, (b, _) in enumerate(subs) if b == bi]
            pairs = [(entries[k], exits[k]) for k in members]
            res = _link_block(g, block, pairs, cfg, salt=1000 * attempt + bi, kappa=part.per_block_connectivity[bi])
            if not res.yes:
                failed = ("linkage", res.status, {"attempt": attempt, "block": bi, "reason": res.reason})
                break
            for k, p in zip(members, res.witness):
                paths[k] = _orient(p, entries[k])
        clock.lap("linkage")
        if failed:
            last_fail = failed
            continue
        trace.stage("sub-blocks", True, count=len(subs), attempt=attempt)
        trace.stage("aux-digraph", True, nodes=amap.aux.n, arcs=amap.aux.m)
        trace.stage("aux-cycle", True, order=order)
        trace.stage("linkage", True, blocks=len(part.blocks))
        seq = [v for k in order for v in paths[k]]
        trace.summary = {"attempts": attempt + 1, "sub_blocks": len(subs)}
        out = _finish_cycle(trace, host, seq, spanning=True)
        clock.lap("assembly")
        return out
    name, status, info = last_fail
    return trace.fail(name, status, **info)


# ---- small independence number: Lemma-style partition ----------------


def hamiltonicity_pipeline_thm2(g: Graph, r: Graph, cfg: PipelineConfig | None = None) -> PipelineTrace:
    """Hamilton cycle of ``G u R`` for a seed graph with small independence number.

    Blocks below the small-block threshold are halved into ``X`` sets and
    matched (bipartite matching) to parts ``Y`` of the large blocks; each
    small block is absorbed into a composite auxiliary node through a
    Hamilton path between its two matched vertices. Remaining parts are
    plain nodes split into entry half ``L`` and exit half ``R``.
    """
    cfg = cfg or PipelineConfig()
    trace = PipelineTrace("thm2")
    clock = _Clock(trace)
    host, src = _source(g, r, cfg)
    n = g.n
    if n < 3 or min_degree(g) == 0:
        return trace.fail("partition", reason="needs n >= 3 and minimum degree > 0")
    alpha = cfg.alpha_bound or independence_number(g)[0]
    part = partition_lemma29(g, alpha)
    clock.lap("partition")
    if not part.ok:
        return trace.fail("partition", reason=part.refusal, checks=part.checks, stuck_vertex=part.stuck_vertex)
    trace.stage("partition", True, blocks=len(part.blocks), checks=part.checks)
    base = n / (100 * alpha * math.log(n))
    small_thr = cfg.const("small_block_size", max(2.0, base))
    part_cap = cfg.const("part_size", max(2.0, base))
    small = [i for i, b in enumerate(part.blocks) if len(b) < small_thr]
    large = [i for i, b in enumerate(part.blocks) if len(b) >= small_thr]
    trace.summary = {"small_blocks": len(small), "large_blocks": len(large), "small_threshold": small_thr, "part_cap": part_cap}
    if not large:
        return trace.fail("partition", reason="no block reaches the small-block threshold")
    if any(len(part.blocks[i]) < 2 for i in small):
        return trace.fail("partition", reason="small block with a single vertex")
    last_fail: tuple[str, Status, dict] = ("aux-not-hamiltonian", Status.NO, {})
    for attempt in range(cfg.split_attempts):
        out = _thm2_attempt(g, host, src, part, small, large, part_cap, cfg, trace, attempt)
        clock.lap(f"attempt-{attempt}")
        if isinstance(out, PipelineTrace):
            trace.summary["attempts"] = attempt + 1
            return out
        last_fail = out
    name, status, info = last_fail
    return trace.fail(name, status, **info)


def _thm2_attempt(g, host, src, part, small, large, part_cap, cfg, trace, attempt):
    blocks = part.blocks
    xs: list[list[int]] = []
    for i in small:
        order = _shuffled(blocks[i], attempt, cfg.seed, i)
        h = len(order) // 2
        xs += [order[:h], order[h:]]
    ys: list[list[int]] = []
    y_block: list[int] = []
    for i in large:
        order = _shuffled(blocks[i], attempt, cfg.seed, i)
        parts = max(1, min(math.ceil(len(order) / part_cap), len(order) // 2))
        start = 0
        for size in balanced_sizes(len(order), parts):
            ys.append(order[start : start + size])
            y_block.append(i)
            start += size
    q, q2 = len(xs), len(ys)
    s = len(small)
    # match every X set to a distinct Y set through an edge between them
    mapping = list(range(q2))
    uv: list[tuple[int, int]] = []
    if q:
        masks = src.masks
        ymasks = [sum(1 << v for v in y) for y in ys]
        edges = [(a, b) for a, x in enumerate(xs) for b in range(q2) if any(masks[v] & ymasks[b] for v in x)]
        size, pairs = bipartite_max_matching(q, q2, edges)
        if size < q:
            return ("matching", Status.NO, {"attempt": attempt, "matched": size, "needed": q})
        matched = dict(pairs)
        mapping = [matched[a] for a in range(q)] + [b for b in range(q2) if b not in set(matched.values())]
        for a in range(q):
            ym = ymasks[matched[a]]
            u = min(v for v in xs[a] if masks[v] & ym)
            hit = masks[u] & ym
            uv.append((u, (hit & -hit).bit_length() - 1))
    ys = [ys[b] for b in mapping]
    y_block = [y_block[b] for b in mapping]
    # auxiliary nodes: composite ones for small blocks, then the unmatched parts
    entry_sets, exit_sets, meanings = [], [], []
    for i in range(s):
        left = [v for v in ys[2 * i] if v != uv[2 * i][1]]
        right = [v for v in ys[2 * i + 1] if v != uv[2 * i + 1][1]]
        if not left or not right:
            return ("sets", Status.NO, {"attempt": attempt, "reason": "matched part too small for a composite node"})
        entry_sets.append(left)
        exit_sets.append(right)
        meanings.append({"composite": small[i], "L": sorted(left), "R": sorted(right)})
    for k in range(q, q2):
        z = ys[k]
        h = len(z) // 2
        entry_sets.append(z[:h])
        exit_sets.append(z[h:])
        meanings.append({"part": k, "block": y_block[k], "L": sorted(z[:h]), "R": sorted(z[h:])})
    amap = build_aux(src, exit_sets, entry_sets, meanings, self_loops=len(entry_sets) == 1)
    ham = _aux_hamilton_cycle(amap, cfg.aux_budget)
    if not ham.yes:
        status = Status.UNKNOWN if ham.status is Status.UNKNOWN else Status.NO
        return ("aux-not-hamiltonian", status, {"attempt": attempt, "aux_nodes": amap.aux.n, "aux_arcs": amap.aux.m})
    order = list(ham.witness.vertices)
    exits, entries = _endpoints(amap, order)
    # Hamilton paths through the small blocks
    qpaths = {}
    for i, bi in enumerate(small):
        h = induced(g, blocks[bi])
        local = {v: j for j, v in enumerate(blocks[bi])}
        u1, u2 = uv[2 * i][0], uv[2 * i + 1][0]
        res = cycles.hamilton_path_between(h, local[u1], local[u2], budget=cfg.budget)
        if not res.yes:
            return ("small-block-path", res.status, {"attempt": attempt, "block": bi})
        qpaths[i] = _orient([h.lift(v) for v in res.witness.vertices], u1)
    # pairs per Y part: composite halves end at the matched vertex, plain parts run entry to exit
    part_pair: dict[int, tuple[int, int]] = {}
    for k in range(q2):
        if k < q:
            z = k // 2
            part_pair[k] = (entries[z], uv[k][1]) if k % 2 == 0 else (uv[k][1], exits[z])
        else:
            z = s + (k - q)
            part_pair[k] = (entries[z], exits[z])
    part_path: dict[int, list[int]] = {}
    for bi in large:
        ks = [k for k in range(q2) if y_block[k] == bi]
        pairs = [part_pair[k] for k in ks]
        kappa = part.per_block_connectivity[bi]
        res = _link_block(g, blocks[bi], pairs, cfg, salt=1000 * attempt + bi, kappa=kappa)
        if not res.yes:
            return ("linkage", res.status, {"attempt": attempt, "block": bi, "reason": res.reason})
        for k, p in zip(ks, res.witness):
            part_path[k] = _orient(p, part_pair[k][0])
    seq: list[int] = []
    for z in order:
        if z < s:
            seq += part_path[2 * z] + qpaths[z] + part_path[2 * z + 1]
        else:
            seq += part_path[q + z - s]
    trace.stage("equipartition", True, x_sets=q, y_sets=q2, attempt=attempt)
    trace.stage("matching", True, size=q)
    trace.stage("aux-digraph", True, nodes=amap.aux.n, arcs=amap.aux.m)
    trace.stage("aux-cycle", True, order=order)
    trace.stage("linkage", True, blocks=len(large))
    return _finish_cycle(trace, host, seq, spanning=True)


# ---- long cycles -----------------------------------------------------


def harvest_paths(g: Graph, length: int, limit: int) -> list[tuple[int, ...]]:
    """Up to ``limit`` disjoint paths on ``length`` vertices, each found in the ``length``-core of what is left."""
    used: set[int] = set()
    paths = []
    while len(paths) < limit:
        alive = [v for v in range(g.n) if v not in used]
        kept = set(core(g, length, within=alive))
        if not kept:
            break
        path = [min(kept)]
        on = {path[0]}
        while len(path) < length:
            # minimum degree >= length in the core, so an unused neighbour always exists
            nxt = next(u for u in g.adj[path[-1]] if u in kept and u not in on)
            path.append(nxt)
            on.add(nxt)
        paths.append(tuple(path))
        used |= on
    return paths


def _strong_components(d: Digraph) -> list[list[int]]:
    full = (1 << d.n) - 1

    def reach(v: int, masks) -> int:
        seen = frontier = 1 << v
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                nxt |= masks[b.bit_length() - 1]
                f ^= b
            nxt &= full & ~seen
            seen |= nxt
            frontier = nxt
        return seen

    left = full
    comps = []
    while left:
        v = (left & -left).bit_length() - 1
        comp = reach(v, d.out_masks) & reach(v, d.in_masks) & left
        comps.append([u for u in range(d.n) if (comp >> u) & 1])
        left &= ~comp
    return comps


def _long_aux_cycle(amap: AuxDigraphMap, min_nodes: int, budget: int) -> tuple[list[int] | None, Status]:
    d = amap.aux
    if d.n == 1:
        return ([0], Status.YES) if (0, 0) in amap.arc_witness else (None, Status.YES)
    best, status = None, Status.YES
    for comp in sorted(_strong_components(d), key=len, reverse=True):
        if len(comp) < max(2, min_nodes) or (best and len(comp) <= len(best)):
            break
        index = {v: i for i, v in enumerate(comp)}
        sub = Digraph.from_arcs(len(comp), [(index[u], index[w]) for u in comp for w in d.out_adj[u] if w in index])
        res = cycles.directed_cycle_at_least(sub, max(2, min_nodes), budget)
        if res.status is Status.UNKNOWN:
            status = Status.UNKNOWN
        if res.witness and (best is None or res.length > len(best)):
            best = [comp[v] for v in res.witness.vertices]
    return best, status


def long_cycle_pipeline_thm4(
    g: Graph, r: Graph, epsilon: float | None = None, cfg: PipelineConfig | None = None
) -> PipelineTrace:
    """Cycle of length at least ``(1 - epsilon) n`` in ``G u R``.

    Paths on ``l = max(2, floor(eps*n/(4*alpha)))`` vertices are harvested
    from successive cores, up to ``ceil(4(1 - eps/3) alpha / eps)`` of
    them. Windows of ``max(1, floor(eps*l/6))`` vertices at both ends give
    the auxiliary arcs ``P_i -> P_j`` (last window of ``P_i`` to first
    window of ``P_j``); a long directed cycle through them is expanded
    back into subpaths.
    """
    cfg = cfg or PipelineConfig()
    eps = cfg.epsilon if epsilon is None else epsilon
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    trace = PipelineTrace("thm4")
    clock = _Clock(trace)
    host, src = _source(g, r, cfg)
    n = g.n
    alpha = cfg.alpha_bound or independence_number(g)[0]
    ell = max(2, math.floor(eps * n / (4 * alpha)))
    r_target = math.ceil(4 * (1 - eps / 3) * alpha / eps)
    paths = harvest_paths(g, ell, r_target)
    clock.lap("paths")
    if not paths:
        return trace.fail("paths", reason=f"no path on {ell} vertices")
    w = max(1, math.floor(eps * ell / 6))
    w = min(w, ell // 2)
    trace.stage("paths", True, count=len(paths), ell=ell, r_target=r_target, window=w)
    entry_sets = [p[:w] for p in paths]  # X windows
    exit_sets = [p[-w:] for p in paths]  # Y windows
    meanings = [{"path": i, "X": list(x), "Y": list(y)} for i, (x, y) in enumerate(zip(entry_sets, exit_sets))]
    amap = build_aux(src, exit_sets, entry_sets, meanings, self_loops=len(paths) == 1)
    trace.stage("aux-digraph", True, nodes=amap.aux.n, arcs=amap.aux.m)
    goal = math.ceil((1 - eps) * n - 1e-9)
    # each aux node contributes at most ell vertices
    min_nodes = max(1, math.ceil(goal / ell))
    order, status = _long_aux_cycle(amap, min_nodes, cfg.aux_budget)
    clock.lap("aux")
    if order is None:
        return trace.fail("aux-cycle", status, min_nodes=min_nodes)
    trace.stage("aux-cycle", True, length=len(order), order=order)
    exits, entries = _endpoints(amap, order)
    seq: list[int] = []
    sub_edges = 0
    for i in order:
        p = paths[i]
        a, b = p.index(entries[i]), p.index(exits[i])
        sub = p[a : b + 1]
        sub_edges += len(sub) - 1
        seq += sub
    arcs = len(order) if len(order) > 1 or (0, 0) in amap.arc_witness else 0
    accounting = {"subpath_edges": sub_edges, "aux_arcs": arcs, "cycle_length": len(seq),
                  "holds": sub_edges + arcs == len(seq)}
    trace.summary = {"accounting": accounting, "goal": goal, "alpha": alpha}
    out = _finish_cycle(trace, host, seq, spanning=False)
    clock.lap("assembly")
    if not out.ok:
        return out
    if len(seq) < goal:
        trace.certificate = out.certificate
        return trace.fail("length", Status.NO, length=len(seq), goal=goal)
    if cfg.check_pancyclic:
        alpha_u = independence_number(host)[0] if host.n <= 200 else None
        if alpha_u is not None and alpha_u <= cfg.const("pancyclic_c", 1.0) * math.sqrt(n):
            h = induced(host, seq)
            local = {v: i for i, v in enumerate(sorted(seq))}
            rep = cycles.pancyclicity_report(h, budget=cfg.budget, hamilton_cycle=tuple(local[v] for v in seq))
            trace.stage("pancyclicity", True, pancyclic=rep.is_pancyclic,
                        missing=sorted(rep.missing), indeterminate=sorted(rep.indeterminate))
            clock.lap("pancyclicity")
    return trace


# ---- toughness -------------------------------------------------------


def toughness_experiment_thm3(g: Graph, r: Graph, t: float, cap: int = 20, samples: int = 2000, seed: int = 0) -> Decision:
    """Is ``G u R`` ``t``-tough? Exact up to ``cap`` vertices, sampled beyond."""
    if g.n != r.n:
        raise ValueError(f"seed graph has {g.n} vertices, random graph {r.n}")
    return is_t_tough(union(g, r), t, cap=cap, samples=samples, seed=seed)


PIPELINES = {
    "thm1": hamiltonicity_pipeline_thm1,
    "thm2": hamiltonicity_pipeline_thm2,
    "thm4": long_cycle_pipeline_thm4,
}


def run_pipeline(name: str, g: Graph, r: Graph, cfg: PipelineConfig) -> PipelineTrace:
    if name not in PIPELINES:
        raise ValueError(f"unknown pipeline {name!r}")
    return PIPELINES[name](g, r, cfg=cfg)


def trace_record(trace: PipelineTrace) -> dict[str, Any]:
    return trace.to_dict()
