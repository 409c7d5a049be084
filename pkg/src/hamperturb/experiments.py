"""Monte Carlo estimation over seeded perturbations, thresholds and exact closed forms.

Trial ``i`` of every grid cell uses the same seed when ``coupled`` is set
(the default), so along the p grid each trial sees a growing random
graph and estimates of monotone properties are non-decreasing exactly,
not just statistically.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import decimal
import hashlib
import io
import itertools
import json
import math
from statistics import NormalDist
from typing import Any

import numpy as np

from . import __version__
from .certificates import CapacityError, Status
from .checkers import cycles
from .checkers.structure import is_t_tough
from .families import FamilySpec, blocks, build_family, layout
from .graph import Graph, connected_components, is_connected, union
from .random_models import check_probability, mix_seed, pair_uniforms, sample_gnp

PROPERTIES = ("hamiltonian", "pancyclic", "connected", "t-tough", "circumference", "perfect-matching")
# structural events of the random part that have exact closed forms
EVENTS = ("no-crossing-edge", "some-clique-isolated", "iab-obstruction")
CLIQUE_KINDS = ("TwoCliques", "BalancedCliques", "CliqueForest", "ToughnessCliques", "MCliques")
CSV_HEADER = "p,trials,success,fail,indeterminate,estimate,wilson_lo,wilson_hi"
UNUSABLE_FRACTION = 0.2
VECTOR_CHUNK = 1 << 22  # uniforms per numpy batch


class ExperimentError(ValueError):
    pass


# ---- configuration ---------------------------------------------------


def _grid(spec) -> tuple[float, ...]:
    if isinstance(spec, dict):
        lo, hi, count = float(spec["min"]), float(spec["max"]), int(spec["count"])
        if count < 1 or lo > hi:
            raise ExperimentError("p_grid needs count >= 1 and min <= max")
        if count == 1:
            return (lo,)
        if spec.get("log", False):
            if lo <= 0:
                raise ExperimentError("log-spaced p_grid needs min > 0")
            vals = np.geomspace(lo, hi, count)
        else:
            vals = np.linspace(lo, hi, count)
        return tuple(float(v) for v in vals)
    return tuple(float(p) for p in spec)


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    family: FamilySpec
    property: str
    p_grid: tuple[float, ...]
    trials: int
    base_seed: int = 0
    t: float | None = None  # t-tough
    length: int | None = None  # circumference >= length
    budget: int = cycles.DEFAULT_BUDGET
    coupled: bool = True
    workers: int = 1
    threshold_trials: int | None = None
    target: float = 0.5

    def __post_init__(self):
        if self.property not in PROPERTIES + EVENTS:
            raise ExperimentError(f"unknown property {self.property!r}; expected one of {', '.join(PROPERTIES + EVENTS)}")
        if self.trials < 1:
            raise ExperimentError("trials must be >= 1")
        if not self.p_grid:
            raise ExperimentError("p_grid is empty")
        if list(self.p_grid) != sorted(self.p_grid):
            raise ExperimentError("p_grid must be sorted ascending")
        for p in self.p_grid:
            check_probability(p)
        if self.property == "t-tough" and self.t is None:
            raise ExperimentError("property t-tough needs t")
        if self.property == "circumference" and self.length is None:
            raise ExperimentError("property circumference needs length")
        if self.workers < 1:
            raise ExperimentError("workers must be >= 1")
        layout(self.family)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "family": self.family.to_dict(),
            "property": self.property,
            "p_grid": list(self.p_grid),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "budget": self.budget,
            "coupled": self.coupled,
            "target": self.target,
        }
        for name in ("t", "length", "threshold_trials"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out

    def config_hash(self) -> str:
        # workers never change results, so they stay out of the hash
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SweepConfig:
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise ExperimentError(f"unknown config keys: {sorted(extra)}")
        fam = data.pop("family")
        data["family"] = fam if isinstance(fam, FamilySpec) else FamilySpec.from_dict(fam)
        data["p_grid"] = _grid(data["p_grid"])
        if "base_seed" in data and isinstance(data["base_seed"], str):
            from .random_models import parse_seed

            data["base_seed"] = parse_seed(data["base_seed"])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> SweepConfig:
        return cls.from_dict(json.loads(text))

    def with_(self, **changes) -> SweepConfig:
        return dataclasses.replace(self, **changes)


# ---- statistics ------------------------------------------------------


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(1 - (1 - confidence) / 2)
    phat = successes / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


@dataclasses.dataclass(frozen=True)
class Cell:
    p: float
    trials: int
    success: int
    fail: int
    indeterminate: int

    @property
    def decided(self) -> int:
        return self.success + self.fail

    @property
    def estimate(self) -> float:
        return self.success / self.decided if self.decided else math.nan

    @property
    def usable(self) -> bool:
        return self.indeterminate <= UNUSABLE_FRACTION * self.trials

    def wilson(self, confidence: float = 0.95) -> tuple[float, float]:
        return wilson_interval(self.success, self.decided, confidence)


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6f}"


@dataclasses.dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    cells: tuple[Cell, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for c in self.cells:
            lo, hi = c.wilson()
            out.write(f"{c.p!r},{c.trials},{c.success},{c.fail},{c.indeterminate},{_fmt(c.estimate)},{_fmt(lo)},{_fmt(hi)}\n")
        return out.getvalue()

    def metadata(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "config_hash": self.config.config_hash(),
            "versions": {"hamperturb": __version__, "numpy": np.__version__},
            "unusable_cells": [c.p for c in self.cells if not c.usable],
        }


# ---- per-trial decisions ---------------------------------------------


def _perfect_matching(g: Graph) -> Status:
    # maximum-cardinality matching on the union; an exact test, used as a cheap proxy property
    import networkx as nx

    if g.n % 2:
        return Status.NO
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return Status.YES if 2 * len(nx.max_weight_matching(h, maxcardinality=True)) == g.n else Status.NO


def decide(cfg: SweepConfig, h: Graph) -> Status:
    """Three-valued verdict for one perturbed graph ``h``."""
    prop = cfg.property
    try:
        if prop == "connected":
            return Status.YES if is_connected(h) else Status.NO
        if prop == "hamiltonian":
            return cycles.is_hamiltonian(h, cfg.budget).status
        if prop == "pancyclic":
            rep = cycles.pancyclicity_report(h, cfg.budget)
            if rep.missing:
                return Status.NO
            return Status.UNKNOWN if rep.indeterminate else Status.YES
        if prop == "t-tough":
            return is_t_tough(h, cfg.t, seed=cfg.base_seed).status
        if prop == "circumference":
            res = cycles.circumference(h, cfg.budget)
            if res.length >= cfg.length:
                return Status.YES
            return Status.UNKNOWN if res.status is Status.UNKNOWN else Status.NO
        if prop == "perfect-matching":
            return _perfect_matching(h)
    except CapacityError:
        return Status.UNKNOWN
    raise ExperimentError(f"property {prop!r} is decided structurally, not per graph")


def trial_seed(cfg: SweepConfig, cell: int, trial: int) -> int:
    return mix_seed(cfg.base_seed, trial) if cfg.coupled else mix_seed(cfg.base_seed, cell, trial)


def _run_chunk(args) -> list[int]:
    cfg, g, p, cell, trials = args
    out = []
    for i in trials:
        h = union(g, sample_gnp(g.n, p, trial_seed(cfg, cell, i)))
        out.append(_STATUS_CODE[decide(cfg, h)])
    return out


_STATUS_CODE = {Status.YES: 0, Status.NO: 1, Status.UNKNOWN: 2}


# ---- vectorised structural paths -------------------------------------


def _component_pairs(comps: list[tuple[int, ...]]):
    """All vertex pairs joining different components, with their component indices."""
    us, vs, cu, cv = [], [], [], []
    for a, b in itertools.combinations(range(len(comps)), 2):
        for x in comps[a]:
            for y in comps[b]:
                us.append(x)
                vs.append(y)
                cu.append(a)
                cv.append(b)
    return np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(cu), np.array(cv)


def _uniform_batches(seeds: list[int], us, vs):
    per = max(1, VECTOR_CHUNK // max(1, len(us)))
    for start in range(0, len(seeds), per):
        yield start, pair_uniforms(np.array(seeds[start : start + per], dtype=np.uint64), us, vs)


def _connected_components_of_quotient(k: int, cu, cv) -> bool:
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    groups = k
    for a, b in zip(cu.tolist(), cv.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            groups -= 1
            if groups == 1:
                return True
    return groups == 1


def _structural_outcomes(cfg: SweepConfig, g: Graph, p: float, cell: int) -> list[int] | None:
    """Per-trial codes from crossing pairs only, or ``None`` when no shortcut applies."""
    seeds = [trial_seed(cfg, cell, i) for i in range(cfg.trials)]
    prop, fam = cfg.property, cfg.family
    if prop == "iab-obstruction":
        return _iab_outcomes(fam, p, seeds)
    comps = connected_components(g)
    if prop == "connected" or prop in ("no-crossing-edge", "some-clique-isolated"):
        if prop != "connected" and fam.kind not in CLIQUE_KINDS:
            raise ExperimentError(f"event {prop} needs a disjoint-clique family")
        if len(comps) == 1:
            # a single block is connected and, vacuously, isolated
            return [0] * cfg.trials
        us, vs, cu, cv = _component_pairs(comps)
        out: list[int] = []
        for _, u in _uniform_batches(seeds, us, vs):
            present = u < p
            for row in present:
                a, b = cu[row], cv[row]
                if prop == "connected":
                    ok = _connected_components_of_quotient(len(comps), a, b)
                elif prop == "no-crossing-edge":
                    ok = not row.any()
                else:
                    touched = np.zeros(len(comps), dtype=bool)
                    touched[a] = True
                    touched[b] = True
                    ok = not touched.all()
                out.append(0 if ok else 1)
        return out
    return None


def _iab_outcomes(fam: FamilySpec, p: float, seeds: list[int]) -> list[int]:
    if fam.kind != "IAB":
        raise ExperimentError("event iab-obstruction needs the IAB family")
    rng = blocks(fam)
    I, B = list(rng["I"]), list(rng["B"])
    us = [u for u in I for v in I if u < v] + [u for u in I for _ in B]
    vs = [v for u in I for v in I if u < v] + [v for _ in I for v in B]
    us_a, vs_a = np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)
    index = {v: i for i, v in enumerate(I)}
    ui = np.array([index[u] for u in us])
    vi = np.array([index.get(v, -1) for v in vs])
    in_i = vi >= 0
    half = fam.k // 2
    out = []
    for _, u in _uniform_batches(seeds, us_a, vs_a):
        for row in u < p:
            hit = np.zeros(len(I), dtype=bool)
            hit[ui[row]] = True
            hit[vi[row & in_i]] = True
            out.append(0 if int(hit.sum()) < half else 1)
    return out


def iab_counts(fam: FamilySpec, p: float, seeds: list[int]) -> list[int]:
    """The count r (I-vertices with a random edge into I u B) for each seed."""
    rng = blocks(fam)
    I, B = list(rng["I"]), set(rng["B"])
    out = []
    for s in seeds:
        r = sample_gnp(fam.n, p, s)
        out.append(sum(1 for u in I if any(v in B or (v in rng["I"] and v != u) for v in r.adj[u])))
    return out


# ---- estimation ------------------------------------------------------


def _cell_codes(cfg: SweepConfig, g: Graph, p: float, cell: int, pool) -> list[int]:
    fast = _structural_outcomes(cfg, g, p, cell)
    if fast is not None:
        return fast
    if pool is None:
        return _run_chunk((cfg, g, p, cell, range(cfg.trials)))
    size = max(1, math.ceil(cfg.trials / (4 * cfg.workers)))
    chunks = [(cfg, g, p, cell, range(i, min(i + size, cfg.trials))) for i in range(0, cfg.trials, size)]
    # map preserves chunk order, so the fold is independent of completion order
    return [c for part in pool.map(_run_chunk, chunks) for c in part]


def estimate_probability(cfg: SweepConfig) -> SweepResult:
    g = build_family(cfg.family)
    pool = concurrent.futures.ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        cells = []
        for ci, p in enumerate(cfg.p_grid):
            codes = _cell_codes(cfg, g, p, ci, pool)
            cells.append(Cell(p, cfg.trials, codes.count(0), codes.count(1), codes.count(2)))
    finally:
        if pool:
            pool.shutdown()
    return SweepResult(cfg, tuple(cells))


# ---- closed forms ----------------------------------------------------


def _clique_sizes(fam: FamilySpec) -> list[int]:
    if fam.kind not in CLIQUE_KINDS:
        raise ExperimentError("unavailable")
    return layout(fam).sizes()


def _isolation_union(sizes: list[int], n: int, p: float) -> float:
    """P(some block has no random edge leaving it), by inclusion-exclusion over block types."""
    q = 1.0 - p
    types: dict[int, int] = {}
    for s in sizes:
        types[s] = types.get(s, 0) + 1
    kinds = sorted(types)
    total = 0.0
    for pick in itertools.product(*(range(types[s] + 1) for s in kinds)):
        chosen = sum(pick)
        if chosen == 0:
            continue
        ways = math.prod(math.comb(types[s], c) for s, c in zip(kinds, pick))
        # pairs leaving some chosen block, each pair counted once
        out_pairs = sum(c * s * (n - s) for s, c in zip(kinds, pick))
        inside = sum(c * s for s, c in zip(kinds, pick))
        between_chosen = (inside * inside - sum(c * s * s for s, c in zip(kinds, pick))) // 2
        total += (-1) ** (chosen + 1) * ways * q ** (out_pairs - between_chosen)
    return total


def _blocks_connected(sizes: list[int], p: float) -> float:
    """P(blocks joined by independent random edges form a connected quotient), exact recursion."""
    q = 1.0 - p
    kinds = sorted(set(sizes))
    full = tuple(sizes.count(s) for s in kinds)
    memo: dict[tuple[int, ...], float] = {}

    def cross(a, b) -> int:
        return sum(x * kinds[i] * y * kinds[j] for i, x in enumerate(a) for j, y in enumerate(b))

    def conn(v: tuple[int, ...]) -> float:
        if sum(v) <= 1:
            return 1.0
        if v in memo:
            return memo[v]
        t0 = next(i for i, x in enumerate(v) if x)
        miss = 0.0
        ranges = [range(1, x + 1) if i == t0 else range(x + 1) for i, x in enumerate(v)]
        for u in itertools.product(*ranges):
            if u == v:
                continue
            ways = math.prod(
                math.comb(x - 1, y - 1) if i == t0 else math.comb(x, y) for i, (x, y) in enumerate(zip(v, u))
            )
            rest = tuple(x - y for x, y in zip(v, u))
            miss += ways * conn(u) * q ** cross(u, rest)
        memo[v] = 1.0 - miss
        return memo[v]

    return conn(full)


def iab_obstruction_probability(fam: FamilySpec, p: float, precision: int = 80) -> float:
    """Exact P(r < floor(k/2)) where r counts I-vertices with a random edge into I u B.

    Z = |I| - r counts I-vertices with no such edge. A fixed t-set of I is
    edge-free towards I u B with probability q^(t|B| + t(|I|-t) + C(t,2)),
    and P(Z = z) follows by inclusion-exclusion; decimal arithmetic keeps
    the alternating sums exact enough.
    """
    if fam.kind != "IAB":
        raise ExperimentError("unavailable")
    rng = blocks(fam)
    a, b = len(rng["I"]), len(rng["B"])
    ctx = decimal.Context(prec=precision)
    q = ctx.subtract(decimal.Decimal(1), decimal.Decimal(repr(p)))
    exps = [t * b + t * (a - t) + t * (t - 1) // 2 for t in range(a + 1)]
    # Decimal refuses 0 ** 0, which occurs at p = 1
    free = [ctx.power(q, e) if e else decimal.Decimal(1) for e in exps]
    # S_t = sum over t-sets of P(all isolated)
    s = [ctx.multiply(decimal.Decimal(math.comb(a, t)), free[t]) for t in range(a + 1)]
    half = fam.k // 2
    total = decimal.Decimal(0)
    # r < half  <=>  Z > a - half
    for z in range(a - half + 1, a + 1):
        pz = decimal.Decimal(0)
        for t in range(z, a + 1):
            term = ctx.multiply(decimal.Decimal(math.comb(t, z)), s[t])
            pz = ctx.add(pz, term) if (t - z) % 2 == 0 else ctx.subtract(pz, term)
        total = ctx.add(total, pz)
    return float(total)


def iab_per_vertex_probability(fam: FamilySpec, p: float) -> float:
    """P(a fixed I-vertex has a random edge into I u B) = 1 - (1-p)^(|I u B| - 1)."""
    rng = blocks(fam)
    return 1.0 - (1.0 - p) ** (len(rng["I"]) + len(rng["B"]) - 1)


def closed_form_oracle(family: FamilySpec, p: float, event: str) -> float | str:
    """Exact probability of a structural event of the random part, or ``"unavailable"``.

    Events: ``no-crossing-edge`` (two-block clique families),
    ``some-clique-isolated`` and ``connected`` (disjoint cliques, at most
    20 blocks), ``iab-obstruction`` and ``iab-per-vertex`` (IAB).
    """
    p = check_probability(p)
    try:
        if event in ("iab-obstruction", "iab-per-vertex"):
            if family.kind != "IAB":
                return "unavailable"
            if event == "iab-per-vertex":
                return iab_per_vertex_probability(family, p)
            return iab_obstruction_probability(family, p)
        sizes = _clique_sizes(family)
    except ExperimentError:
        return "unavailable"
    n = family.n
    if event == "no-crossing-edge":
        if len(sizes) != 2:
            return "unavailable"
        return (1.0 - p) ** (sizes[0] * sizes[1])
    if len(sizes) > 20:
        return "unavailable"
    if event == "some-clique-isolated":
        return _isolation_union(sizes, n, p)
    if event == "connected":
        return _blocks_connected(sizes, p)
    return "unavailable"


def closed_form_root(family: FamilySpec, event: str, target: float = 0.5, lo: float = 1e-9, hi: float = 1.0) -> float:
    """p where the closed-form probability of an increasing event crosses ``target``."""
    f = lambda p: closed_form_oracle(family, p, event)  # noqa: E731
    if f(lo) == "unavailable":
        raise ExperimentError("unavailable")
    if not f(lo) < target <= f(hi):
        raise ExperimentError("closed form does not cross the target on the interval")
    while hi / lo > 1 + 1e-9:
        mid = math.sqrt(lo * hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


# ---- thresholds ------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ThresholdEstimate:
    p_star: float
    bracket: tuple[float, float]
    estimates: tuple[float, float]
    probes: tuple[tuple[float, float], ...]
    method: str = "bisection"

    def to_dict(self) -> dict[str, Any]:
        return {
            "p_star": self.p_star,
            "bracket": list(self.bracket),
            "estimates": list(self.estimates),
            "probes": [list(x) for x in self.probes],
            "method": self.method,
        }


def _probe(cfg: SweepConfig, p: float) -> float:
    trials = cfg.threshold_trials or cfg.trials
    res = estimate_probability(cfg.with_(p_grid=(p,), trials=trials))
    cell = res.cells[0]
    if not cell.usable:
        raise ExperimentError(f"probe at p={p!r} has {cell.indeterminate} indeterminate trials")
    return cell.estimate


def find_threshold(cfg: SweepConfig, target: float | None = None, ratio: float = 1.1) -> ThresholdEstimate:
    """Geometric bisection on p between the ends of the grid until ``p_hi / p_lo <= ratio``.

    Every probe reuses the same coupled trial seeds, so the estimates are
    monotone in p and the bracket stays valid.
    """
    target = cfg.target if target is None else target
    lo, hi = cfg.p_grid[0], cfg.p_grid[-1]
    if lo <= 0:
        lo = min(hi, 1e-9)
    f_lo, f_hi = _probe(cfg, lo), _probe(cfg, hi)
    probes = [(lo, f_lo), (hi, f_hi)]
    if not f_lo < target <= f_hi:
        raise ExperimentError(f"p grid does not bracket {target}: estimates {f_lo:.4f} at {lo!r}, {f_hi:.4f} at {hi!r}")
    while hi / lo > ratio:
        mid = math.sqrt(lo * hi)
        f = _probe(cfg, mid)
        probes.append((mid, f))
        if f < target:
            lo, f_lo = mid, f
        else:
            hi, f_hi = mid, f
    return ThresholdEstimate(math.sqrt(lo * hi), (lo, hi), (f_lo, f_hi), tuple(probes))


def predicted_form(fam: FamilySpec) -> tuple[str, float]:
    """The asymptotic threshold shape matching a family, up to its constant."""
    n = fam.n
    sizes = layout(fam).sizes()
    if fam.kind == "CliqueForest":
        return "log k / (d n)", math.log(fam.k) / (fam.d * n)
    if fam.kind == "ToughnessCliques":
        return "log n / (n k)", math.log(n) / (n * fam.k)
    if fam.kind in ("TwoCliques", "BalancedCliques"):
        delta = (min(sizes) - 1) / n
        return "log(1/delta) / (delta n^2)", math.log(1 / delta) / (delta * n * n)
    from .families import predicted_properties

    alpha = predicted_properties(fam).independence_number
    return "alpha / n^2", alpha / (n * n)


def scaling_report(base: SweepConfig, axis: str, values) -> dict[str, Any]:
    """Threshold at each value of one family parameter, against the predicted form."""
    rows = []
    for v in values:
        fam = base.family.with_(**{axis: v})
        est = find_threshold(base.with_(family=fam))
        form, pred = predicted_form(fam)
        rows.append({axis: v, "p_star": est.p_star, "bracket": list(est.bracket), "form": form,
                     "predicted": pred, "ratio": est.p_star / pred})
    ratios = [r["ratio"] for r in rows]
    return {"axis": axis, "rows": rows, "spread": max(ratios) / min(ratios)}
