"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as a script
(``python3 tests/test_acceptance.py``) to see the summary lines.
"""

import math
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from hamperturb.certificates import verify_certificate  # noqa: E402
from hamperturb.checkers import cycles  # noqa: E402
from hamperturb.checkers.connectivity import vertex_connectivity  # noqa: E402
from hamperturb.checkers.structure import independence_number, toughness  # noqa: E402
from hamperturb.decompose import partition_lemma29, spanning_path_system  # noqa: E402
from hamperturb.experiments import (  # noqa: E402
    SweepConfig,
    closed_form_oracle,
    closed_form_root,
    estimate_probability,
    find_threshold,
)
from hamperturb.families import FamilySpec, blocks, build_family, layout  # noqa: E402
from hamperturb.graph import Graph, complete_bipartite, disjoint_union, union  # noqa: E402
from hamperturb.pipelines import (  # noqa: E402
    PipelineConfig,
    hamiltonicity_pipeline_thm1,
    hamiltonicity_pipeline_thm2,
    long_cycle_pipeline_thm4,
)
from hamperturb.random_models import mix_seed, sample_gnp  # noqa: E402

RESULTS: dict[int, str] = {}


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str, started: float) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{time.perf_counter() - started:.1f}s]"
        RESULTS[number] = line
        with capsys.disabled():
            print("\n" + line)

    return emit


def sweep(family, prop, grid, trials, seed=0):
    return SweepConfig(family=family, property=prop, p_grid=tuple(grid), trials=trials, base_seed=seed)


# ---- 1 -------------------------------------------------------------------


def test_criterion_01_oracle_equivalence(report):
    t0 = time.perf_counter()
    corpus = oracles.corpus(500, seed=1, n_lo=3)
    bad = {"hamiltonian": 0, "circumference": 0, "alpha": 0, "kappa": 0, "toughness": 0}
    for g in corpus:
        bad["hamiltonian"] += cycles.is_hamiltonian(g).yes != oracles.hamiltonian(g)
        bad["circumference"] += cycles.circumference(g).length != oracles.circumference(g)
        bad["alpha"] += independence_number(g)[0] != oracles.alpha(g)
        bad["kappa"] += vertex_connectivity(g)[0] != oracles.kappa(g)
        expected = oracles.toughness(g)
        bad["toughness"] += toughness(g).toughness != (math.inf if expected is None else expected)
    elapsed = time.perf_counter() - t0
    ok = not any(bad.values()) and elapsed < 120
    report(1, ok, f"500 graphs 3<=n<=8, disagreements {bad}", t0)
    assert ok


# ---- 2 -------------------------------------------------------------------


def _is_balanced_complete_bipartite(g: Graph) -> bool:
    n = g.n
    if n % 2 or g.m != n * n // 4:
        return False
    side = {0}
    side |= {u for u in range(n) if u not in g.adj[0] and u != 0}
    return len(side) == n // 2 and all(not (set(g.adj[v]) & side) for v in side)


def test_criterion_02_classical_sanity(report):
    t0 = time.perf_counter()
    rng = random.Random(2)
    graphs = [oracles.dirac_graph(rng, rng.randint(3, 14)) for _ in range(194)]
    # the extremal exception itself must be recognised, so include it explicitly
    graphs += [complete_bipartite(h, h) for h in (2, 3, 4, 5, 6, 7)]
    exceptions = 0
    bipartite_seen = 0
    for g in graphs:
        assert min(len(a) for a in g.adj) >= g.n / 2
        if not cycles.is_hamiltonian(g).yes:
            exceptions += 1
            continue
        rep = cycles.pancyclicity_report(g)
        if _is_balanced_complete_bipartite(g):
            bipartite_seen += 1
            exceptions += rep.is_pancyclic  # K_{h,h} has no odd cycles
        elif not rep.is_pancyclic:
            exceptions += 1
    tough_bad = 0
    hamiltonian_count = 0
    for g in oracles.corpus(500, seed=1, n_lo=3):
        if cycles.is_hamiltonian(g).yes:
            hamiltonian_count += 1
            tough_bad += toughness(g).toughness < 1
    ok = exceptions == 0 and tough_bad == 0
    report(2, ok, f"200 Dirac graphs ({bipartite_seen} balanced bipartite), exceptions {exceptions}; "
                  f"{hamiltonian_count} Hamiltonian corpus graphs, {tough_bad} below 1-tough", t0)
    assert ok


# ---- 3 -------------------------------------------------------------------


def test_criterion_03_no_crossing_edge(report):
    t0 = time.perf_counter()
    fam = FamilySpec("TwoCliques", 40)
    cell = estimate_probability(sweep(fam, "no-crossing-edge", [1 / 400], 20000, seed=3)).cells[0]
    exact = closed_form_oracle(fam, 1 / 400, "no-crossing-edge")
    stated = 0.36769
    ok = abs(cell.estimate - stated) <= 0.015 and abs(cell.estimate - exact) <= 0.015
    ok = ok and time.perf_counter() - t0 < 60
    report(3, ok, f"estimate {cell.estimate:.5f}, stated {stated}, exact {exact:.6f}", t0)
    assert ok


# ---- 4 -------------------------------------------------------------------


def test_criterion_04_isolation(report):
    t0 = time.perf_counter()
    fam = FamilySpec("CliqueForest", 60, d=5, k=10)
    grid = [0.005, 0.01, 0.02]
    res = estimate_probability(sweep(fam, "some-clique-isolated", grid, 10000, seed=4))
    parts, ok = [], True
    for cell in res.cells:
        exact = closed_form_oracle(fam, cell.p, "some-clique-isolated")
        lo, hi = cell.wilson(0.999)
        ok &= lo <= exact <= hi
        parts.append(f"p={cell.p}: {cell.estimate:.4f} vs {exact:.4f}")
    report(4, ok, "; ".join(parts), t0)
    assert ok


# ---- 5 -------------------------------------------------------------------


def test_criterion_05_threshold_scaling(report):
    t0 = time.perf_counter()
    stars, roots = [], []
    for k in (8, 16):
        fam = FamilySpec("CliqueForest", 120, d=5, k=k)
        est = find_threshold(sweep(fam, "connected", [1e-4, 0.05], 4000, seed=5))
        stars.append(est.p_star)
        roots.append(closed_form_root(fam, "connected"))
    ratio = stars[1] / stars[0]
    predicted = math.log(16) / math.log(8)
    closed_ratio = roots[1] / roots[0]
    ok = 1 / 1.3 <= ratio / predicted <= 1.3 and time.perf_counter() - t0 < 600
    report(5, ok, f"p* {stars[0]:.6f} (k=8), {stars[1]:.6f} (k=16); ratio {ratio:.3f} vs log16/log8 "
                  f"{predicted:.3f}; closed-form ratio {closed_ratio:.3f}", t0)
    assert ok


# ---- 6 -------------------------------------------------------------------


def _lemma29_instances(count: int, seed: int):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        kind = rng.choice(["TwoCliques", "BalancedCliques", "CliqueForest", "MCliques", "ToughnessCliques"])
        n = rng.randint(20, 120)
        params = {
            "TwoCliques": {},
            "BalancedCliques": {"delta": rng.choice([0.1, 0.15, 0.2])},
            "CliqueForest": {"d": rng.randint(3, 9), "k": rng.randint(2, 6)},
            "MCliques": {"m": rng.randint(2, 5)},
            "ToughnessCliques": {"k": rng.randint(2, 5), "c": 1.5},
        }[kind]
        spec = FamilySpec(kind, n, **params)
        try:
            g = build_family(spec)
        except ValueError:
            continue
        # sparse seeded noise; adding edges never raises alpha, so the block count stays a valid bound
        r = sample_gnp(n, rng.choice([0.0, 0.005, 0.02]), mix_seed(seed, len(out)))
        out.append((spec, union(g, r), len(layout(spec).sizes())))
    return out


def test_criterion_06_partition_conclusions(report):
    t0 = time.perf_counter()
    successes = refusals = violations = unnamed = 0
    for spec, g, alpha_bound in _lemma29_instances(50, seed=6):
        res = partition_lemma29(g, alpha_bound=alpha_bound)
        if res.refusal is None:
            successes += 1
            violations += not all(res.checks.values()) or len(res.checks) != 5
        else:
            refusals += 1
            unnamed += res.stuck_vertex is None or str(res.stuck_vertex) not in res.refusal
    ok = violations == 0 and unnamed == 0 and successes > 0
    report(6, ok, f"50 instances: {successes} successes ({violations} with a failed conclusion), "
                  f"{refusals} refusals ({unnamed} without a stuck vertex)", t0)
    assert ok


# ---- 7 -------------------------------------------------------------------


def test_criterion_07_spanning_linkage(report):
    t0 = time.perf_counter()
    verified = 0
    for run in range(100):
        rng = random.Random(mix_seed(7, run))
        perm = list(range(20))
        rng.shuffle(perm)
        matching = {frozenset(perm[i : i + 2]) for i in range(0, 20, 2)}
        g = Graph.from_edges(20, [(u, v) for u in range(20) for v in range(u + 1, 20) if frozenset((u, v)) not in matching])
        ends = rng.sample(range(20), 6)
        pairs = list(zip(ends[::2], ends[1::2]))
        res = spanning_path_system(g, pairs, seed=run)
        if res.yes and verify_certificate(g, res.witness, spanning=True):
            covered = sorted(v for p in res.witness.paths for v in p)
            ends_ok = all(p[0] == x and p[-1] == y for p, (x, y) in zip(res.witness.paths, pairs))
            verified += covered == list(range(20)) and ends_ok
    ok = verified == 100
    report(7, ok, f"K_20 minus a perfect matching, r=3: {verified}/100 verified spanning systems", t0)
    assert ok


# ---- 8 -------------------------------------------------------------------


def test_criterion_08_hamiltonicity_pipelines(report):
    t0 = time.perf_counter()
    three = disjoint_union(*[Graph.complete(20)] * 3)
    forest = build_family(FamilySpec("CliqueForest", 60, d=19, k=3))
    counts = {}
    unconfirmed = 0
    for name, g, p, pipeline in (("thm1", three, 0.02, hamiltonicity_pipeline_thm1),
                                 ("thm2", forest, 0.03, hamiltonicity_pipeline_thm2)):
        hits = 0
        for seed in range(100):
            r = sample_gnp(60, p, mix_seed(8, seed))
            trace = pipeline(g, r, PipelineConfig(seed=seed))
            if not trace.ok:
                continue
            h = union(g, r)
            if verify_certificate(h, trace.certificate, spanning=True) and cycles.is_hamiltonian(h).yes:
                hits += 1
            else:
                unconfirmed += 1
        counts[name] = hits
    ok = min(counts.values()) >= 90 and unconfirmed == 0
    report(8, ok, f"verified Hamilton cycles thm1 {counts['thm1']}/100, thm2 {counts['thm2']}/100, "
                  f"{unconfirmed} successes not confirmed", t0)
    assert ok


# ---- 9 -------------------------------------------------------------------


def test_criterion_09_long_cycles(report):
    t0 = time.perf_counter()
    g = build_family(FamilySpec("MCliques", 60, m=4))
    p = 64 * 4 / 60**2
    hits = accounting_bad = 0
    lengths = []
    for seed in range(100):
        r = sample_gnp(60, p, mix_seed(9, seed))
        trace = long_cycle_pipeline_thm4(g, r, epsilon=0.25, cfg=PipelineConfig(seed=seed, check_pancyclic=False))
        if not trace.ok:
            continue
        acc = trace.summary["accounting"]
        length = len(trace.certificate.vertices)
        accounting_bad += not acc["holds"] or acc["cycle_length"] != length
        if length >= 45 and verify_certificate(union(g, r), trace.certificate):
            hits += 1
            lengths.append(length)
    ok = hits >= 80 and accounting_bad == 0
    detail = f"{hits}/100 verified cycles of length >= 45"
    if lengths:
        detail += f" (min {min(lengths)}, max {max(lengths)})"
    report(9, ok, detail + f"; accounting failures {accounting_bad}", t0)
    assert ok


# ---- 10 ------------------------------------------------------------------


def test_criterion_10_iab_obstruction(report):
    t0 = time.perf_counter()
    fam = FamilySpec("IAB", 2000, k=100)
    p = 1 / (3 * 2000)
    cell = estimate_probability(sweep(fam, "iab-obstruction", [p], 1000, seed=10)).cells[0]
    exact = closed_form_oracle(fam, p, "iab-obstruction")
    q = closed_form_oracle(fam, p, "iab-per-vertex")
    size_i = len(blocks(fam)["I"])
    half = fam.k // 2
    # binomial tail treating the I-vertices as independent, each hit with probability q
    tail = sum(math.comb(size_i, j) * q**j * (1 - q) ** (size_i - j) for j in range(half))
    elapsed = time.perf_counter() - t0
    ok = cell.estimate >= 0.99 and exact >= 0.99 and tail >= 0.99 and elapsed < 120
    report(10, ok, f"estimate {cell.estimate:.4f}, exact {exact:.8f}, binomial tail {tail:.8f}, "
                   f"per-vertex q {q:.5f}", t0)
    assert ok


# ---- 11 ------------------------------------------------------------------


def test_criterion_11_reproducibility(report):
    t0 = time.perf_counter()
    same = []
    fam = FamilySpec("CliqueForest", 60, d=5, k=10)
    cfg = sweep(fam, "some-clique-isolated", [0.005, 0.01, 0.02], 2000, seed=11)
    same.append(estimate_probability(cfg).to_csv() == estimate_probability(cfg).to_csv())
    ham = sweep(FamilySpec("TwoCliques", 14), "hamiltonian", [0.01, 0.05, 0.2], 40, seed=11)
    same.append(estimate_probability(ham).to_csv() == estimate_probability(ham.with_(workers=2)).to_csv())
    three = disjoint_union(*[Graph.complete(20)] * 3)
    for pipeline in (hamiltonicity_pipeline_thm1, hamiltonicity_pipeline_thm2, long_cycle_pipeline_thm4):
        r = sample_gnp(60, 0.02, 11)
        same.append(pipeline(three, r, cfg=PipelineConfig(seed=11)).to_json()
                    == pipeline(three, r, cfg=PipelineConfig(seed=11)).to_json())
    est = sweep(FamilySpec("TwoCliques", 40), "connected", [1e-4, 0.02], 1000, seed=11)
    same.append(find_threshold(est).to_dict() == find_threshold(est).to_dict())
    ok = all(same)
    report(11, ok, f"{sum(same)}/{len(same)} artifacts byte-identical on rerun", t0)
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
