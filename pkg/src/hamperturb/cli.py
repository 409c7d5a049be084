"""Command-line entry point.

Exit codes: 0 success or property true, 1 property false or a staged
failure, 2 indeterminate or over capacity, 64 usage or input error.
Every run writes a JSON manifest (inputs, seed, versions, config hash)
to ``--manifest`` or, failing that, as one line on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import CapacityError, Decision, Status
from .checkers import cycles
from .checkers.connectivity import is_k_connected, vertex_connectivity
from .checkers.structure import expander_check, independence_number, is_t_tough, toughness
from .decompose import connectivity_bisection, partition_bfkm, partition_lemma29
from .experiments import ExperimentError, SweepConfig, estimate_probability, find_threshold, scaling_report
from .families import KINDS, FamilySpec, build_family, predicted_properties
from .graph import GraphInputError, format_graph, read_graph, union
from .pipelines import PipelineConfig, run_pipeline, toughness_experiment_thm3
from .random_models import parse_seed, sample_gnp

EXIT_USAGE = 64
CHECKS = (
    "hamiltonian",
    "hamilton-connected",
    "pancyclic",
    "circumference",
    "alpha",
    "connectivity",
    "k-connected",
    "toughness",
    "t-tough",
    "expander",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_help()}\n{self.prog}: error: {message}")


def _seed(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, help="decimal or 0x-prefixed hex (default 0; for sweeps it overrides base_seed)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--manifest", help="write the run manifest here instead of stderr")

    top = _Parser(prog="hamperturb", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="build a family graph")
    g.add_argument("--family", required=True, choices=KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--delta", type=float)
    g.add_argument("--d", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--c", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--out", required=True)

    p = sub.add_parser("perturb", parents=[common], help="union with a seeded G(n,p)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--random-out", help="also write the random graph alone")

    c = sub.add_parser("check", parents=[common], help="decide a property exactly")
    c.add_argument("--property", required=True, choices=CHECKS)
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--k", type=int, help="k-connected, expander set size")
    c.add_argument("--t", type=_fraction, help="t-tough threshold")
    c.add_argument("--d", type=float, help="expander ratio")
    c.add_argument("--budget", type=int, default=cycles.DEFAULT_BUDGET)

    d = sub.add_parser("decompose", parents=[common], help="partition into highly connected blocks")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--method", choices=("bfkm", "lemma29", "bisect"), default="lemma29")
    d.add_argument("--alpha-bound", type=int)

    k = sub.add_parser("construct", parents=[common], help="run a constructive pipeline")
    k.add_argument("--pipeline", required=True, choices=("thm1", "thm2", "thm3", "thm4"))
    k.add_argument("--graph", required=True)
    k.add_argument("--p", type=float, required=True)
    k.add_argument("--epsilon", type=float, default=0.25)
    k.add_argument("--alpha-bound", type=int)
    k.add_argument("--t", type=_fraction, default=Fraction(1), help="toughness target for thm3")
    k.add_argument("--edge-source", choices=("union", "random"), default="union")
    k.add_argument("--budget", type=int, default=200_000)

    for name, helptext in (("sweep", "Monte Carlo sweep over a p grid"), ("threshold", "bisect for the 1/2 crossing"),
                           ("scaling", "thresholds along one parameter")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--config", required=True)
        s.add_argument("--workers", type=int, default=1)
        if name == "sweep":
            s.add_argument("--out", required=True, help="output directory")
        if name == "scaling":
            s.add_argument("--axis", required=True, help="e.g. k=8,16,32")
    return top


# ---- output helpers ----------------------------------------------------


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.format == "json" or text is None:
        print(json.dumps(payload, sort_keys=True, default=str))
    else:
        print(text)


def _manifest(args, inputs: dict, config_hash: str | None = None) -> None:
    record = {
        "command": args.command,
        "inputs": inputs,
        "seed": f"0x{args.seed:016x}",
        "versions": {"hamperturb": __version__, "numpy": np.__version__},
        "config_hash": config_hash,
    }
    line = json.dumps(record, sort_keys=True, default=str)
    if args.manifest:
        Path(args.manifest).write_text(line + "\n")
    else:
        print(line, file=sys.stderr)


def _file_hash(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _decision_exit(res: Decision) -> int:
    return res.status.exit_code


def _witness(res: Decision):
    w = res.witness
    if w is None:
        return None
    if hasattr(w, "vertices"):
        return list(w.vertices)
    if hasattr(w, "paths"):
        return [list(p) for p in w.paths]
    return w


# ---- subcommands -------------------------------------------------------


def cmd_generate(args) -> int:
    spec = FamilySpec(args.family, args.n, args.delta, args.d, args.k, args.c, args.m)
    spec = FamilySpec.from_dict(spec.to_dict())  # drop parameters the kind ignores
    g = build_family(spec)
    Path(args.out).write_text(format_graph(g))
    pred = predicted_properties(spec)
    payload = {"family": spec.to_dict(), "n": g.n, "m": g.m, "predicted": pred.__dict__}
    _emit(args, payload, f"wrote {args.out}: n={g.n} m={g.m} min_degree={pred.min_degree} "
                         f"alpha={pred.independence_number} components={pred.component_count}")
    _manifest(args, {"family": spec.to_dict()}, hashlib.sha256(spec.to_json().encode()).hexdigest()[:16])
    return 0


def cmd_perturb(args) -> int:
    g = read_graph(args.input)
    r = sample_gnp(g.n, args.p, args.seed)
    h = union(g, r)
    Path(args.out).write_text(format_graph(h))
    if args.random_out:
        Path(args.random_out).write_text(format_graph(r))
    _emit(args, {"n": h.n, "m": h.m, "random_edges": r.m}, f"wrote {args.out}: m={h.m} ({r.m} random edges)")
    _manifest(args, {"graph": _file_hash(args.input), "p": args.p})
    return 0


def _check(args, g) -> tuple[int, dict, str]:
    prop = args.property
    if prop == "hamiltonian":
        res = cycles.is_hamiltonian(g, args.budget)
        return _decision_exit(res), {"status": res.status.value, "cycle": _witness(res), "reason": res.reason}, \
            " ".join(map(str, _witness(res))) if res.yes else f"{res.status.value}: {res.reason}"
    if prop == "hamilton-connected":
        res = cycles.is_hamilton_connected(g, args.budget)
        pair = res.detail.get("pair")
        return _decision_exit(res), {"status": res.status.value, "pair": pair}, \
            res.status.value + (f" (pair {pair[0]} {pair[1]})" if pair else "")
    if prop == "pancyclic":
        rep = cycles.pancyclicity_report(g, args.budget)
        code = 0 if rep.is_pancyclic else (1 if rep.missing else 2)
        payload = {"pancyclic": rep.is_pancyclic, "missing": sorted(rep.missing), "indeterminate": sorted(rep.indeterminate)}
        return code, payload, f"pancyclic={rep.is_pancyclic} missing={sorted(rep.missing)}"
    if prop == "circumference":
        res = cycles.circumference(g, args.budget)
        payload = {"circumference": res.length, "status": res.status.value,
                   "cycle": list(res.witness.vertices) if res.witness else None}
        return res.status.exit_code, payload, str(res.length)
    if prop == "alpha":
        alpha, witness = independence_number(g)
        return 0, {"alpha": alpha, "witness": list(witness)}, str(alpha)
    if prop == "connectivity":
        kappa, cut = vertex_connectivity(g)
        return 0, {"connectivity": kappa, "cut": cut}, str(kappa)
    if prop == "k-connected":
        if args.k is None:
            raise UsageError("check --property k-connected needs --k")
        ok = is_k_connected(g, args.k)
        return (0 if ok else 1), {"k_connected": ok, "k": args.k}, str(ok).lower()
    if prop == "toughness":
        rep = toughness(g)
        value = "inf" if rep.witness_set is None else str(rep.toughness)
        return 0, {"toughness": value, "witness_set": rep.witness_set, "components": rep.components}, value
    if prop == "t-tough":
        if args.t is None:
            raise UsageError("check --property t-tough needs --t")
        res = is_t_tough(g, args.t, seed=args.seed)
        return _decision_exit(res), {"status": res.status.value, **res.detail}, res.status.value
    if prop == "expander":
        if args.k is None or args.d is None:
            raise UsageError("check --property expander needs --k and --d")
        res = expander_check(g, args.k, args.d)
        return _decision_exit(res), {"status": res.status.value, **res.detail}, res.status.value
    raise AssertionError(prop)


def cmd_check(args) -> int:
    g = read_graph(args.input)
    code, payload, text = _check(args, g)
    payload["property"] = args.property
    _emit(args, payload, text)
    _manifest(args, {"graph": _file_hash(args.input), "property": args.property})
    return code


def cmd_decompose(args) -> int:
    g = read_graph(args.input)
    if args.method == "bisect":
        bis = connectivity_bisection(g, seed=args.seed)
        payload = {"ok": bis.ok, "s1": list(bis.s1 or ()), "s2": list(bis.s2 or ()), "attempts": bis.attempts}
        code = 0 if bis.ok else 1
    else:
        res = partition_bfkm(g) if args.method == "bfkm" else partition_lemma29(g, args.alpha_bound)
        payload = res.to_dict()
        code = 0 if res.ok else 1
    _emit(args, payload)
    _manifest(args, {"graph": _file_hash(args.input), "method": args.method})
    return code


def cmd_construct(args) -> int:
    g = read_graph(args.graph)
    r = sample_gnp(g.n, args.p, args.seed)
    inputs = {"graph": _file_hash(args.graph), "p": args.p, "pipeline": args.pipeline}
    if args.pipeline == "thm3":
        res = toughness_experiment_thm3(g, r, args.t, seed=args.seed)
        _emit(args, {"pipeline": "thm3", "status": res.status.value, "t": str(args.t), **res.detail}, res.status.value)
        _manifest(args, inputs)
        return res.status.exit_code
    cfg = PipelineConfig(
        epsilon=args.epsilon,
        alpha_bound=args.alpha_bound,
        seed=args.seed,
        edge_source=args.edge_source,
        budget=args.budget,
    )
    trace = run_pipeline(args.pipeline, g, r, cfg)
    if args.format == "json" or not trace.certificate:
        print(trace.to_json())
    else:
        print(" ".join(map(str, trace.certificate.vertices)))
    _manifest(args, inputs)
    if trace.ok:
        return 0
    return Status.UNKNOWN.exit_code if trace.status is Status.UNKNOWN else 1


def _load_config(args) -> SweepConfig:
    cfg = SweepConfig.from_json(Path(args.config).read_text())
    if args.seed is None:
        args.seed = cfg.base_seed
    return cfg.with_(workers=args.workers, base_seed=args.seed)


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    res = estimate_probability(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(res.to_csv())
    (out / "metadata.json").write_text(json.dumps(res.metadata(), sort_keys=True, indent=2) + "\n")
    if args.format == "csv":
        sys.stdout.write(res.to_csv())
    else:
        _emit(args, res.metadata(), f"wrote {out / 'sweep.csv'} ({len(res.cells)} cells)")
    if not args.manifest:
        args.manifest = str(out / "manifest.json")
    _manifest(args, {"config": cfg.to_dict()}, cfg.config_hash())
    return 0 if all(c.usable for c in res.cells) else 2


def cmd_threshold(args) -> int:
    cfg = _load_config(args)
    est = find_threshold(cfg)
    _emit(args, est.to_dict(), f"p* = {est.p_star:.6g} in [{est.bracket[0]:.6g}, {est.bracket[1]:.6g}]")
    _manifest(args, {"config": cfg.to_dict()}, cfg.config_hash())
    return 0


def _axis(text: str) -> tuple[str, list]:
    name, _, values = text.partition("=")
    if not name or not values:
        raise UsageError(f"--axis must look like k=8,16,32, got {text!r}")
    try:
        parsed = [int(v) if v.strip().lstrip("-").isdigit() else float(v) for v in values.split(",")]
    except ValueError:
        raise UsageError(f"non-numeric axis value in {text!r}") from None
    return name.strip(), parsed


def cmd_scaling(args) -> int:
    cfg = _load_config(args)
    name, values = _axis(args.axis)
    report = scaling_report(cfg, name, values)
    if args.format == "csv":
        print(f"{name},p_star,predicted,ratio")
        for row in report["rows"]:
            print(f"{row[name]},{row['p_star']!r},{row['predicted']!r},{row['ratio']!r}")
    else:
        lines = [f"{name}={row[name]}  p*={row['p_star']:.6g}  {row['form']}={row['predicted']:.6g}  ratio={row['ratio']:.4g}"
                 for row in report["rows"]]
        _emit(args, report, "\n".join(lines + [f"spread {report['spread']:.4g}"]))
    _manifest(args, {"config": cfg.to_dict(), "axis": args.axis}, cfg.config_hash())
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "perturb": cmd_perturb,
    "check": cmd_check,
    "decompose": cmd_decompose,
    "construct": cmd_construct,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
    "scaling": cmd_scaling,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command not in ("sweep", "threshold", "scaling") and args.seed is None:
            args.seed = 0
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (GraphInputError, ExperimentError, ValueError, KeyError, OSError) as exc:
        print(f"hamperturb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"hamperturb: over capacity: {exc}", file=sys.stderr)
        return Status.UNKNOWN.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
