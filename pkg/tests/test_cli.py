import json
import subprocess
import sys

import pytest

from hamperturb.certificates import CycleCertificate, verify_certificate
from hamperturb.cli import run
from hamperturb.families import FamilySpec, build_family
from hamperturb.graph import cycle_graph, disjoint_union, Graph, petersen_graph, read_graph, write_graph


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, g in (("c5", cycle_graph(5)), ("petersen", petersen_graph()),
                    ("three", disjoint_union(*[Graph.complete(20)] * 3))):
        paths[name] = str(tmp_path / f"{name}.graph")
        write_graph(g, paths[name])
    return paths


def test_hamiltonian_cycle_printed(files, capsys):
    assert run(["check", "--property", "hamiltonian", "--in", files["c5"]]) == 0
    out = capsys.readouterr().out.split()
    assert verify_certificate(cycle_graph(5), CycleCertificate(tuple(map(int, out))), spanning=True)


def test_petersen_is_not_hamiltonian(files, capsys):
    assert run(["check", "--property", "hamiltonian", "--in", files["petersen"]]) == 1


def test_generate_then_alpha(tmp_path, capsys):
    out = str(tmp_path / "g.graph")
    assert run(["generate", "--family", "TwoCliques", "--n", "9", "--out", out]) == 0
    capsys.readouterr()
    assert run(["check", "--property", "alpha", "--in", out]) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_usage_errors_exit_64(files, capsys):
    assert run(["check", "--property", "hamiltonian", "--in", files["c5"], "--bogus"]) == 64
    assert "usage" in capsys.readouterr().err
    assert run(["frobnicate"]) == 64
    assert run(["check", "--property", "k-connected", "--in", files["c5"]]) == 64
    assert run(["generate", "--family", "IAB", "--n", "5", "--k", "4", "--out", "x"]) == 64
    assert run(["check", "--property", "alpha", "--in", "/nonexistent/file"]) == 64


def test_generate_round_trip(tmp_path, capsys):
    a, b = tmp_path / "a.graph", tmp_path / "b.graph"
    assert run(["generate", "--family", "CliqueForest", "--n", "20", "--d", "3", "--k", "4", "--out", str(a)]) == 0
    g = read_graph(a)
    assert g == build_family(FamilySpec("CliqueForest", 20, d=3, k=4))
    write_graph(g, b)
    assert a.read_bytes() == b.read_bytes()


def test_perturb_is_seeded(files, tmp_path, capsys):
    outs = []
    for i, seed in enumerate(["7", "0x7", "8"]):
        path = tmp_path / f"p{i}.graph"
        assert run(["perturb", "--in", files["petersen"], "--p", "0.3", "--seed", seed, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] != outs[2]


def test_manifest_contents(files, tmp_path, capsys):
    man = tmp_path / "m.json"
    run(["check", "--property", "connectivity", "--in", files["petersen"], "--seed", "0x2a", "--manifest", str(man)])
    record = json.loads(man.read_text())
    assert record["seed"] == "0x000000000000002a" and record["command"] == "check"
    assert set(record["versions"]) >= {"hamperturb", "numpy"}
    # without --manifest it lands on stderr
    run(["check", "--property", "connectivity", "--in", files["petersen"]])
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["command"] == "check"


@pytest.mark.parametrize("prop,extra,code,text", [
    ("connectivity", [], 0, "3"),
    ("toughness", [], 0, "4/3"),
    ("t-tough", ["--t", "1"], 0, "yes"),
    ("k-connected", ["--k", "4"], 1, "false"),
    ("circumference", [], 0, "9"),
    ("hamilton-connected", [], 1, "no"),
])
def test_check_properties_on_petersen(files, capsys, prop, extra, code, text):
    assert run(["check", "--property", prop, "--in", files["petersen"], *extra]) == code
    assert capsys.readouterr().out.split()[0] == text


def test_decompose_json(files, capsys):
    assert run(["decompose", "--method", "bfkm", "--in", files["three"]]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["blocks"] == [list(range(i, i + 20)) for i in (0, 20, 40)]
    assert res["per_block_connectivity"] == [19, 19, 19]
    assert run(["decompose", "--method", "bisect", "--in", files["c5"]]) == 1


def test_construct_reproducible(files, capsys):
    argv = ["construct", "--pipeline", "thm1", "--graph", files["three"], "--p", "0.02", "--seed", "3",
            "--format", "json"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    trace = json.loads(first)
    assert trace["status"] == "yes" and len(trace["certificate"]) == 60
    assert run(["construct", "--pipeline", "thm3", "--graph", files["petersen"], "--p", "0"]) == 0


def test_sweep_threshold_scaling(tmp_path, capsys):
    conf = tmp_path / "sweep.json"
    conf.write_text(json.dumps({
        "family": {"kind": "TwoCliques", "n": 40},
        "property": "connected",
        "p_grid": [0.0001, 0.02],
        "trials": 400,
        "base_seed": 1,
    }))
    for out in ("o1", "o2"):
        assert run(["sweep", "--config", str(conf), "--out", str(tmp_path / out), "--seed", "5"]) == 0
    a, b = (tmp_path / "o1" / "sweep.csv").read_bytes(), (tmp_path / "o2" / "sweep.csv").read_bytes()
    assert a == b and a.startswith(b"p,trials,success,fail,indeterminate,estimate,wilson_lo,wilson_hi")
    assert json.loads((tmp_path / "o1" / "manifest.json").read_text())["seed"] == "0x0000000000000005"
    capsys.readouterr()
    assert run(["threshold", "--config", str(conf), "--format", "json"]) == 0
    est = json.loads(capsys.readouterr().out)
    assert est["bracket"][1] / est["bracket"][0] <= 1.1
    assert run(["scaling", "--config", str(conf), "--axis", "n=40", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "n,p_star,predicted,ratio"
    assert run(["scaling", "--config", str(conf), "--axis", "n"]) == 64


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "hamperturb.cli", "check", "--property", "alpha", "--in", files["c5"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "2"
