import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from trspec.cli import main
from trspec.linalg import eigenvalues

from conftest import HYPERBOLIC_MODEL, TURING_MODEL
from oracles import matching_distance


def write_model(path, B, v, L=1.0):
    path.write_text(json.dumps({"d": 1, "N": len(v), "L": L,
                                "velocities": [[x] for x in v], "B": B}))
    return str(path)


@pytest.fixture
def turing(tmp_path):
    return write_model(tmp_path / "turing.json", *TURING_MODEL)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_spectrum(tmp_path):
    model = write_model(tmp_path / "m.json", [[-2, 3], [-1, -1]], [0.5, -0.1])
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--model", model, "--kmax", "3", "--out", str(out), "--time", "0.5",
                 "--gnuplot"]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["k0", "branch", "re", "im"]
    assert len(rows) == 7 * 2
    at1 = [complex(float(r["re"]), float(r["im"])) for r in rows if r["k0"] == "1"]
    m = np.array([[-2 - 2j * np.pi * 0.5, 3], [-1, -1 + 2j * np.pi * 0.1]])
    assert matching_distance(at1, eigenvalues(m).values) < 1e-12
    semi = read_csv(tmp_path / "s_semigroup.csv")
    assert len(semi) == len(rows)
    assert (tmp_path / "s.gp").exists()


def test_spectrum_kmax_zero(tmp_path, turing):
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--model", turing, "--kmax", "0", "--out", str(out)]) == 0
    assert {r["k0"] for r in read_csv(out)} == {"0"}


def test_missing_file(tmp_path):
    assert main(["spectrum", "--model", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == 2


def test_bad_model_names_field(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"velocities": [[0.1]]}))
    assert main(["classify", "--model", str(p)]) == 2
    assert "'B'" in capsys.readouterr().err


def test_classify(tmp_path, turing, capsys):
    prof = tmp_path / "sigma.csv"
    assert main(["classify", "--model", turing, "--profile-csv", str(prof)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "TuringPattern" and report["dominant_modes"] == [-4, 4]
    assert report["sigma_profile_csv"] == str(prof)
    assert len(read_csv(prof)) == 2 * report["K_max"] + 1
    hyp = write_model(tmp_path / "h.json", *HYPERBOLIC_MODEL)
    assert main(["classify", "--model", hyp]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "HyperbolicInstability" and report["b"] == 2
    diag = write_model(tmp_path / "d.json", [[-1, 0], [0, -2]], [0.1, -0.1])
    main(["classify", "--model", diag])
    assert json.loads(capsys.readouterr().out)["verdict"] == "Stable"


def test_classify_strict_indeterminate(tmp_path, capsys):
    # b = 0 exactly: Sigma tends to 0 from below, neither stable nor unstable
    model = write_model(tmp_path / "m.json", [[0, 1], [-1, -1]], [0.1, -0.1])
    assert main(["classify", "--model", model]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "Indeterminate"
    assert main(["classify", "--model", model, "--strict"]) == 3


def test_coeffs(tmp_path, capsys):
    model = write_model(tmp_path / "m.json", [[-2, 3], [-1, -1]], [0.5, -0.1])
    assert main(["coeffs", "--model", model, "--order", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    b0 = out["branches"][0]
    assert b0["coeffs"][0] == -2 and b0["coeffs"][1] == pytest.approx(-5)
    assert b0["coeffs"][2] == pytest.approx(-25 / 3)
    main(["coeffs", "--model", model, "--order", "1"])
    out = json.loads(capsys.readouterr().out)
    assert [b["coeffs"] for b in out["branches"]] == [[-2.0], [-1.0]]
    same = write_model(tmp_path / "s.json", [[-2, 3], [-1, -1]], [0.3, 0.3])
    assert main(["coeffs", "--model", same]) == 4


def test_simulate(tmp_path, turing):
    out = tmp_path / "run"
    args = ["simulate", "--model", turing, "--t", "0,0.5", "--kmax", "8", "--seed", "3",
            "--rescale", "auto", "--out", str(out), "--gnuplot"]
    assert main(args) == 0
    rows = read_csv(out / "trajectory.csv")
    assert list(rows[0]) == ["t", "x0", "component", "value"]
    assert len(rows) == 2 * 3 * 64
    obs = read_csv(out / "observables.csv")
    assert [float(r["t"]) for r in obs] == [0.0, 0.5]
    first = (out / "trajectory.csv").read_bytes()
    assert main(args) == 0
    assert (out / "trajectory.csv").read_bytes() == first


def test_simulate_snapshot_and_ic(tmp_path):
    model = write_model(tmp_path / "m.json", [[0.0]], [1.0])
    ic = tmp_path / "ic.json"
    ic.write_text(json.dumps({"K": 1, "coeffs": [[[0.5, 0.0], [1.0, 0.0], [0.5, 0.0]]]}))
    out = tmp_path / "snap"
    assert main(["simulate", "--model", str(model), "--t", "0", "--ic", str(ic), "--nx", "4",
                 "--layout", "snapshot", "--out", str(out)]) == 0
    rows = read_csv(out / "trajectory_t=0.0.csv")
    values = [float(r["value"]) for r in rows]
    assert values == pytest.approx([2.0, 1.0, 0.0, 1.0], abs=1e-14)
    ic.write_text(json.dumps({"K": 1, "coeffs": [[[0.5, 0.0], [1.0, 0.0], [0.0, 0.0]]]}))
    assert main(["simulate", "--model", str(model), "--t", "0", "--ic", str(ic), "--out", str(out)]) == 2


def test_bad_flags(tmp_path, turing):
    assert main(["simulate", "--model", turing]) == 2
    assert main(["simulate", "--model", turing, "--t", "1", "--rescale", "fast", "--out", str(tmp_path)]) == 2


def _sweep_file(tmp_path, axes, template=None):
    template = template or {"velocities": [[0.5], [-0.1]], "B": [[-2, 3], [-1, -1]]}
    p = tmp_path / "sweep.json"
    p.write_text(json.dumps({"template": template, "axes": axes, "output": str(tmp_path / "out")}))
    return str(p)


def test_sweep_counts(tmp_path, monkeypatch):
    monkeypatch.setenv("TRSPEC_THREADS", "2")
    path = _sweep_file(tmp_path, [{"path": "B.0.0", "start": -5, "stop": 5, "step": 1}])
    assert main(["sweep", "--sweep", path]) == 0
    out = tmp_path / "out"
    assert len(list(out.glob("B.0.0=*.json"))) == 11
    summary = read_csv(out / "summary.csv")
    assert len(summary) == 11 and list(summary[0])[:2] == ["B.0.0", "verdict"]


def test_sweep_prey_predator_flip(tmp_path):
    template = {"velocities": [[0.1], [-0.1]], "B": [[-1, 8], [-3, -7]]}
    path = _sweep_file(tmp_path, [{"path": "B.0.0", "start": -1, "stop": 3, "step": 2}], template)
    assert main(["sweep", "--sweep", path]) == 0
    verdicts = [r["verdict"] for r in read_csv(tmp_path / "out" / "summary.csv")]
    assert verdicts == ["Stable", "HyperbolicInstability", "HyperbolicInstability"]


def test_sweep_empty_axes(tmp_path):
    assert main(["sweep", "--sweep", _sweep_file(tmp_path, [])]) == 0
    assert len(read_csv(tmp_path / "out" / "summary.csv")) == 1


def test_sweep_bad_path(tmp_path):
    path = _sweep_file(tmp_path, [{"path": "B.9.9", "start": 0, "stop": 1, "step": 1}])
    assert main(["sweep", "--sweep", path]) == 2
    path = _sweep_file(tmp_path, [{"path": "B.0", "start": 0, "stop": 1, "step": 1}])
    assert main(["sweep", "--sweep", path]) == 2


def test_json_roundtrip_byte_stable(tmp_path, turing, capsys):
    main(["classify", "--model", turing])
    text = capsys.readouterr().out
    assert json.dumps(json.loads(text), indent=2) + "\n" == text


def test_module_entry_point(turing):
    proc = subprocess.run([sys.executable, "-m", "trspec", "classify", "--model", turing],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["verdict"] == "TuringPattern"
