import csv
import json
from pathlib import Path

import pytest

from satsir import cli
from satsir.integrate import StepSizeUnderflow

PARAMS = Path(__file__).resolve().parent.parent / "params"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_below_threshold(capsys):
    code, out, _ = run(capsys, "analyze", "--params", PARAMS / "below_threshold.txt", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["region"] == "A3"
    assert rep["equilibria"]["case"] == "none"
    assert rep["dfe"] == {"local": "Stable", "global_certificate": True}
    assert rep["thresholds"]["r0"] == pytest.approx(0.5445, abs=1e-4)


def test_analyze_at_threshold_text(capsys):
    code, out, _ = run(capsys, "analyze", "--params", PARAMS / "at_threshold.txt")
    assert code == 0
    assert "region: A3" in out
    assert "SaddleAtR0eq1" in out
    assert "E2 = (0.112061, 0.478132)" in out


def test_overrides_win_over_file(capsys):
    code, out, _ = run(capsys, "analyze", "--params", PARAMS / "at_threshold.txt",
                       "--beta2", "0.1", "--json")
    assert code == 0
    assert json.loads(out)["params"]["beta2"] == 0.1


def test_json_round_trip_and_determinism(capsys):
    args = ("analyze", "--params", PARAMS / "at_threshold.txt", "--json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    assert json.dumps(json.loads(first), indent=2, sort_keys=True) + "\n" == first


def test_missing_parameter_names_it(tmp_path, capsys):
    text = (PARAMS / "at_threshold.txt").read_text()
    path = tmp_path / "p.txt"
    path.write_text("".join(l + "\n" for l in text.splitlines() if not l.startswith("beta ")))
    code, _, err = run(capsys, "analyze", "--params", path)
    assert code == 2
    assert "beta" in err and "missing" in err


@pytest.mark.parametrize("argv", [
    ("analyze", "--params", "does-not-exist.txt"),
    ("analyze", "--params", PARAMS / "at_threshold.txt", "--beta", "-1"),
    ("sweep", "--params", PARAMS / "backward.txt", "--lo", "1", "--hi", "0"),
    ("simulate", "--params", PARAMS / "backward.txt", "--init", "0.9,0.9", "--t", "1"),
    ("simulate", "--params", PARAMS / "backward.txt", "--init", "oops", "--t", "1"),
    ("frobnicate",),
])
def test_input_errors_exit_2(argv, capsys):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_runtime_errors_exit_3(monkeypatch, capsys):
    def boom(*a, **k):
        raise StepSizeUnderflow("step size underflow at t=1")

    monkeypatch.setattr(cli, "integrate", boom)
    code, _, err = run(capsys, "simulate", "--params", PARAMS / "backward.txt",
                       "--init", "0.5,0.1", "--t", "10")
    assert code == 3
    assert "StepSizeUnderflow" in err


def test_sweep_backward_topology(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    plot = tmp_path / "sweep.svg"
    code, _, _ = run(capsys, "sweep", "--params", PARAMS / "backward.txt", "--param", "beta2",
                     "--lo", "0", "--hi", "0.025", "-n", "400", "--out", out, "--plot", plot)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 400
    counts = {}
    for row in rows:
        n = (row["I_e1"] != "") + (row["I_e2"] != "")
        counts.setdefault(n, []).append(float(row["r0"]))
    assert set(counts) == {0, 1, 2}
    assert max(counts[2]) < 1.0 < min(counts[1])
    assert plot.read_text().startswith("<svg")
    meta = json.loads(Path(str(out) + ".meta.json").read_text())
    assert meta["command"] == "sweep"
    assert "finished" not in out.read_text()


def test_sweep_verify_flag(capsys):
    code, _, err = run(capsys, "sweep", "--params", PARAMS / "backward.txt", "--lo", "0",
                       "--hi", "0.025", "-n", "21", "--verify")
    assert code == 0
    assert "spot-checks agree" in err


def test_simulate_reaches_dfe(capsys):
    code, out, err = run(capsys, "simulate", "--params", PARAMS / "below_threshold.txt",
                         "--init", "0.5,0.3", "--t", "2000")
    assert code == 0
    t, S, I, R = map(float, out.splitlines()[-1].split(","))
    assert t == 2000.0
    assert abs(S - 0.3) < 1e-4 and abs(I) < 1e-4
    assert "termination" in err


def test_simulate_outputs(tmp_path, capsys):
    plot = tmp_path / "traj.svg"
    code, out, _ = run(capsys, "simulate", "--params", PARAMS / "at_threshold.txt", "--init", "0.5,0.3",
                       "--t", "100", "--samples", "11", "--json", "--plot", plot)
    assert code == 0
    data = json.loads(out)
    assert data["t"][-1] == 100.0 and len(data["S"]) == 11
    assert plot.exists() and (tmp_path / "traj_phase.svg").exists()


def test_map_svg_labels_three_regions(tmp_path, capsys):
    out, plot = tmp_path / "map.csv", tmp_path / "map.svg"
    code, _, _ = run(capsys, "map", "--params", PARAMS / "region_map.txt", "--alpha2-range", "0.1,20",
                     "--beta2-range", "0.001,0.1", "--resolution", "30", "--out", out, "--plot", plot)
    assert code == 0
    svg = plot.read_text()
    for name in ("A1", "A2", "A3"):
        assert f">{name}<" in svg
    assert len(out.read_text().splitlines()) == 901


def test_outputs_are_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path, threads in zip(paths, (1, 3)):
        run(capsys, "map", "--params", PARAMS / "region_map.txt", "--resolution", "10",
            "--threads", threads, "--out", path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_hopf_subcommand(capsys):
    code, out, _ = run(capsys, "hopf", "--params", PARAMS / "hopf.txt", "--lo", "1.3", "--hi", "1.5",
                       "--brackets", "4", "--json")
    assert code == 0
    (rep,) = json.loads(out)
    assert rep["value"] == pytest.approx(1.395644037773121, rel=1e-9)
    assert rep["predicted_cycle"] == "StableOrbit"
    code, out, err = run(capsys, "hopf", "--params", PARAMS / "below_threshold.txt", "--lo", "0.01",
                         "--hi", "0.5", "--brackets", "4")
    assert code == 0 and len(out.splitlines()) == 1
    assert "no Hopf point" in err


def test_hopf_verify_reports_observed_cycle(capsys):
    code, out, _ = run(capsys, "hopf", "--params", PARAMS / "hopf.txt", "--lo", "1.3", "--hi", "1.5",
                       "--brackets", "4", "--json", "--verify")
    assert code == 0
    (rep,) = json.loads(out)
    assert rep["observed_cycle"] == rep["predicted_cycle"] == "StableOrbit"
    assert abs(rep["verification"]["return_map_ratio"] - 1.0) < 0.2
