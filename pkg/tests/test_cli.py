import json

import pytest

from glimm_wedge.cli import main
from glimm_wedge.io import read_csv, read_json
from glimm_wedge.params import GasParams
from glimm_wedge.riemann import solve_boundary
from glimm_wedge.state import FlowState

RUN = {
    "gamma": 1.1,
    "a_inf": 1.0,
    "tau": 0.0,
    "b0": -0.3,
    "mesh": {"x_max": 0.5, "k_max": 30},
    "profile": {"kind": "constant", "state": [1.0, 0.0]},
    "seed": 0,
}


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_riemann_equal_states(capsys):
    assert main(["riemann", "--left", "1,0", "--right", "1,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "interior"
    assert out["waves"] == []


def test_riemann_boundary_matches_solver(capsys, tmp_path):
    argv = ["riemann", "--boundary", "--left", "1,0", "--gamma", "1.1", "--b0", "-0.3", "--out", str(tmp_path)]
    assert main(argv) == 0
    out = json.loads(capsys.readouterr().out)
    fan = solve_boundary(FlowState(1.0, 0.0), GasParams(gamma=1.1, a_inf=1.0, tau=0.0, b0=-0.3))
    assert out["top"] == list(fan.top)
    assert out["z2"] == fan.z2
    assert [w["kind"] for w in out["waves"]] == ["S2"]
    assert json.loads((tmp_path / "riemann.json").read_text()) == out


def test_riemann_errors(capsys):
    assert main(["riemann", "--left", "1,0", "--right", "0.0001,50"]) == 2
    assert "VacuumReached" in capsys.readouterr().err
    assert main(["riemann", "--left", "1,0"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["riemann", "--left", "one,0", "--right", "1,0"])
    assert exc.value.code == 1


def _run_files(out):
    return sorted(p.name for p in out.iterdir())


def test_run_writes_reproducible_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "run.json", RUN)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(a)]) == 0
    assert main(["run", "--config", cfg, "--out", str(b)]) == 0
    names = _run_files(a)
    assert {n.split("_")[0] for n in names} == {"manifest", "solution", "waves", "functional", "report"}
    assert names == _run_files(b)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    report = read_json(next(a.glob("report_*.json")))
    assert report["F_violations"] == 0
    assert report["F_initial"] == pytest.approx(report["F_final"])
    _, rows = read_csv(next(a.glob("functional_*.csv")))
    f = [float(r["F"]) for r in rows]
    assert all(y <= x * (1 + 1e-12) for x, y in zip(f, f[1:]))


def test_run_seed_changes_the_tag(tmp_path):
    cfg = _write(tmp_path, "run.json", RUN)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o"), "--seed", "3"]) == 0
    assert any("_s3_" in n for n in _run_files(tmp_path / "o"))


def test_run_missing_key_is_named(tmp_path, capsys):
    cfg = _write(tmp_path, "run.json", {k: v for k, v in RUN.items() if k != "b0"})
    assert main(["run", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "missing config key: b0" in capsys.readouterr().err


def test_run_with_no_steps_exports_the_initial_column(tmp_path):
    cfg = _write(tmp_path, "run.json", dict(RUN, mesh={"x_max": 0.5, "k_max": 0}))
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    _, rows = read_csv(next((tmp_path / "o").glob("solution_*.csv")))
    assert {r["k"] for r in rows} == {"0"}
    _, waves = read_csv(next((tmp_path / "o").glob("waves_*.csv")))
    assert waves == []


def test_study_small(tmp_path, capsys):
    cfg = _write(tmp_path, "study.json", {"taus": [0.1, 0.05, 0.0], "k_max": 40})
    assert main(["study", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    _, rows = read_csv(next((tmp_path / "o").glob("distances_*.csv")))
    assert [float(r["tau"]) for r in rows] == [0.1, 0.05]
    assert "monotone: True" in capsys.readouterr().out


def test_study_single_tau(tmp_path):
    cfg = _write(tmp_path, "study.json", {"taus": [0.0], "k_max": 20})
    assert main(["study", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    _, rows = read_csv(next((tmp_path / "o").glob("distances_*.csv")))
    assert rows == []


def test_study_conflicting_meshes(tmp_path, capsys):
    m = {"dx": 0.01, "dy": 0.02, "k_max": 10, "y_depth": 60}
    cfg = _write(tmp_path, "study.json", {"taus": [0.1, 0.0], "meshes": [m, dict(m, dx=0.02)]})
    assert main(["study", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "DomainMismatch" in capsys.readouterr().err


def test_probe_reflection_slope(tmp_path, capsys):
    argv = ["probe", "--case", "L3.6", "--gamma", "1.0", "--samples", "50", "--out", str(tmp_path)]
    assert main(argv) == 0
    data = read_json(next(tmp_path.glob("probe_*.json")))
    (row,) = data["cases"]
    assert row["fitted"] == pytest.approx(-1.0, abs=1e-10)


def test_probe_exact_case_counts(capsys):
    assert main(["probe", "--case", "L3.5.2", "--samples", "100"]) == 0
    line = capsys.readouterr().out.strip()
    used = int(line.split("used")[1].split("/")[0])
    assert line.endswith(f"exact {used}")


def test_probe_zero_samples_and_bad_case(capsys):
    assert main(["probe", "--case", "L3.5.1", "--samples", "0"]) == 0
    assert main(["probe", "--case", "nope"]) == 1
