import json

import numpy as np
import pytest

from fst.cli import EXIT_CONFIG, EXIT_NOCONV, EXIT_OK, _threads, load_config, main
from fst.errors import ConfigError
from fst.trajectory import read_csv


def write_cfg(tmp_path, data=None, solver=None, name="cfg.json", **extra):
    cfg = {"data": data or {"x_minus_inf": 1.0, "y_minus_inf": -1.0, "u_minus_inf": -0.4,
                            "v_minus_inf": 0.4, "kappa_a": 1.0, "kappa_b": 1.0},
           "solver": solver or {"step": 0.05, "T_schedule": [-100, -200], "tol_global": 1.0},
           "output": {"directory": str(tmp_path / "out"), "plots": ["trajectories", "decay"]}}
    cfg.update(extra)
    p = tmp_path / name
    p.write_text(json.dumps(cfg, indent=1))
    return p


def test_shipped_configs_load():
    for name in ("symmetric", "asymmetric", "free", "symmetric_default_schedule"):
        cfg = load_config(f"configs/{name}.json")
        assert cfg.data.kappa_a >= 0


def test_unknown_key_names_line(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n "data": {"x_minus_inf": 1, "y_minus_inf": -1,\n'
                 '  "u_minus_inf": -0.4, "v_minus_inf": 0.4, "kappa_a": 1, "kappa_b": 1},\n'
                 ' "solver": {\n  "stepp": 0.01\n }\n}\n')
    assert main(["solve", "--config", str(p)]) == EXIT_CONFIG
    assert f"{p}:5" in capsys.readouterr().err


def test_invalid_json_names_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "data": {\n  "x_minus_inf": 1,,\n }\n}\n')
    with pytest.raises(ConfigError, match=":3:"):
        load_config(p)


def test_non_scattering_velocities(tmp_path, capsys):
    d = {"x_minus_inf": 1.0, "y_minus_inf": -1.0, "u_minus_inf": 0.5, "v_minus_inf": 0.3,
         "kappa_a": 1.0, "kappa_b": 1.0}
    p = write_cfg(tmp_path, data=d)
    assert main(["solve", "--config", str(p)]) == EXIT_CONFIG
    assert "u_minus_inf < v_minus_inf" in capsys.readouterr().err


@pytest.mark.parametrize("bad", [{"solver": {"damping": 2.0}}, {"solver": {"sweep": "sor"}},
                                 {"output": {"formats": ["png"]}}, {"extra": {}}])
def test_config_rejections(tmp_path, bad):
    p = write_cfg(tmp_path, **bad)
    with pytest.raises(ConfigError):
        load_config(p)


def test_free_solve_gives_straight_lines(tmp_path):
    d = {"x_minus_inf": 1.0, "y_minus_inf": -1.0, "u_minus_inf": -0.4, "v_minus_inf": 0.4,
         "kappa_a": 0.0, "kappa_b": 0.0}
    p = write_cfg(tmp_path, data=d, solver={"step": 0.05, "T_schedule": [-50, -100]})
    assert main(["solve", "--config", str(p)]) == EXIT_OK
    conv = json.loads((tmp_path / "out" / "convergence.json").read_text())
    assert conv["converged"] and conv["delta"][0] < 1e-10
    t, a, ad, b, bd = read_csv(tmp_path / "out" / "trajectory.csv")
    assert np.allclose(a, 1.0 - 0.4 * t, atol=1e-11, rtol=0)
    assert np.allclose(b, -1.0 + 0.4 * t, atol=1e-11, rtol=0)
    assert np.allclose(ad, -0.4, atol=1e-15, rtol=0) and np.allclose(bd, 0.4, atol=1e-15, rtol=0)


def test_solve_then_check(tmp_path, capsys):
    p = write_cfg(tmp_path)
    assert main(["solve", "--config", str(p)]) == EXIT_OK
    out = tmp_path / "out"
    assert (out / "trajectory.csv").exists() and (out / "trajectories.svg").exists()
    conv = json.loads((out / "convergence.json").read_text())
    assert conv["T"] == [-100.0, -200.0] and len(conv["delta"]) == 1
    code = main(["check", "--traj", str(out / "trajectory.csv"), "--config", str(p)])
    report = json.loads((out / "report.json").read_text())
    assert code == (EXIT_OK if all(c["pass"] for c in report["checks"]) else EXIT_NOCONV)
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln[:4] in ("PASS", "FAIL")]
    assert len(lines) == len(report["checks"])
    assert (out / "decay.svg").exists()


def test_schedule_exhausted_exit_code(tmp_path):
    p = write_cfg(tmp_path, solver={"step": 0.05, "T_schedule": [-50, -100], "tol_global": 1e-9})
    assert main(["solve", "--config", str(p)]) == EXIT_NOCONV
    conv = json.loads((tmp_path / "out" / "convergence.json").read_text())
    assert not conv["converged"]


def test_corrupted_csv_fails_check(tmp_path, capsys):
    p = write_cfg(tmp_path)
    assert main(["solve", "--config", str(p)]) == EXIT_OK
    csv = tmp_path / "out" / "trajectory.csv"
    lines = csv.read_text().splitlines()
    rows = [ln.split(",") for ln in lines[1:]]
    t = np.array([float(r[0]) for r in rows])
    for r, tk in zip(rows, t):
        if tk > t[0]:
            r[2] = repr(float(r[2]) + 0.1)
    csv.write_text("\n".join([lines[0]] + [",".join(r) for r in rows]) + "\n")
    assert main(["check", "--traj", str(csv), "--config", str(p)]) == EXIT_NOCONV
    out = capsys.readouterr().out
    assert "FAIL  residual" in out


def test_cone_command(tmp_path, capsys):
    csv = tmp_path / "line.csv"
    t = np.arange(-5.0, 3.01, 0.25)
    rows = ["t,a,adot,b,bdot"] + [f"{x!r},1.0,0.0,{-1 + 0.5 * x!r},0.5" for x in t.tolist()]
    csv.write_text("\n".join(rows) + "\n")
    assert main(["cone", "--traj", str(csv), "--t", "0", "--sign", "ret", "--vertex", "a"]) == EXIT_OK
    res = json.loads(capsys.readouterr().out)
    assert res["cone_time"] == pytest.approx(-4.0, abs=1e-12)
    assert res["derivative"] == pytest.approx(2.0, abs=1e-12)


def test_bad_csv_is_config_error(tmp_path):
    csv = tmp_path / "bad.csv"
    csv.write_text("t,a\n0,1\n")
    assert main(["cone", "--traj", str(csv), "--t", "0", "--sign", "adv", "--vertex", "a"]) == EXIT_CONFIG


def test_usage_errors():
    assert main([]) == EXIT_CONFIG
    assert main(["cone", "--traj", "x", "--t", "0", "--sign", "up", "--vertex", "a"]) == EXIT_CONFIG


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("FST_THREADS", "1")
    assert _threads(8) == 1
    monkeypatch.setenv("FST_THREADS", "4")
    assert _threads(2) == 2
    monkeypatch.setenv("FST_THREADS", "many")
    with pytest.raises(ConfigError):
        _threads(2)
    monkeypatch.delenv("FST_THREADS")
    assert _threads(3) == 3
