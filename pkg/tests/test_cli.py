import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
import tomli

from toboggan.cli import ConfigError, RunConfig, load_config, main
from toboggan.qmetric import Pencil


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_rectify_text(capsys):
    code, out, _ = run(capsys, "rectify", "--term", "0,1,3", "--m", "3")
    assert code == 0
    assert out.strip() == "-phi'' + [-9i*y^13 + 2/y^2] phi = E * [9*y^4] phi"


def test_rectify_json(capsys):
    code, out, _ = run(capsys, "rectify", "--term", "1,0,2", "--m", "2", "--format", "json")
    assert code == 0
    json.loads(out)


def test_harmonic_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--window", "0", "6")
    assert code == 0
    E = [float(r["re_E"]) for r in rows(out)]
    assert np.allclose(E, [1, 3, 5], atol=1e-8)
    assert all(r["method"] == "shooting" for r in rows(out))


def test_spectrum_from_config_file(tmp_path, capsys):
    cfg = RunConfig()
    cfg.solver.window = [0.0, 4.0]
    cfg.solver.method = "both"
    cfg.output.format = "json"
    path = tmp_path / "run.toml"
    path.write_text(cfg.to_toml())
    code, out, _ = run(capsys, "spectrum", "--config", str(path))
    assert code == 0
    methods = {r["method"] for r in json.loads(out)}
    assert methods == {"shooting", "matrix"}


def test_config_round_trip():
    cfg = RunConfig()
    cfg.problem.ell = "1/3"
    cfg.contour.epsilon = 0.25
    assert RunConfig.from_dict(tomli.loads(cfg.to_toml())) == cfg
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


@pytest.mark.parametrize("bad", [
    {"solver": {"bogus": 1}},
    {"mystery": {}},
    {"contour": {"epsilon": -1.0}},
    {"solver": {"steps": 2.5}},
    {"solver": {"window": [3.0, 1.0]}},
])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(bad)


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("[solver]\nunknown_key = 3\n")
    code, _, err = run(capsys, "spectrum", "--config", str(path))
    assert code == 2
    assert "solver.unknown_key" in err


def test_missing_config_file(capsys):
    assert run(capsys, "spectrum", "--config", "/nonexistent/run.toml")[0] == 2


def test_solver_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(Pencil(np.eye(2), np.eye(2)).to_json())
    code, _, err = run(capsys, "metric", "--in", str(path))
    assert code == 3
    assert "degenerate" in err


def test_metric_random_report(capsys):
    code, out, _ = run(capsys, "metric", "--random", "4", "--seed", "7", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["positive_definite"] and rep["dieudonne_H"] < 1e-10


def test_exact_check_table(capsys):
    code, out, _ = run(capsys, "exact-check", "--N", "1", "2", "--M-max", "4")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["N", "M", "ell", "nu", "gamma", "bound_flag",
                              "abs_c_unphysical", "decay_ratio"]
    for r in table:
        if r["bound_flag"] == "1":
            assert float(r["abs_c_unphysical"]) == 0


def test_outputs_byte_identical(capsys):
    first = run(capsys, "metric", "--random", "5", "--seed", "3")[1]
    second = run(capsys, "metric", "--random", "5", "--seed", "3", "--threads", "1")[1]
    assert first == second
    a = run(capsys, "spectrum", "--window", "0", "6", "--threads", "1")[1]
    b = run(capsys, "spectrum", "--window", "0", "6", "--threads", "2")[1]
    assert a == b


def test_fig9_columns(capsys):
    code, out, _ = run(capsys, "fig", "--which", "9")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["N", "rho", "n", "F"]
    assert len(table) == 9 * 13 * 4


def test_asympt_compare(capsys):
    code, out, _ = run(capsys, "asympt", "--N", "0", "--ell", "10", "--levels", "1", "--compare")
    assert code == 0
    (r,) = rows(out)
    assert float(r["abs_error"]) < 0.05 * abs(float(r["E_shooting"]))


def test_wedges(capsys):
    code, out, _ = run(capsys, "wedges", "--power", "3")
    assert code == 0
    assert len(rows(out)) == 3


def test_load_config_default():
    assert load_config(None) == RunConfig()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toboggan", "wedges", "--power", "2"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert proc.stdout.startswith("center,width,kind,pair")


def test_exact_check_marks_refused_continuation(capsys):
    code, out, err = run(capsys, "exact-check", "--N", "4", "--M-max", "6", "--decay")
    assert code == 0
    table = rows(out)
    assert float(table[0]["decay_ratio"]) < 1e-3
    assert table[5]["decay_ratio"] == "nan"
    assert "M=6" in err
