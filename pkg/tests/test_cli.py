import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from assocheun import suites
from assocheun.cli import main
from assocheun.elliptic import theta_of_w

GOLDEN = Path(__file__).parent / "golden"
EVAL = ["eval", "--alpha", "0", "--beta", "0.5", "--gamma", "0.5", "--delta", "0.5",
        "--eps", "0.5", "--s", "0.3", "--k2", "0.49"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_normalization(capsys):
    code, out, _ = run(capsys, *EVAL, "--w", "0")
    assert code == 0 and json.loads(out)["value"] == 1.0


def test_eval_golden(capsys):
    code, out, _ = run(capsys, *EVAL, "--w", "0.4")
    assert code == 0
    assert out == (GOLDEN / "cli_eval_w04.json").read_text()
    # c = mu = 0 member of the first family: cos(2 sqrt(s) theta(w))
    ref = math.cos(2 * math.sqrt(0.3) * theta_of_w(0.4, 0.49))
    assert abs(json.loads(out)["value"] - ref) < 1e-12


def test_eval_fuchs_violation(capsys):
    argv = list(EVAL)
    argv[argv.index("--beta") + 1] = "0.7"
    code, _, err = run(capsys, *argv, "--w", "0.4")
    assert code == 2 and "Fuchs" in err


def test_eval_csv(capsys):
    code, out, _ = run(capsys, *EVAL, "--w", "0.4", "--format", "csv")
    head, row = out.splitlines()
    assert code == 0 and head == "w,value,N,tail,params" and row.startswith("0.4,0.7116756290466488,")


def test_assoc_eval(capsys):
    code, out, _ = run(capsys, "assoc-eval", *EVAL[1:], "--c", "0.75", "--mu", "0.5", "--w", "0.3")
    d = json.loads(out)
    assert code == 0 and d["params"]["c"] == 0.75 and d["N"] >= 32


def test_quadrature_failure_exit_1(capsys):
    code, _, err = run(capsys, "--config", str(GOLDEN / "tiny_tol.json"), "closed-form",
                       "--family", "3", "--c", "0.75", "--sigma", "-0.5", "--k2", "0.64",
                       "--w", "0.6")
    assert code == 1 and "numerical failure" in err


def test_verify_transforms(capsys):
    code, out, err = run(capsys, "verify", "transforms")
    rows = json.loads(out)
    assert code == 0 and max(r["diff"] for r in rows) < 1e-8
    assert all(r["c_out_exact"] for r in rows if r["case"].startswith("second"))


def test_verify_stieltjes(capsys):
    code, out, _ = run(capsys, "verify", "stieltjes")
    rows = json.loads(out)
    st = [r for r in rows if r["case"].startswith("stieltjes")]
    assert code == 0 and len(st) == 72 and max(r["diff"] for r in st) < 1e-6


def test_verify_breach_exit_1(capsys, monkeypatch):
    monkeypatch.setattr(suites, "STIELTJES_TOL", 0.0)
    code, _, err = run(capsys, "verify", "stieltjes")
    assert code == 1 and "worst" in err


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2


def test_deterministic_across_runs_and_workers(capsys):
    _, a, _ = run(capsys, "verify", "transforms")
    _, b, _ = run(capsys, "verify", "transforms")
    _, c, _ = run(capsys, "--workers", "2", "verify", "transforms")
    assert a == b == c


def test_closed_form_rows(capsys):
    code, out, _ = run(capsys, "closed-form", "--family", "3", "--c", "0.75", "--mu", "0.5",
                       "--sigma", "-0.5", "--k2", "0.64", "--w", "0.6", "0.1")
    rows = json.loads(out)
    assert code == 0 and [r["w"] for r in rows] == [0.1, 0.6]
    assert set(rows[0]) == {"w", "series_value", "closed_form_value", "abs_diff"}
    assert max(r["abs_diff"] for r in rows) < 1e-6


def test_closed_form_c0_uses_limit(capsys):
    code, out, _ = run(capsys, "closed-form", "--family", "2", "--c", "0", "--mu", "0.5",
                       "--sigma", "0.7", "--k2", "0.5", "--w", "0.4")
    assert code == 0 and json.loads(out)[0]["abs_diff"] < 1e-10


def test_closed_form_bad_family(capsys):
    code, _, err = run(capsys, "closed-form", "--family", "9", "--c", "0.5", "--sigma", "1",
                       "--k2", "0.5", "--w", "0.3")
    assert code == 2 and "family" in err


def test_transform_command(capsys):
    code, out, _ = run(capsys, "transform", "--kind", "second", "--alpha", "0.5", "--beta", "0.4",
                       "--gamma", "1.2", "--delta", "0.3", "--eps", "0.4", "--s", "-0.3",
                       "--k2", "0.5", "--c", "0.5", "--w", "0.4")
    d = json.loads(out)
    assert code == 0 and d["abs_diff"] < 1e-8 and d["params_out"]["c"] == 0.0


def test_transform_strip_violation(capsys):
    code, _, err = run(capsys, "transform", "--kind", "second", "--alpha", "1.5", "--beta", "0.4",
                       "--gamma", "1.2", "--delta", "0.3", "--eps", "1.4", "--s", "-0.3",
                       "--k2", "0.5", "--c", "0.5", "--w", "0.4")
    assert code == 2 and "1 > alpha > -c" in err


def test_stieltjes_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "stieltjes", "--c", "0.75", "--mu", "0.5",
                       "--k2", "0.5", "--z", "-5", "-1")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("z_re,z_im,S_d_ratio_re")
    assert lines[1].startswith("-5.0,0.0,") and "np." not in out


def test_stieltjes_support(capsys):
    code, _, err = run(capsys, "stieltjes", "--c", "0.75", "--k2", "0.5", "--z", "2")
    assert code == 2 and "support" in err


def test_bd_check(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N_trunc": 100, "t_max": 20.0, "dt": 2e-3}))
    traj = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "--config", str(cfg), "bd-check", "--c", "0.75", "--mu", "1",
                       "--k2", "0.5", "--p", "1", "0.5", "--trajectory-csv", str(traj))
    rows = json.loads(out)
    assert code == 0 and [r["p"] for r in rows] == [0.5, 1.0]
    assert max(r["rel_diff"] for r in rows) < 1e-3
    assert traj.read_text().startswith("t,p00\n0,1\n")


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"quad_tol": -1}))
    code, _, err = run(capsys, "--config", str(bad), *EVAL, "--w", "0.2")
    assert code == 2 and "quad_tol" in err
    bad.write_text(json.dumps({"nonsense": 1}))
    code, _, err = run(capsys, "--config", str(bad), *EVAL, "--w", "0.2")
    assert code == 2 and "nonsense" in err


def test_config_sets_format(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"output_format": "csv"}))
    _, out, _ = run(capsys, "--config", str(cfg), *EVAL, "--w", "0.2")
    assert out.startswith("w,value")
    # flag beats file
    _, out, _ = run(capsys, "--config", str(cfg), "--format", "json", *EVAL, "--w", "0.2")
    assert out.startswith("{")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "assocheun.cli", *EVAL, "--w", "0.4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "cli_eval_w04.json").read_text()
