import json
import math

import numpy as np
import pytest

from capra.cli import main
from capra.numerics import read_sample_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_norm_topk(capsys):
    code, out, _ = run_cli(capsys, "norm", "--kind", "topk", "--q", "1",
                           "--k", "2", "--x", "3,-1,2")
    assert code == 0 and out.strip() == "5"


def test_norm_ksupport(capsys):
    code, out, _ = run_cli(capsys, "norm", "--kind", "ksupport", "--p", "inf",
                           "--k", "2", "--x", "1,1,1")
    assert code == 0 and out.strip() == "1.5"


def test_norm_best(capsys):
    code, out, _ = run_cli(capsys, "norm", "--kind", "best", "--p", "2",
                           "--phi", "id", "--x", "1,-1")
    assert code == 0 and out.strip() == "2"


def test_norm_twelve_significant_digits(capsys):
    code, out, _ = run_cli(capsys, "norm", "--kind", "topk", "--q", "2",
                           "--k", "2", "--x", "1,1")
    assert code == 0 and out.strip() == f"{math.sqrt(2.0):.12g}"


def test_parse_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["norm", "--kind", "topk"])  # missing --x
    assert exc.value.code == 2


def test_domain_error_exit_3(capsys):
    code, out, err = run_cli(capsys, "norm", "--kind", "topk", "--q", "1",
                             "--k", "9", "--x", "1,2")
    assert code == 3
    assert "k-out-of-range" in err


def test_unsupported_p_exit_3(capsys):
    code, _, err = run_cli(capsys, "norm", "--kind", "ksupport", "--p", "3",
                           "--k", "1", "--x", "1,2")
    assert code == 3 and "unsupported-p" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"source": {"lp": 2}, "phi": [0, 1, 2]}))
    code, out, _ = run_cli(capsys, "norm", "--kind", "best", "--x", "1,-1",
                           "--config", str(cfg))
    assert code == 0 and out.strip() == "2"
    # --phi overrides the config weights
    code, out, _ = run_cli(capsys, "norm", "--kind", "best", "--x", "1,-1",
                           "--config", str(cfg), "--phi", "2*id")
    assert code == 0 and out.strip() == "4"


def test_envelope_command(tmp_path, capsys):
    out_csv = tmp_path / "surface.csv"
    out_json = tmp_path / "surface.json"
    code, out, _ = run_cli(capsys, "envelope", "--f", "l0", "--nu", "lp:inf",
                           "--grid", "41", "--out", str(out_csv),
                           "--json", str(out_json))
    assert code == 0
    assert "value near (1,0): 1" in out
    pts, vals = read_sample_csv(out_csv)
    assert pts.shape == (41 * 41, 2)
    linf = np.max(np.abs(pts), axis=1)
    l1 = np.sum(np.abs(pts), axis=1)
    ball = linf <= 1.0 + 1e-9
    assert np.max(np.abs(vals[ball] - l1[ball])) <= 1e-12
    assert np.all(np.isinf(vals[~ball]))
    summary = json.loads(out_json.read_text())
    assert summary["min"] == 0.0 and summary["max"] == "+inf"


def test_envelope_zero_function(capsys):
    code, out, _ = run_cli(capsys, "envelope", "--f", "zero", "--nu", "lp:2",
                           "--grid", "21")
    assert code == 0
    for line in out.strip().splitlines():
        assert line.endswith(": 0")


def test_envelope_invalid_nu_exit_3(capsys):
    code, _, err = run_cli(capsys, "envelope", "--f", "l0", "--nu", "lp:0",
                           "--grid", "21")
    assert code == 3 and "nonpositive-p" in err


def test_verify_norms_suite(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "verify", "--suite", "norms",
                           "--seed", "0x5EED", "--report", str(report))
    assert code == 0
    data = json.loads(report.read_text())
    assert data["passed"] is True
    assert data["suite"] == "norms"
    assert all("name" in c and "tolerance" in c and "observed" in c
               for c in data["checks"])
    assert out.count("[PASS]") == len(data["checks"])


def test_verify_report_deterministic(tmp_path, capsys):
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    assert run_cli(capsys, "verify", "--suite", "norms", "--seed", "7",
                   "--report", str(r1))[0] == 0
    assert run_cli(capsys, "verify", "--suite", "norms", "--seed", "7",
                   "--report", str(r2))[0] == 0
    assert r1.read_bytes() == r2.read_bytes()


def test_verify_oracle_modes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--oracle", "topk-enum",
                           "--q", "1", "--k", "2", "--x", "3,-1,2")
    assert code == 0 and out.strip() == "5"
    code, out, _ = run_cli(capsys, "verify", "--oracle", "ksupport",
                           "--p", "2", "--k", "1", "--x", "3,4",
                           "--count", "20000")
    assert code == 0 and abs(float(out) - 7.0) <= 1e-3
    code, out, _ = run_cli(capsys, "verify", "--oracle", "support-phi",
                           "--p", "inf", "--phi", "id", "--x", "1,-1")
    assert code == 0 and out.strip() == "2"
    code, out, _ = run_cli(capsys, "verify", "--oracle", "conjugate",
                           "--f", "l0", "--nu", "lp:2", "--grid", "41",
                           "--at", "3,0")
    assert code == 0 and abs(float(out) - 2.0) <= 0.2


def test_verify_requires_suite_or_oracle(capsys):
    code, _, err = run_cli(capsys, "verify")
    assert code == 3 and "--suite or --oracle" in err


def test_capra_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("CAPRA_THREADS", "1")
    code, out, _ = run_cli(capsys, "norm", "--kind", "topk", "--q", "1",
                           "--k", "1", "--x", "2,-3")
    assert code == 0 and out.strip() == "3"
