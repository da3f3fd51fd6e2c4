import json
import subprocess
import sys
from pathlib import Path

import pytest

from lenspec.cli import CliConfig, build_parser, config_from_args, main

DATA = Path(__file__).parent / "data"


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--group", "full", "--xmax", "8", "--format", "csv")
    assert code == 0
    assert out == (DATA / "spectrum_full_8.csv").read_text()
    assert len(out.splitlines()) == 6


def test_spectrum_level_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--group", "gamma0:3", "--xmax", "100", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["spec"] == "gamma0:3" and len(d["rows"]) == 97
    assert set(d["rows"][0]) == {"t", "m", "mhat_num", "mhat_den", "I"}


def test_spectrum_bad_xmax(capsys):
    code, _, err = run(capsys, "spectrum", "--group", "full", "--xmax", "2")
    assert code == 2 and "xmax" in err


def test_bad_group(capsys):
    code, _, err = run(capsys, "spectrum", "--group", "gamma1:5", "--xmax", "10")
    assert code == 2


def test_usage_error_from_argparse(capsys):
    assert main(["spectrum"]) == 2
    assert main(["no-such-command"]) == 2


def test_trace_count_both(capsys):
    code, out, _ = run(capsys, "trace-count", "--group", "full", "--modulus", "3", "--method", "both")
    assert code == 0
    assert out.splitlines() == ["m,brute,closed,diff", "0,6,6,0", "1,9,9,0", "2,9,9,0"]


@pytest.mark.parametrize("group,modulus", [("full", 64), ("gamma0:3", 9), ("hat:9", 27)])
def test_trace_count_agreement(capsys, group, modulus):
    code, out, _ = run(capsys, "trace-count", "--group", group, "--modulus", str(modulus), "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["all_equal"] and len(d["rows"]) == modulus


def test_trace_count_composite_brute_only(capsys):
    code, out, _ = run(capsys, "trace-count", "--group", "gamma0:3", "--modulus", "15", "--method", "brute")
    assert code == 0 and len(out.splitlines()) == 16
    code, _, _ = run(capsys, "trace-count", "--modulus", "15", "--method", "closed")
    assert code == 2


def test_trace_count_no_closed_form(capsys):
    code, _, err = run(capsys, "trace-count", "--modulus", "8", "--method", "both")
    assert code == 2 and "r >= 6" in err


def test_trace_count_guard(capsys):
    code, _, err = run(capsys, "trace-count", "--modulus", "30011", "--method", "brute")
    assert code == 3 and "guard" in err


def test_trace_count_mismatch_exit(capsys, monkeypatch):
    from lenspec import finite_sl2

    real = finite_sl2.trace_count_closed
    monkeypatch.setattr(finite_sl2, "trace_count_closed", lambda s, p, r, m: real(s, p, r, m) + (m == 1))
    code, out, _ = run(capsys, "trace-count", "--modulus", "5")
    assert code == 4 and "1,20,21,1" in out.splitlines()


def test_coefficient_k1(capsys):
    code, out, _ = run(capsys, "coefficient", "-k", "1")
    d = json.loads(out)
    assert code == 0 and d["c_predicted"] == 1.0 and d["c_exact"] == {"num": 1, "den": 1}


def test_coefficient_k2(capsys):
    code, out, _ = run(capsys, "coefficient", "--group", "full", "-k", "2", "--shifts", "0,0", "--prime-cutoff", "97")
    d = json.loads(out)
    assert code == 0 and d["label"] == "closed"
    assert d["local_factors"][0] == {"p": 2, "method": "closed", "depth": None, "value_num": 1015, "value_den": 864}
    assert 1.3 < d["c_predicted"] < 1.35


def test_coefficient_shifted_numeric(capsys):
    code, out, _ = run(capsys, "coefficient", "-k", "2", "--shifts", "0,2", "--prime-cutoff", "13", "--depth", "4")
    d = json.loads(out)
    assert code == 0 and d["label"] == "numeric" and d["c_exact"] is None
    assert all("value_num" in f and f["method"] == "brute" for f in d["local_factors"])


def test_coefficient_bad_shifts(capsys):
    code, _, _ = run(capsys, "coefficient", "-k", "3", "--shifts", "0,0")
    assert code == 2


def test_correlate(capsys):
    code, out, _ = run(capsys, "correlate", "-k", "2", "--xmax", "300", "--prime-cutoff", "30", "--depth", "4")
    d = json.loads(out)
    assert code == 0
    assert list(d) == ["spec", "k", "shifts", "x", "pi_k", "li_k", "c_empirical", "c_predicted",
                       "c_predicted_tail_bound", "ratio", "local_factors"]


def test_class_number(capsys):
    code, out, _ = run(capsys, "class-number", "-D", "5", "12", "45")
    assert code == 0
    rows = [line.split(",")[:4] for line in out.splitlines()[1:]]
    assert rows == [["5", "1", "3", "1"], ["12", "2", "4", "1"], ["45", "2", "7", "1"]]
    assert run(capsys, "class-number", "-D", "16")[0] == 2


def test_output_file(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "spectrum", "--xmax", "8", "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text() == (DATA / "spectrum_full_8.csv").read_text()


def test_spectrum_thread_independent(tmp_path, capsys):
    from lenspec import spectra

    outs = []
    for threads in ("1", "4"):
        spectra._class_cache.clear()
        spectra._table_cache.clear()
        outs.append(run(capsys, "spectrum", "--xmax", "500", "--threads", threads)[1])
    assert outs[0] == outs[1]


def test_verify_trace_suite(capsys):
    code, out, err = run(capsys, "verify", "--suite", "trace")
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert "PASS" in err and not any(not c["passed"] for c in d["checks"])
    kinds = {dv["kind"] for dv in d["deviations"]}
    assert kinds == {"trace-row", "census"}


def test_verify_failure_exit(capsys, monkeypatch):
    from lenspec import verification

    monkeypatch.setattr(verification, "suite_trace",
                        lambda res, seed: res.checks.append(verification.Check("forced", False)))
    code, out, err = run(capsys, "verify", "--suite", "trace")
    assert code == 1 and "FAIL  forced" in err


def test_config_roundtrip():
    ns = build_parser().parse_args(["coefficient", "--group", "HAT:9", "-k", "3"])
    cfg = config_from_args(ns)
    assert isinstance(cfg, CliConfig)
    assert str(cfg.spec) == "hat:9" and cfg.P == 100 and cfg.L == 6 and cfg.M == 6
    assert cfg.resolved_shifts() == (0, 0, 0)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lenspec", "trace-count", "--modulus", "3"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("m,brute,closed,diff")
