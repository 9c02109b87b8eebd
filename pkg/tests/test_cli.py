import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from invgauss.cli import RunConfig, UsageError, main, parse_operator


@pytest.fixture
def files(tmp_path):
    h0 = tmp_path / "h0.json"
    h0.write_text(json.dumps({"dim": 1, "terms": [{"exponents": [0], "coeff_re": 1.0}]}))
    h1 = tmp_path / "h1.json"
    h1.write_text(json.dumps({"dim": 1, "terms": [{"exponents": [1], "coeff_re": 2.0, "coeff_im": 0.0}]}))
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[-1.2], [-0.4], [0.3], [0.9], [1.7]]))
    pcsv = tmp_path / "pts.csv"
    pcsv.write_text("# x\n-0.5\n0.25\n")
    return {"h0": str(h0), "h1": str(h1), "pts": str(pts), "pcsv": str(pcsv), "dir": tmp_path}


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_apply_riesz(files):
    out = files["dir"] / "a.csv"
    code = main(["apply", "riesz:1", "--function", files["h0"], "--points", files["pts"], "--out", str(out)])
    assert code == 0
    r = rows(out)
    assert r[0] == ["x1", "spectral_re", "spectral_im", "pv_re", "pv_im", "abs_diff"]
    assert len(r) == 6
    assert max(float(row[-1]) for row in r[1:]) <= 1e-5
    # spectral column is -Ht_1
    assert float(r[3][1]) == pytest.approx(-2 * 0.3 * math.exp(-0.09), rel=1e-12)


def test_apply_heat_at_time_zero_is_identity(files):
    out = files["dir"] / "h.csv"
    assert main(["apply", "heat:0", "--function", files["h0"], "--points", files["pcsv"], "--out", str(out)]) == 0
    for row in rows(out)[1:]:
        x = float(row[0])
        assert float(row[1]) == pytest.approx(math.exp(-x * x), rel=1e-14)
        assert float(row[3]) == math.exp(-x * x)


def test_apply_tolerance_failure(files):
    out = files["dir"] / "t.csv"
    code = main(["apply", "riesz:1", "--degree", "0", "--function", files["h1"], "--points", files["pts"],
                 "--out", str(out)])
    assert code == 1


def test_unknown_operator(files, capsys):
    code = main(["apply", "foo:1", "--function", files["h0"], "--points", files["pts"]])
    assert code == 2
    assert "unknown operator" in capsys.readouterr().err


def test_malformed_function(files):
    bad = files["dir"] / "bad.json"
    bad.write_text("{not json")
    assert main(["apply", "riesz:1", "--function", str(bad), "--points", files["pts"]]) == 2


def test_kernel_grid_count_and_determinism(files):
    a, b = files["dir"] / "k1.csv", files["dir"] / "k2.csv"
    assert main(["kernel", "Mbeta", "--grid=-3,3,21", "--out", str(a)]) == 0
    assert main(["kernel", "Mbeta", "--grid=-3,3,21", "--out", str(b)]) == 0
    r = rows(a)
    assert r[0] == ["x1", "y1", "value_re", "value_im"]
    assert len(r) - 1 == 420
    assert a.read_bytes() == b.read_bytes()
    # lexicographic order of (x, y)
    pairs = [(float(x), float(y)) for x, y, *_ in r[1:]]
    assert pairs == sorted(pairs)


def test_kernel_lists_skipped_diagonal(files, capsys):
    main(["kernel", "riesz:1", "--grid=-1,1,3", "--out", str(files["dir"] / "k.csv")])
    err = capsys.readouterr().err
    assert err.count("skip diagonal") == 3


def test_riesz_bar_grid_is_finite(files):
    out = files["dir"] / "rb.csv"
    assert main(["kernel", "riesz_bar:1", "--grid=-3,3,21", "--out", str(out)]) == 0
    vals = np.array([[float(v) for v in row[2:]] for row in rows(out)[1:]])
    assert np.all(np.isfinite(vals))


def test_certify_pass_and_unknown(files):
    out = files["dir"] / "c.json"
    assert main(["certify", "acotdif", "--dim", "1", "--alpha", "1", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["verdict"] == "pass" and data["estimate"] == "acotdif"
    assert main(["certify", "bogus-id"]) == 2


def test_certify_determinism(files):
    a, b = files["dir"] / "c1.json", files["dir"] / "c2.json"
    main(["certify", "acotRalpha", "--out", str(a)])
    main(["certify", "acotRalpha", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_pv_sweep_imaginary(files):
    out = files["dir"] / "s.csv"
    assert main(["pv-sweep", "imaginary:1", "--function", files["h1"], "--point", "0.3", "--out", str(out)]) == 0
    r = rows(out)
    assert r[0] == ["eps", "shell_re", "shell_im", "corrected_re", "corrected_im"]
    body, footer = r[1:-1], r[-1]
    assert footer[0] == "limit"
    limit = complex(float(footer[3]), float(footer[4]))
    assert limit == pytest.approx(2 ** 1j * 2 * 0.3 * math.exp(-0.09), abs=1e-9)
    corrected = [complex(float(row[3]), float(row[4])) for row in body]
    shells = [complex(float(row[1]), float(row[2])) for row in body]
    assert abs(corrected[-1] - limit) < abs(corrected[0] - limit)
    assert abs(corrected[-1] - limit) < 1e-4
    assert np.ptp([s.real for s in shells[6:]]) > 0.1


def test_pv_sweep_absolutely_convergent(files):
    out = files["dir"] / "s2.csv"
    assert main(["pv-sweep", "riesz:2", "--function", files["h0"], "--point", "0", "--out", str(out)]) == 0
    r = rows(out)
    assert len(r) == 2 and r[1][0] == "limit"
    assert float(r[1][3]) == pytest.approx(-2.0, abs=1e-9)


def test_footer_equals_apply_value(files):
    s, a = files["dir"] / "s3.csv", files["dir"] / "a3.csv"
    pts = files["dir"] / "one.json"
    pts.write_text("[[0.3]]")
    main(["pv-sweep", "riesz:1", "--function", files["h1"], "--point", "0.3", "--out", str(s)])
    main(["apply", "riesz:1", "--function", files["h1"], "--points", str(pts), "--out", str(a)])
    assert rows(s)[-1][3] == rows(a)[1][3]


def test_show_config_precedence(files, capsys):
    cfg = files["dir"] / "cfg.json"
    cfg.write_text(json.dumps({"dim": 2, "degree": 7, "tol": 1e-6}))
    assert main(["show-config", "--config", str(cfg), "--degree", "9"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["dim"] == 2 and data["degree"] == 9 and data["tol"] == 1e-6
    assert data["order"] == 21 and data["eta"] == 0.75


def test_show_config_defaults(capsys):
    main(["show-config"])
    data = json.loads(capsys.readouterr().out)
    assert data == {"beta": 1.0, "degree": 10, "dim": 1, "eta": 0.75, "order": 22, "out": None, "tol": 1e-05}


@pytest.mark.parametrize("argv", [["show-config", "--dim", "4"], ["show-config", "--degree", "61"],
                                  ["show-config", "--tol", "1e-13"]])
def test_config_invariants(argv):
    assert main(argv) == 2


def test_bad_config_keys(files):
    cfg = files["dir"] / "cfg.json"
    cfg.write_text(json.dumps({"dimension": 2}))
    assert main(["show-config", "--config", str(cfg)]) == 2


def test_parse_operator():
    assert parse_operator("riesz:1,0", 2) == ("riesz", (1, 0))
    assert parse_operator("neg_power:1.5", 1) == ("neg_power", 1.5)
    for bad in ("riesz:1", "imaginary:0", "kbar:-1", "heat:-0.1", "riesz", "riesz:a"):
        with pytest.raises(UsageError):
            parse_operator(bad, 2)


def test_runconfig_validate():
    with pytest.raises(UsageError):
        RunConfig(dim=0).validate()


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "invgauss.cli", "show-config", "--dim", "3"], capture_output=True,
                       text=True, check=True)
    assert json.loads(r.stdout)["dim"] == 3
