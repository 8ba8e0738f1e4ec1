import csv
import json
import math
import subprocess
import sys

import pytest

from selberg_lab.cli import CHECK_FAILED, OK, USAGE, main, run_subcommand
from selberg_lab.config import ConfigError, ExperimentConfig, load_config, parse_text


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def _manifest(out, name):
    return json.loads((out / f"{name}.manifest.json").read_text())


def test_predict_row(tmp_path):
    X = math.exp(10)
    grid = repr(math.exp(3))
    assert main(["predict", "--kind", "zeta", "--X", repr(X), "--grid", grid, "--out", str(tmp_path)]) == OK
    rows = _rows(tmp_path / "predict.csv")
    assert rows[0] == ["kind", "X", "param", "value", "normalized", "regime", "formula"]
    assert round(float(rows[1][4]), 5) == 4.58491
    assert rows[1][-1] == "MS"
    m = _manifest(tmp_path, "predict")
    assert m["status"] == 0 and m["inputs"]["kind"] == "riemann_zeta"
    assert {"numpy", "scipy", "python"} <= set(m["versions"])
    assert m["wall_time_s"] >= 0


def test_csv_seventeen_digits(tmp_path):
    main(["predict", "--kind", "delta", "--X", "1e6", "--grid", "r:3:10:4", "--out", str(tmp_path)])
    for row in _rows(tmp_path / "predict.csv")[1:]:
        mantissa = row[3].split("e")[0].lstrip("-").replace(".", "")
        assert len(mantissa) == 17


def test_variance_empty_grid(tmp_path):
    assert main(["variance", "--kind", "zeta", "--X", "1000", "--out", str(tmp_path)]) == OK
    rows = _rows(tmp_path / "variance.csv")
    assert len(rows) == 1
    m = _manifest(tmp_path, "variance")
    assert m["points"] == 0 and m["outputs"] == [str(tmp_path / "variance.csv")]


def test_variance_rerun_identical(tmp_path):
    args = ["variance", "--kind", "zeta", "--X", "5000", "--grid", "r:1:6:7"]
    assert main(args + ["--out", str(tmp_path / "a")]) == OK
    m = _manifest(tmp_path / "a", "variance")
    # replay from the recorded inputs alone
    cfg = ExperimentConfig(**{**m["inputs"], "out": str(tmp_path / "b")}).validate()
    cfg.a_invariants = None if cfg.a_invariants is None else tuple(cfg.a_invariants)
    cfg.zeros = tuple(cfg.zeros)
    cfg.bad_primes = tuple(cfg.bad_primes)
    assert run_subcommand("variance", cfg) == OK
    a = (tmp_path / "a" / "variance.csv").read_bytes()
    b = (tmp_path / "b" / "variance.csv").read_bytes()
    assert a == b and len(a.splitlines()) == 8


def test_bad_config_names_field(tmp_path, capsys):
    assert main(["variance", "--X", "-3", "--out", str(tmp_path)]) == USAGE
    assert "X:" in capsys.readouterr().err
    assert main(["variance", "--grid-kind", "sideways", "--out", str(tmp_path)]) == USAGE
    assert "grid_kind" in capsys.readouterr().err
    assert main(["predict", "--kind", "ec", "--out", str(tmp_path)]) == USAGE
    assert "kind" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    r = subprocess.run([sys.executable, "-m", "selberg_lab.cli", "frobnicate"], capture_output=True, text=True)
    assert r.returncode == 2
    assert "invalid choice" in r.stderr


def test_missing_subcommand_exits_2(capsys):
    assert main([]) == USAGE


def test_run_subcommand_rejects_unknown(tmp_path):
    with pytest.raises(ConfigError) as exc:
        run_subcommand("frobnicate", ExperimentConfig(out=str(tmp_path)).validate())
    assert exc.value.field == "subcommand"


def test_config_file(tmp_path):
    cfg_path = tmp_path / "exp.cfg"
    cfg_path.write_text(
        "# curve 37a\nkind = ec\na_invariants = 0, 0, 1, -1, 0\nconductor = 37\n"
        f"X = 1e4  # small\ngrid = r:2:5:3\nout = {tmp_path / 'o'}\n"
    )
    assert main(["predict", "--config", str(cfg_path), "--X", "2e4"]) == OK
    m = _manifest(tmp_path / "o", "predict")
    assert m["inputs"]["X"] == 2e4 and m["inputs"]["conductor"] == 37
    assert len(_rows(tmp_path / "o" / "predict.csv")) == 4


def test_hl_subcommand(tmp_path):
    assert main(["hl", "--kind", "zeta", "--X", "1e5", "--k", "2", "--out", str(tmp_path)]) == OK
    row = _rows(tmp_path / "hl.csv")[1]
    assert 0.9 <= float(row[-1]) <= 1.1


def test_paircorr_needs_zeros(tmp_path, capsys):
    assert main(["paircorr", "--out", str(tmp_path)]) == USAGE
    assert "zeros" in capsys.readouterr().err


def test_paircorr_and_explicit(tmp_path, zeros_file):
    out = str(tmp_path)
    assert main(["paircorr", "--zeros", str(zeros_file), "--X", "100", "--T", "1000", "--out", out]) == OK
    row = _rows(tmp_path / "paircorr.csv")[1]
    assert float(row[2]) > 0
    assert main(["explicit", "--zeros", str(zeros_file), "--X", "5000", "--samples", "5", "--out", out]) == OK
    assert _manifest(tmp_path, "explicit")["max_ratio"] <= 20


def test_tauberian_subcommand(tmp_path):
    assert main(["tauberian", "--out", str(tmp_path)]) == OK
    rows = _rows(tmp_path / "tauberian.csv")
    assert all(r[-1] == "1" for r in rows[1:])


def test_selftest_exit_zero(tmp_path, zeros_file):
    assert main(["selftest", "--zeros", str(zeros_file), "--out", str(tmp_path)]) == OK
    statuses = {r[0]: r[1] for r in _rows(tmp_path / "selftest.csv")[1:]}
    assert set(statuses.values()) == {"pass"}
    assert len(statuses) >= 30


# -- configuration ---------------------------------------------------------------------


def test_parse_text():
    d = parse_text("X = 1e5\n\n# comment\nP = 2000 # trailing\nreflect = no\nzeros = a.txt, b.txt\n")
    assert d == {"X": 1e5, "P": 2000, "reflect": False, "zeros": ("a.txt", "b.txt")}


def test_parse_errors():
    with pytest.raises(ConfigError) as exc:
        parse_text("colour = blue\n")
    assert exc.value.field == "colour"
    with pytest.raises(ConfigError) as exc:
        parse_text("X 5\n")
    assert exc.value.field == "line 1"
    with pytest.raises(ConfigError) as exc:
        parse_text("P = lots\n")
    assert exc.value.field == "P"


def test_grid_values(tmp_path):
    cfg = load_config(None, {"X": "1000", "grid": "r:1:3:3", "out": str(tmp_path)})
    assert cfg.grid_values() == pytest.approx([1000 * math.exp(-3), 1000 * math.exp(-2), 1000 * math.exp(-1)])
    assert cfg.table_length() == 2001
    cfg = load_config(None, {"X": "1000", "grid": "0.5,0.1", "grid_kind": "delta", "out": str(tmp_path)})
    assert cfg.grid_values().tolist() == [0.1, 0.5]
    assert cfg.table_length() == 1501
    with pytest.raises(ConfigError, match="grid"):
        load_config(None, {"X": "1000", "grid": "2000", "out": str(tmp_path)})
    with pytest.raises(ConfigError, match="grid"):
        load_config(None, {"grid": "r:1:x:3", "out": str(tmp_path)})


def test_unwritable_out(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigError) as exc:
        load_config(None, {"out": str(blocker / "sub")})
    assert exc.value.field == "out"


def test_kind_aliases(tmp_path):
    cfg = load_config(None, {"kind": "delta", "out": str(tmp_path)})
    assert cfg.kind == "ramanujan_delta" and cfg.descriptor().degree == 2.0
