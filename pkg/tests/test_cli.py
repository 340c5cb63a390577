import csv
import json
import subprocess
import sys

import pytest

from conic_mfbm.cli import (CSV_COLUMNS, ConfigError, config_from_dict, parse_config, parse_vary,
                            price_point, run, write_csv)

from conftest import P_STAR_JUMPS, P_STAR_MODEL

BASE = {**P_STAR_MODEL, "lambda": P_STAR_JUMPS["lam"], "mu1": P_STAR_JUMPS["mu1"],
        "sigma1_sq": P_STAR_JUMPS["sigma1_sq"], "strike": 100.0, "kind": "call"}


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(BASE))
    return path


def test_price_emits_one_json_line(cfg_path, capsys):
    assert run(["price", "--config", str(cfg_path), "--gamma", "0.25"]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 1
    row = json.loads(out)
    assert list(row) == list(CSV_COLUMNS)
    assert row["bid"] < row["ask"] and row["gamma"] == 0.25


def test_negative_gamma_warns(cfg_path, capsys):
    assert run(["price", "--config", str(cfg_path), "--gamma", "-0.1"]) == 0
    err = capsys.readouterr().err
    assert "warn: gamma outside [0,1]" in err


def test_sweep_rows_and_spread(cfg_path, tmp_path):
    out = tmp_path / "q.csv"
    assert run(["sweep", "--config", str(cfg_path), "--vary", "gamma=0:0.5:0.05",
                "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    rows = list(csv.DictReader(lines))
    assert len(rows) == 11
    assert [float(r["gamma"]) for r in rows] == [round(0.05 * i, 2) for i in range(11)]
    spreads = [float(r["spread"]) for r in rows]
    assert all(b >= a for a, b in zip(spreads, spreads[1:]))


def test_sweep_is_byte_identical(cfg_path, tmp_path):
    outs = []
    for name, jobs in (("a.csv", "1"), ("b.csv", "1"), ("c.csv", "2")):
        out = tmp_path / name
        assert run(["sweep", "--config", str(cfg_path), "--vary", "gamma=0:0.5:0.05",
                    "--vary", "strike=90:110:10", "--jobs", jobs, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_cartesian_order(cfg_path, capsys):
    assert run(["sweep", "--config", str(cfg_path), "--vary", "gamma=0:0.1:0.1",
                "--vary", "strike=90:100:10"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [(r["gamma"], r["strike"]) for r in rows] == [("0", "90"), ("0", "100"),
                                                         ("0.1", "90"), ("0.1", "100")]


def test_empty_sweep_writes_header_only(tmp_path):
    out = tmp_path / "empty.csv"
    write_csv([], out)
    assert out.read_bytes() == (",".join(CSV_COLUMNS) + "\n").encode()


def test_csv_round_trip(tmp_path):
    row = price_point(config_from_dict({**BASE, "gamma": 0.3}))
    out = tmp_path / "one.csv"
    write_csv([row], out)
    back = next(csv.DictReader(out.open()))
    for key in CSV_COLUMNS:
        if isinstance(row[key], str):
            assert back[key] == row[key]
        else:
            assert float(back[key]) == float(f"{row[key]:.10g}")


def test_defaults_applied(cfg_path):
    cfg = parse_config(cfg_path)
    assert cfg.drift.value == "compensated"
    assert cfg.tail_tol == 1e-12 and cfg.quad_tol == 1e-8 and cfg.gamma == 0.0


def test_minimal_config_without_jumps():
    raw = {k: v for k, v in BASE.items() if k not in ("lambda", "mu1", "sigma1_sq")}
    cfg = config_from_dict(raw)
    assert cfg.jumps.lam == 0.0


def test_hurst_gate():
    with pytest.raises(ConfigError, match=r"\(0\.75, 1\]"):
        config_from_dict({**BASE, "hurst": 0.5})


def test_kind_case_insensitive():
    assert config_from_dict({**BASE, "kind": "CALL"}).option.kind.value == "call"
    assert config_from_dict({**BASE, "kind": "Put"}).option.kind.value == "put"


@pytest.mark.parametrize("bad", [{"volatility": 0.2}, {"kind": "straddle"}, {"s0": "100"},
                                 {"drift": "none"}, {"s0": -1.0}])
def test_invalid_fields(bad):
    with pytest.raises(ConfigError):
        config_from_dict({**BASE, **bad})


def test_missing_field_named():
    raw = dict(BASE)
    del raw["strike"]
    with pytest.raises(ConfigError, match="strike"):
        config_from_dict(raw)


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**BASE, "colour": "red"}))
    assert run(["price", "--config", str(bad)]) == 1
    assert capsys.readouterr().err.startswith("error:")
    assert run(["price", "--config", str(tmp_path / "nope.json")]) == 1
    bad.write_text("{not json")
    assert run(["price", "--config", str(bad)]) == 1
    assert run(["bogus"]) == 1


def test_non_convergence_exit_code(tmp_path, capsys):
    path = tmp_path / "tight.json"
    path.write_text(json.dumps({**BASE, "gamma": 0.3, "quad_tol": 1e-30}))
    assert run(["price", "--config", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_parse_vary():
    name, grid = parse_vary("gamma=0:0.5:0.05")
    assert name == "gamma" and len(grid) == 11 and grid[-1] == 0.5
    for spec in ("gamma", "gamma=0:1", "kind=0:1:1", "gamma=1:0:0.1", "gamma=0:1:0"):
        with pytest.raises(ConfigError):
            parse_vary(spec)


def test_check_subcommand(cfg_path, capsys):
    assert run(["check", "--config", str(cfg_path), "--gamma", "0.25",
                "--samples", "200000"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True
    for key in ("bid", "ask", "mc_bid", "mc_ask", "se_bid", "se_ask"):
        assert key in report


def test_stieltjes_method(cfg_path, capsys):
    assert run(["price", "--config", str(cfg_path), "--gamma", "0.2",
                "--method", "stieltjes", "--grid", "20000"]) == 0
    s = json.loads(capsys.readouterr().out)
    run(["price", "--config", str(cfg_path), "--gamma", "0.2"])
    q = json.loads(capsys.readouterr().out)
    assert s["bid"] == pytest.approx(q["bid"], abs=1e-3)


def test_module_entry_point(cfg_path):
    proc = subprocess.run([sys.executable, "-m", "conic_mfbm", "price", "--config", str(cfg_path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["spread"] == pytest.approx(0.0, abs=2e-8 * 100)
