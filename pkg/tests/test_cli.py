"""Command-line behavior: config layering, CSV contracts, exit codes.

Most tests drive main() in process with an argv list, which exercises the
full parsing and dispatch path without interpreter startup; one subprocess
test at the bottom checks the actual module entry point.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from wpcn_dts import NumericalError, SimConfig, dts_throughput, optimal_rate, simulate_dts
from wpcn_dts import cli
from wpcn_dts.cli import ConfigError, ExperimentConfig, build_config, main, read_csv_metadata

GOLDEN = Path(__file__).parent / "data" / "simulate_small.csv"

BASE_FILE = """\
# reference sweep used across the CLI tests
axis = p_dbm
grid = 26:30:2
levels = 50
seed = 9
blocks = 20000
"""


def write_config(tmp_path, text=BASE_FILE, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_rows(path):
    lines = [l for l in Path(path).read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def test_analyze_schema_and_metadata_round_trip(tmp_path):
    cfg_path = write_config(tmp_path)
    out = tmp_path / "a.csv"
    assert main(["analyze", "--config", str(cfg_path), "--out", str(out)]) == 0

    header, rows = read_rows(out)
    assert header == ["axis", "phi_analytical"]
    assert [r[0] for r in rows] == ["26.0", "28.0", "30.0"]
    for _, phi in rows:
        assert 0.0 < float(phi) < 3.0

    parsed = read_csv_metadata(out)
    assert parsed == ExperimentConfig(
        levels=50, seed=9, blocks=20000, axis="p_dbm", grid=(26.0, 28.0, 30.0)
    )


def test_analyze_matches_library(tmp_path, make_params):
    cfg_path = write_config(tmp_path)
    out = tmp_path / "a.csv"
    main(["analyze", "--config", str(cfg_path), "--out", str(out)])
    _, rows = read_rows(out)
    # defaults: distance 10 alpha 2 -> variance 1e-5, noise -90 dBm -> 1e-12
    want = dts_throughput(make_params(level_count=50, ap_power_w=10 ** ((28 - 30) / 10)))
    assert float(rows[1][1]) == want.throughput


def test_simulate_schema_and_determinism(tmp_path):
    cfg_path = write_config(tmp_path)
    out_a, out_b = tmp_path / "s1.csv", tmp_path / "s2.csv"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out_a)]) == 0
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    header, rows = read_rows(out_a)
    assert header == ["axis", "phi_sim", "ci_halfwidth", "overflow_prob", "it_fraction"]
    assert len(rows) == 3


def test_simulate_matches_library(tmp_path, make_params):
    out = tmp_path / "s.csv"
    main(["simulate", "--axis", "rate", "--grid", "3", "--levels", "20",
          "--seed", "21", "--blocks", "5000", "--out", str(out)])
    _, rows = read_rows(out)
    stats = simulate_dts(make_params(level_count=20), SimConfig(5000, 21))
    assert float(rows[0][1]) == stats.avg_throughput
    assert float(rows[0][3]) == stats.overflow_probability


def test_flag_overrides_config_file(tmp_path):
    cfg_path = write_config(tmp_path)
    out = tmp_path / "a.csv"
    main(["analyze", "--config", str(cfg_path), "--levels", "10", "--out", str(out)])
    assert read_csv_metadata(out).levels == 10


def test_p_dbm_converts_to_watts(tmp_path):
    cfg_path = write_config(tmp_path, BASE_FILE + "p_dbm = 36\n")
    out = tmp_path / "a.csv"
    main(["analyze", "--config", str(cfg_path), "--out", str(out)])
    assert read_csv_metadata(out).p_watts == pytest.approx(3.9810717055349722, rel=1e-15)


def test_grid_parsing_forms():
    cfg = build_config({"grid": "1,2,5", "axis": "rate"}, {})
    assert cfg.grid == (1.0, 2.0, 5.0)
    cfg = build_config({"grid": "20:46:2", "axis": "p_dbm"}, {})
    assert len(cfg.grid) == 14 and cfg.grid[0] == 20.0 and cfg.grid[-1] == 46.0
    cfg = build_config({"tau_grid": "0.1,0.9"}, {})
    assert cfg.tau_grid == (0.1, 0.9)
    with pytest.raises(ConfigError):
        build_config({"grid": "2:1:1", "axis": "rate"}, {})
    with pytest.raises(ConfigError):
        build_config({"grid": "1:2", "axis": "rate"}, {})
    with pytest.raises(ConfigError):
        build_config({"grid": "a,b", "axis": "rate"}, {})


def test_optimize_rate_output(tmp_path, make_params):
    out = tmp_path / "r.csv"
    rc = main(["optimize-rate", "--levels", "50", "--r-min", "1", "--r-max", "8",
               "--out", str(out)])
    assert rc == 0
    header, rows = read_rows(out)
    assert header == ["optimal_rate", "throughput"]
    assert len(rows) == 1
    best = optimal_rate(make_params(level_count=50), 1.0, 8.0, 0.01)
    assert float(rows[0][0]) == best.rate
    assert float(rows[0][1]) == best.throughput


def test_optimize_rate_boundary_warning(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["optimize-rate", "--levels", "30", "--r-min", "1", "--r-max", "2",
                 "--out", str(out)]) == 0
    assert "boundary" in capsys.readouterr().err


def test_compare_htt_schema(tmp_path):
    out = tmp_path / "c.csv"
    rc = main(["compare-htt", "--axis", "capacity", "--grid", "1e-5,2e-5",
               "--levels", "30", "--blocks", "3000", "--seed", "2",
               "--tau-grid", "0.2,0.8", "--out", str(out)])
    assert rc == 0
    header, rows = read_rows(out)
    assert header == ["axis", "phi_dts", "phi_htt", "tau_star",
                      "overflow_dts", "overflow_htt"]
    assert len(rows) == 2
    for row in rows:
        assert float(row[3]) in (0.2, 0.8)
        assert 0.0 <= float(row[4]) <= 1.0


def test_trace_flag(tmp_path):
    out = tmp_path / "s.csv"
    trace = tmp_path / "t.csv"
    rc = main(["simulate", "--axis", "rate", "--grid", "3", "--levels", "10",
               "--blocks", "300", "--seed", "1", "--out", str(out),
               "--trace", str(trace)])
    assert rc == 0
    assert trace.read_text().splitlines()[0] == "block,mode,stored_j,bits"

    rc = main(["simulate", "--axis", "rate", "--grid", "2,3", "--levels", "10",
               "--blocks", "300", "--seed", "1", "--out", str(out),
               "--trace", str(trace)])
    assert rc == 2


@pytest.mark.parametrize(
    "file_text,needle",
    [
        (BASE_FILE + "bogus_key = 1\n", "unknown config key"),
        (BASE_FILE + "p_dbm = 30\np_watts = 1\n", "exactly one"),
        (BASE_FILE + "battery_mode = hybrid\n", "battery_mode"),
        (BASE_FILE + "warmup = 20000\n", "warmup"),
        (BASE_FILE + "seed = -3\n", "seed"),
        (BASE_FILE + "levels = 10\n", "duplicate"),
        ("axis = rate\ngrid = 3\nlevels = ten\n", "integer"),
        ("axis p_dbm\ngrid = 26,28\n", "key = value"),
    ],
)
def test_config_errors_exit_2(tmp_path, capsys, file_text, needle):
    cfg_path = write_config(tmp_path, file_text)
    rc = main(["analyze", "--config", str(cfg_path), "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    err = capsys.readouterr().err
    assert err.startswith("CONFIG_ERROR: ")
    assert needle in err


def test_missing_axis_out_and_file_exit_2(tmp_path, capsys):
    assert main(["analyze", "--out", str(tmp_path / "x.csv")]) == 2
    assert "axis" in capsys.readouterr().err
    assert main(["analyze", "--axis", "rate", "--grid", "1,2"]) == 2
    assert "output path" in capsys.readouterr().err
    assert main(["analyze", "--config", str(tmp_path / "nope.ini"),
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_model_rejection_exits_2(tmp_path, capsys):
    # integer-valued axis with a fractional grid point
    rc = main(["analyze", "--axis", "levels", "--grid", "10.5",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "integer" in capsys.readouterr().err
    # a parameter the model layer itself refuses
    rc = main(["analyze", "--axis", "rate", "--grid", "3", "--eta", "1.5",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_numerical_failure_exits_3(tmp_path, capsys, monkeypatch):
    def boom(cfg):
        raise NumericalError("synthetic solver breakdown")

    monkeypatch.setitem(cli._COMMANDS, "analyze", boom)
    rc = main(["analyze", "--axis", "rate", "--grid", "3",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 3
    assert capsys.readouterr().err.startswith("NUMERICAL_ERROR: ")


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_golden_simulate_output(tmp_path):
    # pins the full output byte stream (metadata echo, float formatting,
    # sampled values); regenerate with the same command if the RNG stream
    # of a future numpy release shifts
    out = tmp_path / "g.csv"
    rc = main(["simulate", "--axis", "p_dbm", "--grid", "30", "--levels", "10",
               "--seed", "7", "--blocks", "500", "--out", str(out)])
    assert rc == 0
    assert out.read_bytes() == GOLDEN.read_bytes()


def test_module_entry_point(tmp_path):
    out = tmp_path / "a.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "wpcn_dts", "analyze", "--axis", "rate",
         "--grid", "3", "--levels", "10", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
    _, rows = read_rows(out)
    assert len(rows) == 1
