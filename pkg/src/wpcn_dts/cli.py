"""Command-line front end: flat key=value configs, flag overrides, CSV output.

Subcommands: analyze (analytical sweep), simulate (Monte Carlo sweep),
optimize-rate (best fixed bit rate), compare-htt (protocol vs the
fixed-split surrogate baseline along one axis).  Every output CSV starts
with a ``# key = value`` metadata block that re-parses into the exact
configuration that produced it.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .analysis import SweepSpec, optimal_rate, sweep
from .channel import dbm_to_watts, pathloss_variance
from .markov import NumericalError
from .params import SystemParams
from .simulation import SimConfig, simulate_dts, simulate_htt

__all__ = ["ConfigError", "ExperimentConfig", "build_config", "read_csv_metadata", "main", "run"]


class ConfigError(Exception):
    pass


def _parse_kv(lines, source):
    """Parse flat 'key = value' text; '#' starts a comment line."""
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.split("#", 1)[0].strip()
        if not sep or not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _parse_grid(text):
    """Comma list ('1,2,5') or inclusive range ('20:46:2') of floats."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("range grids take start:stop:step")
            start, stop, step = (float(p) for p in parts)
            if step <= 0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-6)) + 1
            return tuple(start + k * step for k in range(count))
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None


# k/20 instead of accumulated 0.05 steps so the metadata echo prints clean
_DEFAULT_TAU_GRID = tuple(k / 20 for k in range(1, 20))

_AXIS_FIELDS = {
    "p_dbm": "ap_power_w",
    "rate": "bit_rate",
    "capacity": "capacity_j",
    "levels": "level_count",
    "antennas": "antenna_count",
}

# fixed echo order keeps same-config outputs byte-identical
_ECHO_KEYS = (
    "n_antennas", "p_watts", "eta", "distance", "alpha", "noise_dbm",
    "rate", "capacity", "levels", "seed", "blocks", "warmup", "battery_mode",
    "axis", "grid", "tau_grid", "r_min", "r_max", "r_resolution",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully resolved experiment: defaults, then file, then flags."""

    n_antennas: int = 3
    p_watts: float = 1.0  # 30 dBm
    eta: float = 0.5
    distance: float = 10.0
    alpha: float = 2.0
    noise_dbm: float = -90.0
    rate: float = 3.0
    capacity: float = 2e-5
    levels: int = 100
    seed: int = 1
    blocks: int = 100_000
    warmup: int | None = None
    battery_mode: str = "discrete"
    axis: str | None = None
    grid: tuple = ()
    tau_grid: tuple = _DEFAULT_TAU_GRID
    r_min: float = 0.5
    r_max: float = 10.0
    r_resolution: float = 0.01
    out: str | None = None
    trace: str | None = None

    def __post_init__(self):
        if self.battery_mode not in ("discrete", "continuous"):
            raise ConfigError(f"battery_mode must be discrete or continuous, got {self.battery_mode!r}")
        if self.axis is not None and self.axis not in _AXIS_FIELDS:
            raise ConfigError(f"axis must be one of {sorted(_AXIS_FIELDS)}, got {self.axis!r}")
        if self.blocks < 1:
            raise ConfigError(f"blocks must be positive, got {self.blocks!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed!r}")
        if self.warmup is not None and not 0 <= self.warmup < self.blocks:
            raise ConfigError(f"warmup must lie in [0, blocks), got {self.warmup!r}")
        for tau in self.tau_grid:
            if not 0.0 < tau < 1.0:
                raise ConfigError(f"tau_grid values must lie in (0, 1), got {tau!r}")
        if not 0 < self.r_min <= self.r_max:
            raise ConfigError(f"need 0 < r_min <= r_max, got [{self.r_min}, {self.r_max}]")
        if self.r_resolution <= 0:
            raise ConfigError(f"r_resolution must be positive, got {self.r_resolution!r}")


def _cast_int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def _cast_float(key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


_INT_KEYS = ("n_antennas", "levels", "seed", "blocks", "warmup")
_FLOAT_KEYS = ("p_dbm", "p_watts", "eta", "distance", "alpha", "noise_dbm",
               "rate", "capacity", "r_min", "r_max", "r_resolution")
_STR_KEYS = ("battery_mode", "axis", "out", "trace")
_GRID_KEYS = ("grid", "tau_grid")


def _cast_value(key, raw):
    if key in _INT_KEYS:
        return _cast_int(key, raw)
    if key in _FLOAT_KEYS:
        return _cast_float(key, raw)
    if key in _GRID_KEYS:
        return _parse_grid(raw)
    if key in _STR_KEYS:
        return str(raw)
    raise ConfigError(f"unknown config key {key!r}")


def build_config(file_values, flag_values):
    """Defaults overlaid with config-file values, then with flag values."""
    if "p_dbm" in file_values and "p_watts" in file_values:
        raise ConfigError("give exactly one of p_dbm and p_watts")
    merged = {}
    for key, raw in file_values.items():
        value = _cast_value(key, raw)
        if key == "p_dbm":
            merged["p_watts"] = dbm_to_watts(value)
        else:
            merged[key] = value
    for key, value in flag_values.items():
        if value is None:
            continue
        if key == "p_dbm":
            merged["p_watts"] = dbm_to_watts(value)
        elif key in _GRID_KEYS and isinstance(value, str):
            merged[key] = _parse_grid(value)
        else:
            merged[key] = value
    known = {f.name for f in fields(ExperimentConfig)}
    for key in merged:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    return ExperimentConfig(**merged)


def _format_value(value):
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_metadata(handle, cfg):
    for key in _ECHO_KEYS:
        value = getattr(cfg, key)
        if value is None or (isinstance(value, tuple) and not value):
            continue
        handle.write(f"# {key} = {_format_value(value)}\n")


def read_csv_metadata(path):
    """Rebuild the ExperimentConfig echoed in an output file's comments."""
    with open(path) as handle:
        lines = [line.lstrip("#").strip() for line in handle if line.startswith("#")]
    return build_config(_parse_kv(lines, source=path), {})


def _system_params(cfg, **overrides):
    kwargs = dict(
        antenna_count=cfg.n_antennas,
        ap_power_w=cfg.p_watts,
        efficiency=cfg.eta,
        channel_variance=pathloss_variance(cfg.distance, cfg.alpha),
        noise_power_w=dbm_to_watts(cfg.noise_dbm),
        bit_rate=cfg.rate,
        capacity_j=cfg.capacity,
        level_count=cfg.levels,
    )
    kwargs.update(overrides)
    return SystemParams(**kwargs)


def _require_axis(cfg):
    if cfg.axis is None:
        raise ConfigError("this command needs an axis (config key 'axis' or --axis)")
    if not cfg.grid:
        raise ConfigError("this command needs a nonempty grid (config key 'grid' or --grid)")
    return cfg.axis, cfg.grid


def _axis_param_value(axis, value):
    if axis == "p_dbm":
        return dbm_to_watts(value)
    if axis in ("levels", "antennas"):
        if value != int(value):
            raise ConfigError(f"{axis} grid values must be integers, got {value!r}")
        return int(value)
    return value


def _open_out(cfg):
    if not cfg.out:
        raise ConfigError("output path required (config key 'out' or --out)")
    return open(cfg.out, "w", newline="")


def _sim_config(cfg):
    try:
        return SimConfig(cfg.blocks, cfg.seed, cfg.battery_mode, cfg.warmup)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_analyze(cfg):
    axis, values = _require_axis(cfg)
    spec = SweepSpec(
        axis=_AXIS_FIELDS[axis],
        values=tuple(_axis_param_value(axis, v) for v in values),
        base=_system_params(cfg),
    )
    points = sweep(spec)
    with _open_out(cfg) as handle:
        _write_metadata(handle, cfg)
        writer = csv.writer(handle)
        writer.writerow(["axis", "phi_analytical"])
        for raw, point in zip(values, points):
            writer.writerow([repr(float(raw)), repr(point.throughput)])
            if point.error:
                print(f"warning: point {raw}: {point.error}", file=sys.stderr)


def cmd_simulate(cfg):
    axis, values = _require_axis(cfg)
    sim_cfg = _sim_config(cfg)
    if cfg.trace and len(values) != 1:
        raise ConfigError("per-block tracing needs a single-point grid")
    with _open_out(cfg) as handle:
        _write_metadata(handle, cfg)
        writer = csv.writer(handle)
        writer.writerow(["axis", "phi_sim", "ci_halfwidth", "overflow_prob", "it_fraction"])
        for raw in values:
            params = _system_params(cfg, **{_AXIS_FIELDS[axis]: _axis_param_value(axis, raw)})
            stats = simulate_dts(params, sim_cfg, trace_path=cfg.trace)
            writer.writerow([
                repr(float(raw)),
                repr(stats.avg_throughput),
                repr(stats.confidence_halfwidth),
                repr(stats.overflow_probability),
                repr(stats.it_fraction),
            ])


def cmd_optimize_rate(cfg):
    params = _system_params(cfg)
    try:
        best = optimal_rate(params, cfg.r_min, cfg.r_max, cfg.r_resolution)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if best.boundary:
        print("warning: optimum sits on the search boundary; widen r_min/r_max",
              file=sys.stderr)
    with _open_out(cfg) as handle:
        _write_metadata(handle, cfg)
        writer = csv.writer(handle)
        writer.writerow(["optimal_rate", "throughput"])
        writer.writerow([repr(best.rate), repr(best.throughput)])


def cmd_compare_htt(cfg):
    axis, values = _require_axis(cfg)
    sim_cfg = _sim_config(cfg)
    with _open_out(cfg) as handle:
        _write_metadata(handle, cfg)
        writer = csv.writer(handle)
        writer.writerow(["axis", "phi_dts", "phi_htt", "tau_star",
                         "overflow_dts", "overflow_htt"])
        for raw in values:
            params = _system_params(cfg, **{_AXIS_FIELDS[axis]: _axis_param_value(axis, raw)})
            dts = simulate_dts(params, sim_cfg)
            tau_star, htt = simulate_htt(params, sim_cfg, cfg.tau_grid)
            writer.writerow([
                repr(float(raw)),
                repr(dts.avg_throughput),
                repr(htt.avg_throughput),
                repr(float(tau_star)),
                repr(dts.overflow_probability),
                repr(htt.overflow_probability),
            ])


_COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "optimize-rate": cmd_optimize_rate,
    "compare-htt": cmd_compare_htt,
}


def _build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="PATH", help="flat key = value config file")
    shared.add_argument("--out", metavar="PATH", help="output CSV path")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--blocks", type=int)
    shared.add_argument("--warmup", type=int)
    shared.add_argument("--battery-mode", dest="battery_mode",
                        choices=["discrete", "continuous"])
    shared.add_argument("--n-antennas", dest="n_antennas", type=int)
    shared.add_argument("--p-dbm", dest="p_dbm", type=float)
    shared.add_argument("--rate", type=float)
    shared.add_argument("--capacity", type=float)
    shared.add_argument("--levels", type=int)
    shared.add_argument("--distance", type=float)
    shared.add_argument("--alpha", type=float)
    shared.add_argument("--noise-dbm", dest="noise_dbm", type=float)
    shared.add_argument("--eta", type=float)
    shared.add_argument("--axis", choices=sorted(_AXIS_FIELDS))
    shared.add_argument("--grid", help="comma list or start:stop:step")

    parser = argparse.ArgumentParser(
        prog="wpcn-dts",
        description="Throughput analysis and simulation of a discrete "
                    "time-switching wireless-power protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[shared],
                   help="analytical throughput along one axis")
    sim = sub.add_parser("simulate", parents=[shared],
                         help="Monte Carlo throughput along one axis")
    sim.add_argument("--trace", metavar="PATH",
                     help="per-block CSV trace (single-point grids only)")
    opt = sub.add_parser("optimize-rate", parents=[shared],
                         help="bit rate maximizing analytical throughput")
    opt.add_argument("--r-min", dest="r_min", type=float)
    opt.add_argument("--r-max", dest="r_max", type=float)
    opt.add_argument("--r-resolution", dest="r_resolution", type=float)
    cmp_ = sub.add_parser("compare-htt", parents=[shared],
                          help="simulate the protocol against the fixed-split surrogate")
    cmp_.add_argument("--tau-grid", dest="tau_grid",
                      help="split fractions, comma list or start:stop:step")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        file_values = {}
        if args.config:
            try:
                with open(args.config) as handle:
                    file_values = _parse_kv(handle, args.config)
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}") from None
        flag_values = {
            key: value
            for key, value in vars(args).items()
            if key not in ("command", "config") and value is not None
        }
        cfg = build_config(file_values, flag_values)
        try:
            _COMMANDS[args.command](cfg)
        except ValueError as exc:
            # parameter combinations rejected by the model layer
            raise ConfigError(str(exc)) from None
    except ConfigError as exc:
        print(f"CONFIG_ERROR: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"NUMERICAL_ERROR: {exc}", file=sys.stderr)
        return 3
    return 0


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
