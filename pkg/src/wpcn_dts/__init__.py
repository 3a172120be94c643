"""Analytical model and Monte Carlo simulator for a discrete time-switching
wireless-power protocol: a multi-antenna access point powers a single-antenna
source over the downlink, and the source spends quantized battery charge on
fixed-rate uplink transmissions."""

from .battery import (
    INFEASIBLE,
    BatteryConfig,
    level_energy,
    level_grid,
    quantize_harvest,
    quantize_harvest_levels,
    quantize_requirement,
    quantize_requirement_levels,
)
from .channel import dbm_to_watts, erlang_ccdf, pathloss_variance, sample_gain
from .params import SystemParams
from .markov import (
    NumericalError,
    build_transition_matrix,
    stationary_distribution,
    write_distribution_csv,
    write_matrix_csv,
)
from .analysis import (
    SWEEP_AXES,
    RateOptimum,
    SweepPoint,
    SweepSpec,
    ThroughputResult,
    dts_throughput,
    optimal_rate,
    sweep,
)
from .simulation import SimConfig, SimStats, measure_overflow, simulate_dts, simulate_htt

__version__ = "0.1.0"

__all__ = [
    "INFEASIBLE",
    "BatteryConfig",
    "NumericalError",
    "RateOptimum",
    "SWEEP_AXES",
    "SimConfig",
    "SimStats",
    "SweepPoint",
    "SweepSpec",
    "SystemParams",
    "ThroughputResult",
    "build_transition_matrix",
    "dbm_to_watts",
    "dts_throughput",
    "erlang_ccdf",
    "level_energy",
    "level_grid",
    "measure_overflow",
    "optimal_rate",
    "pathloss_variance",
    "quantize_harvest",
    "quantize_harvest_levels",
    "quantize_requirement",
    "quantize_requirement_levels",
    "sample_gain",
    "simulate_dts",
    "simulate_htt",
    "stationary_distribution",
    "sweep",
    "write_distribution_csv",
    "write_matrix_csv",
    "__version__",
]
