"""Average throughput, bit-rate optimization, and one-axis parameter sweeps."""

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import erlang_ccdf
from .markov import NumericalError, build_transition_matrix, stationary_distribution
from .params import SystemParams

__all__ = [
    "SWEEP_AXES",
    "ThroughputResult",
    "RateOptimum",
    "SweepSpec",
    "SweepPoint",
    "dts_throughput",
    "optimal_rate",
    "sweep",
]

SWEEP_AXES = ("ap_power_w", "bit_rate", "capacity_j", "level_count", "antenna_count")

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ThroughputResult:
    throughput: float
    stationary: np.ndarray
    params: SystemParams


def dts_throughput(params):
    """Long-run average throughput of the time-switching protocol, bits/block.

    Each battery level contributes its stationary probability times the
    chance that the block's quantized energy requirement fits within that
    level; an empty battery contributes nothing.  The result equals the
    fixed bit rate times the stationary probability of transmitting.
    """
    z = build_transition_matrix(params)
    pi = stationary_distribution(z)
    g_unit = params.requirement_unit_gain
    affordable = np.array(
        [
            erlang_ccdf(g_unit / i, params.antenna_count, params.channel_variance)
            for i in range(1, params.level_count + 1)
        ]
    )
    phi = params.bit_rate * float(pi[1:] @ affordable)
    return ThroughputResult(min(phi, params.bit_rate), pi, params)


@dataclass(frozen=True)
class RateOptimum:
    rate: float
    throughput: float
    boundary: bool  # the maximum sat on the search boundary; widen the range


def optimal_rate(params, r_min, r_max, resolution=1e-3):
    """Bit rate maximizing the average throughput.

    A coarse grid scan locates the best bracket, then golden-section search
    shrinks it below ``resolution``.  The best rate seen across every
    evaluation is returned, so the reported throughput is exactly the model
    value at the reported rate.  ``boundary`` flags a maximum pinned to
    r_min or r_max, where the true optimum likely lies outside the range.
    """
    if not (0 < r_min <= r_max and math.isfinite(r_max)):
        raise ValueError(f"need 0 < r_min <= r_max, got [{r_min!r}, {r_max!r}]")
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution!r}")

    def phi(rate):
        return dts_throughput(replace(params, bit_rate=float(rate))).throughput

    if r_min == r_max:
        return RateOptimum(float(r_min), phi(r_min), False)

    count = min(33, max(5, math.ceil((r_max - r_min) / resolution) + 1))
    grid = np.linspace(r_min, r_max, count)
    values = [phi(r) for r in grid]
    k = int(np.argmax(values))
    best_rate, best_phi = float(grid[k]), values[k]
    boundary = k in (0, count - 1)

    lo = float(grid[max(k - 1, 0)])
    hi = float(grid[min(k + 1, count - 1)])
    c = hi - _INV_GOLDEN * (hi - lo)
    d = lo + _INV_GOLDEN * (hi - lo)
    fc, fd = phi(c), phi(d)
    while hi - lo > resolution:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_GOLDEN * (hi - lo)
            fc = phi(c)
            if fc > best_phi:
                best_rate, best_phi = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_GOLDEN * (hi - lo)
            fd = phi(d)
            if fd > best_phi:
                best_rate, best_phi = d, fd
    return RateOptimum(best_rate, best_phi, boundary)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    base: SystemParams

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if len(self.values) == 0:
            raise ValueError("sweep grid must be nonempty")


@dataclass(frozen=True)
class SweepPoint:
    value: float
    throughput: float  # NaN when the point failed
    error: str | None = None


def sweep(spec):
    """Analytical throughput at every grid value along one parameter axis.

    Per-point failures (invalid parameter combinations, solver breakdowns)
    are recorded in the returned rows instead of aborting the sweep.
    """
    rows = []
    for value in spec.values:
        try:
            point = replace(spec.base, **{spec.axis: value})
            rows.append(SweepPoint(value, dts_throughput(point).throughput))
        except (ValueError, NumericalError, np.linalg.LinAlgError) as exc:
            rows.append(SweepPoint(value, math.nan, str(exc)))
    return rows
