"""System parameter bundle shared by the analytical model and the simulator."""

import math
from dataclasses import dataclass

from .battery import BatteryConfig

__all__ = ["SystemParams"]


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol constants of one link configuration.

    Powers are in watts and energies in joules.  ``bit_rate`` is the fixed
    uplink spectral efficiency in bits/s/Hz, credited once per unit-length
    block when a transmission happens.  ``channel_variance`` is the
    per-antenna fading power (pathloss included), identical for both link
    directions.
    """

    antenna_count: int
    ap_power_w: float
    efficiency: float
    channel_variance: float
    noise_power_w: float
    bit_rate: float
    capacity_j: float
    level_count: int

    def __post_init__(self):
        if self.antenna_count != int(self.antenna_count) or self.antenna_count < 1:
            raise ValueError(
                f"antenna_count must be a positive integer, got {self.antenna_count!r}"
            )
        if self.level_count != int(self.level_count) or self.level_count < 1:
            raise ValueError(
                f"level_count must be a positive integer, got {self.level_count!r}"
            )
        for name in ("ap_power_w", "channel_variance", "noise_power_w", "bit_rate", "capacity_j"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.efficiency!r}")

    @property
    def snr_threshold(self):
        """Received SNR needed to sustain bit_rate over one block."""
        return 2.0 ** self.bit_rate - 1.0

    @property
    def battery(self):
        return BatteryConfig(self.capacity_j, self.level_count)

    @property
    def harvest_unit_gain(self):
        """Downlink gain that harvests exactly one battery unit of energy."""
        return self.capacity_j / (self.efficiency * self.ap_power_w * self.level_count)

    @property
    def requirement_unit_gain(self):
        """Uplink gain at which the outage-free transmit energy equals one unit."""
        return self.snr_threshold * self.noise_power_w * self.level_count / self.capacity_j
