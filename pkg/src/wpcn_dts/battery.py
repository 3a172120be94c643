"""Discrete battery levels and the two quantization rules.

The battery holds one of ``level_count + 1`` evenly spaced charge states
between empty and ``capacity_j``.  Harvested energy rounds DOWN to the
highest level strictly below it (never crediting energy that was not
harvested); the transmit-energy requirement rounds UP to the lowest level
strictly above it (so a feasible discrete requirement always covers an
outage-free transmission).  Energy exactly on a level boundary therefore
maps to the adjacent level, in the conservative direction, in both rules.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "INFEASIBLE",
    "BatteryConfig",
    "level_energy",
    "level_grid",
    "quantize_harvest",
    "quantize_requirement",
]

# Distinguished quantize_requirement result: the requirement meets or exceeds
# the full capacity, so no stored charge can ever cover it and the protocol
# must keep harvesting.  +inf compares correctly against every level index.
INFEASIBLE = math.inf


@dataclass(frozen=True)
class BatteryConfig:
    capacity_j: float
    level_count: int

    def __post_init__(self):
        if not (self.capacity_j > 0 and math.isfinite(self.capacity_j)):
            raise ValueError(f"capacity must be positive, got {self.capacity_j!r}")
        if self.level_count != int(self.level_count) or self.level_count < 1:
            raise ValueError(
                f"level_count must be a positive integer, got {self.level_count!r}"
            )

    @property
    def unit_j(self):
        """Energy spacing between adjacent levels."""
        return self.capacity_j / self.level_count


def level_energy(level, cfg):
    """Stored energy in joules at a given level index."""
    if level != int(level) or not 0 <= level <= cfg.level_count:
        raise IndexError(
            f"level must be an integer in [0, {cfg.level_count}], got {level!r}"
        )
    return level * (cfg.capacity_j / cfg.level_count)


def level_grid(cfg):
    """Energies of all level_count + 1 levels, ascending.

    Built with the same product as level_energy so comparisons against the
    grid and against level_energy agree bit for bit.
    """
    return np.arange(cfg.level_count + 1) * (cfg.capacity_j / cfg.level_count)


def quantize_harvest(energy_j, cfg):
    """Highest level strictly below the harvested energy.

    Zero harvest maps to level 0 (there is no level below empty) and
    anything above capacity saturates at the top level.
    """
    if not energy_j >= 0:
        raise ValueError(f"harvested energy must be nonnegative, got {energy_j!r}")
    idx = int(np.searchsorted(level_grid(cfg), energy_j, side="left")) - 1
    return min(max(idx, 0), cfg.level_count)


def quantize_requirement(energy_j, cfg):
    """Lowest level strictly above the required energy, or INFEASIBLE.

    Requirements at or above capacity return INFEASIBLE rather than a level
    index: the battery can never store enough for them.
    """
    if not energy_j > 0:
        raise ValueError(f"required energy must be positive, got {energy_j!r}")
    idx = int(np.searchsorted(level_grid(cfg), energy_j, side="right"))
    return INFEASIBLE if idx > cfg.level_count else idx


def quantize_harvest_levels(energies_j, cfg):
    """Vectorized quantize_harvest for simulation hot paths.

    Same boundary conventions as the scalar rule; assumes nonnegative
    inputs (gains are).  Returns an int level array.
    """
    idx = np.searchsorted(level_grid(cfg), np.asarray(energies_j), side="left") - 1
    return np.clip(idx, 0, cfg.level_count)


def quantize_requirement_levels(energies_j, cfg):
    """Vectorized quantize_requirement; assumes positive inputs.

    Infeasible requirements come back as level_count + 1, an integer
    sentinel no stored level can ever reach (the scalar rule's INFEASIBLE
    cannot live in an int array).
    """
    return np.searchsorted(level_grid(cfg), np.asarray(energies_j), side="right")
