"""Shared fixtures.

Most tests perturb one knob of a common reference setup: 3 antennas,
1 W supply, 50% conversion, mean combined gain 3e-5, -90 dBm noise,
3 bits/block, 20 uJ battery in 100 steps.
"""

from dataclasses import replace

import pytest

from wpcn_dts import SystemParams

_BASE = dict(
    antenna_count=3,
    ap_power_w=1.0,
    efficiency=0.5,
    channel_variance=1e-5,
    noise_power_w=1e-12,
    bit_rate=3.0,
    capacity_j=2e-5,
    level_count=100,
)


@pytest.fixture
def make_params():
    def factory(**overrides):
        return SystemParams(**{**_BASE, **overrides})

    return factory


def perturb(params, **overrides):
    return replace(params, **overrides)
