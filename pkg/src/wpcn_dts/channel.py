"""Channel-gain statistics and unit helpers for the multi-antenna RF link.

Each antenna branch fades independently with circularly symmetric complex
Gaussian coefficients, so the combined power gain over ``n_antennas``
branches is Erlang distributed: Gamma(shape n_antennas, scale omega).
Both the downlink (energy) and uplink (information) gains follow this law.
"""

import math

__all__ = ["erlang_ccdf", "sample_gain", "dbm_to_watts", "pathloss_variance"]


def _validate_gain_params(n_antennas, omega):
    if n_antennas != int(n_antennas) or n_antennas < 1:
        raise ValueError(f"n_antennas must be a positive integer, got {n_antennas!r}")
    if not (omega > 0 and math.isfinite(omega)):
        raise ValueError(f"omega must be positive and finite, got {omega!r}")


def erlang_ccdf(x, n_antennas, omega):
    """Tail probability Pr{gain > x} of the combined power gain.

    Evaluates exp(-x/omega) * sum_{k < n} (x/omega)^k / k! with a
    multiplicative term recurrence.  Folding exp(-x/omega) into the first
    term keeps every summand at or below 1, so the sum neither overflows
    nor loses the leading digits for antenna counts in the hundreds.
    ``x = inf`` is accepted and returns 0.
    """
    _validate_gain_params(n_antennas, omega)
    if not x >= 0:  # also rejects NaN
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if math.isinf(x):
        return 0.0
    t = x / omega
    term = math.exp(-t)
    total = term
    for k in range(1, int(n_antennas)):
        term *= t / k
        total += term
    # the exact sum is a probability; rounding can creep a few ulp above 1
    return min(total, 1.0)


def sample_gain(n_antennas, omega, rng, size=None):
    """Draw combined power gains, one per fading block.

    Equivalent to summing ``n_antennas`` squared magnitudes of complex
    normal coefficients with per-branch variance ``omega``.  ``rng`` is a
    ``numpy.random.Generator``; a fixed seed reproduces the sequence
    bit for bit.  Returns a scalar when ``size`` is None, else an ndarray.
    """
    _validate_gain_params(n_antennas, omega)
    return rng.gamma(shape=int(n_antennas), scale=omega, size=size)


def dbm_to_watts(p_dbm):
    """Convert a power from dBm to watts."""
    if not math.isfinite(p_dbm):
        raise ValueError(f"power in dBm must be finite, got {p_dbm!r}")
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def pathloss_variance(distance_m, pathloss_exponent):
    """Per-branch channel power variance at a given link distance.

    Combines a fixed 30 dB reference attenuation at 1 m with d^-alpha
    distance decay.  The exponent is restricted to the usual terrestrial
    range [2, 5].
    """
    if not distance_m > 0:
        raise ValueError(f"distance must be positive, got {distance_m!r}")
    if not 2.0 <= pathloss_exponent <= 5.0:
        raise ValueError(
            f"pathloss exponent must lie in [2, 5], got {pathloss_exponent!r}"
        )
    return 1e-3 * distance_m ** (-pathloss_exponent)
