"""Independent brute-force checkers used only by the test suite.

These deliberately avoid the library's code paths: the gain tail is
integrated numerically from the density instead of using the closed-form
partial sum, and chain occupancy is measured by sampling transitions row
by row instead of solving for the stationary vector.  They are slow and
exist to catch formula regressions, not to be fast.
"""

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class OracleReport:
    name: str
    oracle_value: float
    primary_value: float
    tolerance: float

    @property
    def abs_delta(self):
        return abs(self.oracle_value - self.primary_value)

    @property
    def rel_delta(self):
        scale = max(abs(self.oracle_value), abs(self.primary_value))
        return self.abs_delta / scale if scale else 0.0

    @property
    def passed(self):
        return self.abs_delta <= self.tolerance

    def __str__(self):
        verdict = "ok" if self.passed else "MISMATCH"
        return (f"{self.name}: oracle {self.oracle_value!r} vs primary "
                f"{self.primary_value!r} (|d| {self.abs_delta:.3e}, "
                f"tol {self.tolerance:.1e}) {verdict}")


def compare(name, oracle_value, primary_value, tolerance):
    return OracleReport(name, float(oracle_value), float(primary_value), tolerance)


def ccdf_by_quadrature(x, n_antennas, omega):
    """Pr{gain > x} by adaptive quadrature of the Gamma density.

    Integrates in the dimensionless variable s = t / omega so the
    integrand is well scaled for any omega.
    """
    norm = math.gamma(n_antennas)

    def density(s):
        return s ** (n_antennas - 1) * math.exp(-s) / norm

    value, err = integrate.quad(density, x / omega, math.inf,
                                epsabs=1e-13, epsrel=1e-11, limit=400)
    if err > 1e-10 + 1e-7 * abs(value):
        raise RuntimeError(f"quadrature did not converge (error bound {err:.2e})")
    return value


def occupancy_by_chain_walk(transition, steps, seed, start_state=0):
    """Visit frequencies of one long sampled trajectory of the chain.

    Transitions are drawn by inverse-CDF lookup on each row; the state
    after each step is counted.  Orders of magnitude slower than solving
    for the stationary vector, which is the point.
    """
    z = np.asarray(transition, dtype=float)
    cumulative = [row.tolist() for row in np.cumsum(z, axis=1)]
    top = z.shape[0] - 1
    counts = [0] * z.shape[0]
    state = start_state
    rng = np.random.default_rng(seed)
    remaining = int(steps)
    while remaining > 0:
        chunk = min(remaining, 1_000_000)
        for u in rng.random(chunk).tolist():
            state = min(bisect_right(cumulative[state], u), top)
            counts[state] += 1
        remaining -= chunk
    return np.array(counts, dtype=float) / steps


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())
