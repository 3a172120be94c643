"""Battery-level transition matrix and its stationary distribution.

The stored charge, observed at block boundaries, is a finite Markov chain
on the level indices 0..L.  A block either transmits (the state drops by
the quantized energy requirement, which is possible only when the stored
level covers it) or harvests (the state climbs by the quantized harvested
energy, saturating at full).  Every transition probability reduces to
differences of the Erlang gain tail evaluated at integer multiples of the
two per-unit gain thresholds, so the whole matrix costs O(L) tail
evaluations plus O(L^2) assembly.
"""

import csv
import warnings

import numpy as np

from .channel import erlang_ccdf

__all__ = [
    "NumericalError",
    "build_transition_matrix",
    "stationary_distribution",
    "write_matrix_csv",
    "write_distribution_csv",
]

# dense (L+1)^2 storage and O(L^3) direct solve; beyond this use a sparse method
_MAX_LEVELS = 2000

_ENTRY_SLACK = 1e-12
_ROWSUM_TOL = 1e-12


class NumericalError(RuntimeError):
    """Construction or solver failure that indicates a malformed chain."""


def build_transition_matrix(params):
    """Row-stochastic matrix of one-block battery-level transitions.

    Entry [i, j] is the probability that a block starting at level i ends
    at level j.  Rows below the diagonal come from transmissions (exact
    discharge by i - j units), the diagonal and above from harvesting
    scaled by the probability that the block's requirement was not
    affordable at level i.  Level 0 always harvests; a full battery moves
    only when the requirement fits inside it.

    Raises NumericalError if any assembled entry falls outside [0, 1] by
    more than 1e-12 or a row sum drifts from 1 by more than 1e-12; smaller
    excursions are clamped.
    """
    levels = params.level_count
    if levels > _MAX_LEVELS:
        raise ValueError(
            f"level_count {levels} exceeds the dense-solver limit {_MAX_LEVELS}"
        )
    n = params.antenna_count
    omega = params.channel_variance
    h_unit = params.harvest_unit_gain
    g_unit = params.requirement_unit_gain

    # harvest_tail[k] = Pr{harvested energy exceeds k battery units}
    # fits[k]         = Pr{required energy is at most k battery units}
    harvest_tail = np.array(
        [erlang_ccdf(k * h_unit, n, omega) for k in range(levels + 1)]
    )
    fits = np.empty(levels + 1)
    fits[0] = 0.0  # a positive requirement never fits in zero units
    fits[1:] = [erlang_ccdf(g_unit / k, n, omega) for k in range(1, levels + 1)]

    charge = harvest_tail[:-1] - harvest_tail[1:]  # exactly k units, k = 0..L-1
    discharge = fits[1:] - fits[:-1]               # exactly k units, k = 1..L

    z = np.zeros((levels + 1, levels + 1))
    z[0, :levels] = charge
    z[0, levels] = harvest_tail[levels]
    for i in range(1, levels):
        must_harvest = 1.0 - fits[i]
        z[i, i:levels] = must_harvest * charge[: levels - i]
        z[i, levels] = must_harvest * harvest_tail[levels - i]
        z[i, :i] = discharge[i - 1 :: -1]
    z[levels, :levels] = discharge[::-1]
    z[levels, levels] = 1.0 - fits[levels]

    if z.min() < -_ENTRY_SLACK or z.max() > 1.0 + _ENTRY_SLACK:
        raise NumericalError(
            f"transition entry outside [0, 1]: min {z.min():.3e}, max {z.max():.3e}"
        )
    np.clip(z, 0.0, 1.0, out=z)
    rowsum_err = float(np.abs(z.sum(axis=1) - 1.0).max())
    if rowsum_err > _ROWSUM_TOL:
        raise NumericalError(f"row sums deviate from 1 by {rowsum_err:.3e}")
    return z


def _validate_stochastic(z):
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {z.shape}")
    if z.min() < -_ENTRY_SLACK or z.max() > 1.0 + _ENTRY_SLACK:
        raise ValueError("transition entries must lie in [0, 1]")
    if np.abs(z.sum(axis=1) - 1.0).max() > 1e-9:
        raise ValueError("transition rows must sum to 1")


def _solve_direct(z):
    # replace the singular balance system with a rank-one corrected one:
    # the all-ones matrix pins the normalization, partial pivoting does the rest
    size = z.shape[0]
    a = z.T - np.eye(size) + np.ones((size, size))
    b = np.ones(size)
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "stationary system is singular (chain may be reducible)"
        ) from exc
    residual = float(np.abs(a @ pi - b).max())
    if residual > 1e-12:
        # one refinement step, and report conditioning instead of assuming it
        pi = pi + np.linalg.solve(a, b - a @ pi)
        cond = float(np.linalg.cond(a))
        warnings.warn(
            f"stationary solve needed refinement (residual {residual:.2e}, "
            f"condition number {cond:.2e})",
            stacklevel=3,
        )
    return pi


def _power_iteration(z, max_iterations, tolerance):
    zt = np.ascontiguousarray(z.T)
    pi = np.full(z.shape[0], 1.0 / z.shape[0])
    for _ in range(max_iterations):
        nxt = zt @ pi
        nxt /= nxt.sum()
        delta = float(np.abs(nxt - pi).max())
        pi = nxt
        if delta < tolerance:
            return pi
    raise NumericalError(
        f"power iteration did not converge within {max_iterations} iterations"
    )


def stationary_distribution(transition, method="direct", *, max_iterations=1_000_000,
                            tolerance=1e-13):
    """Probability vector left fixed by the chain.

    method "direct" solves the normalization-corrected linear system with
    partial pivoting; "power" repeatedly applies the transposed matrix
    until the iterate moves less than ``tolerance`` in max norm (capped at
    ``max_iterations``).  Both agree for an irreducible chain; the
    iterative route exists as an independent cross-check of the direct one.

    The result is clamped to nonnegative values, renormalized, and checked
    to satisfy the balance equations within 1e-10.
    """
    z = np.asarray(transition, dtype=float)
    _validate_stochastic(z)
    if method == "direct":
        pi = _solve_direct(z)
    elif method == "power":
        pi = _power_iteration(z, max_iterations, tolerance)
    else:
        raise ValueError(f"method must be 'direct' or 'power', got {method!r}")
    if pi.min() < -1e-10:
        raise NumericalError(
            f"stationary solve produced negative mass {pi.min():.3e}"
        )
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.abs(z.T @ pi - pi).max())
    if residual > 1e-10:
        cond = float(np.linalg.cond(z.T - np.eye(z.shape[0]) + np.ones(z.shape)))
        raise NumericalError(
            f"stationary residual {residual:.3e} exceeds 1e-10 "
            f"(system condition number {cond:.3e})"
        )
    return pi


def write_matrix_csv(transition, path):
    """Debug dump of a transition matrix, row-major, header i,j,p."""
    z = np.asarray(transition)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["i", "j", "p"])
        for i in range(z.shape[0]):
            for j in range(z.shape[1]):
                writer.writerow([i, j, repr(float(z[i, j]))])


def write_distribution_csv(pi, path):
    """Debug dump of a stationary distribution, header i,pi."""
    vec = np.asarray(pi)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["i", "pi"])
        for i, value in enumerate(vec):
            writer.writerow([i, repr(float(value))])
