"""Invariant time series, dissipation-rate residuals and temporal order studies."""
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NonPositiveInvariant
from .stepper import SolverOptions, Trajectory, integrate, n_steps
from .tableau import make_tableau

__all__ = [
    "OrderRow",
    "OrderStudy",
    "ResidualSeries",
    "fit_slope",
    "global_error",
    "invariant_series",
    "order_study",
    "reference_solution",
    "residual_averaged",
    "residual_known_eta",
]

KNOWN_ETA = "known-eta"
AVERAGED = "averaged-gamma"


@dataclass
class ResidualSeries:
    name: str
    values: np.ndarray
    mode: str
    times: np.ndarray  # right endpoint t_{n+1} of each step

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def invariant_series(traj, inv):
    return np.asarray(inv.eval(traj.states), dtype=float)


def _log_ratios(traj, inv, strict=True):
    vals = invariant_series(traj, inv)
    prod = vals[:-1] * vals[1:]
    bad = ~(prod > 0)
    if bad.any() and not strict:
        out = np.full(prod.shape, np.nan)
        out[~bad] = np.log(vals[1:][~bad] / vals[:-1][~bad])
        return out
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NonPositiveInvariant(
            f"{inv.name} changes sign or vanishes between steps {k} and {k + 1}; "
            "log-ratio residual undefined"
        )
    return np.log(vals[1:] / vals[:-1])


def residual_known_eta(traj, inv, strict=True):
    """``R_n = ln(I_{n+1} / I_n) + int_{t_n}^{t_{n+1}} eta``; machine-zero when the decay law is preserved.

    Raises :class:`NonPositiveInvariant` where the log-ratio is undefined, or
    yields NaN there when `strict` is off.
    """
    if not inv.has_eta:
        raise ValueError(f"invariant {inv.name} has no registered decay rate")
    t = traj.times
    integrals = np.array([inv.eta_integral(a, b) for a, b in zip(t[:-1], t[1:])])
    return ResidualSeries(inv.name, _log_ratios(traj, inv, strict) + integrals, KNOWN_ETA, t[1:])


def residual_averaged(traj, inv, damping_diag, strict=True):
    """``R_n = ln(I_{n+1} / I_n) + dt * mean(diag D(t_n))``.

    Used when the decay law of `inv` is unknown; the mean of the diagonal entries
    of ``D`` at the left endpoint stands in for ``eta``.
    """
    t = traj.times
    means = np.array([np.mean(damping_diag(a)) for a in t[:-1]])
    return ResidualSeries(inv.name, _log_ratios(traj, inv, strict) + np.diff(t) * means, AVERAGED, t[1:])


def reference_solution(sys, t_span, x0, dt_ref, times=None, opts=None):
    """Eighth-order (s = 4) trajectory at the fine step `dt_ref`.

    With `times`, only the states at those instants (multiples of `dt_ref` from
    ``t_span[0]``) are kept.
    """
    t0, t1 = t_span
    traj = integrate(sys, x0, t1, dt_ref, make_tableau(4), opts, t0=t0, strict=True)
    if times is None:
        return traj
    idx = [n_steps(t, dt_ref, t0) for t in np.atleast_1d(times)]
    return Trajectory(traj.times[idx], traj.states[idx], traj.iterations)


def global_error(x, ref, dx=None):
    """Euclidean norm, or the ``dx``-weighted discrete L2 norm for grid functions."""
    d = np.asarray(x) - np.asarray(ref)
    if dx is None:
        return float(np.linalg.norm(d))
    return float(np.sqrt(dx * np.sum(d * d)))


def fit_slope(dts, errors, floor=0.0):
    """Least-squares slope of ``log(error)`` against ``log(dt)``.

    Points with ``error < floor`` are dropped; None when fewer than two remain.
    """
    dts = np.asarray(dts, float)
    errors = np.asarray(errors, float)
    keep = (errors >= floor) & (errors > 0) & np.isfinite(errors)
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(dts[keep]), np.log(errors[keep]), 1)[0])


@dataclass
class OrderRow:
    s: int
    dt: float
    error: float
    seconds: float


@dataclass
class OrderStudy:
    rows: list
    slopes: dict = field(default_factory=dict)  # s -> slope or None
    floor: float = 0.0
    reference: Optional[np.ndarray] = None


def order_study(sys, x0, T, dt_list, tableaux, reference=None, dt_ref=None, opts=None,
                floor=None, dx=None):
    """Global error at `T` for each tableau and step size, with fitted slopes.

    The comparison state is `reference` if given, otherwise an s = 4 run at
    `dt_ref` (default: a quarter of the smallest step). Errors below `floor`
    (default ``100 * opts.tol``) are excluded from the slope fits.
    """
    opts = opts or SolverOptions()
    floor = 100.0 * opts.tol if floor is None else floor
    dt_list = [float(d) for d in dt_list]
    for dt in dt_list:
        n_steps(T, dt)
    if dx is None:
        dx = sys.dx
    if reference is None:
        dt_ref = min(dt_list) / 4 if dt_ref is None else dt_ref
        if dt_ref > min(dt_list) / 4 * (1 + 1e-12):
            raise ValueError(f"reference step {dt_ref} exceeds a quarter of the smallest step")
        reference = reference_solution(sys, (0.0, T), x0, dt_ref, times=[T], opts=opts).states[-1]
    rows, slopes = [], {}
    for tab in tableaux:
        errs = []
        for dt in dt_list:
            start = time.perf_counter()
            traj = integrate(sys, x0, T, dt, tab, opts, strict=True)
            elapsed = time.perf_counter() - start
            err = global_error(traj.states[-1], reference, dx)
            rows.append(OrderRow(tab.s, dt, err, elapsed))
            errs.append(err)
        slopes[tab.s] = fit_slope(dt_list, errs, floor)
    return OrderStudy(rows, slopes, floor, np.asarray(reference))
