"""Exponential energy-dissipation-preserving collocation (EEPC) time stepping.

One step works in the transformed variable ``w = exp(Y(t)) x`` with
``Y(t) = Phi(t) - Phi(t0 + h/2)`` and ``Phi`` the antiderivative of the damping
diagonal. In ``w`` the damping disappears and the energy-preserving collocation
scheme is applied to ``w' = S grad H(w)``; the unknowns are the values of the
degree-``s`` stage polynomial at ``tau_j = j / s``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .errors import DimensionMismatch, NonConvergence

__all__ = [
    "SolverOptions",
    "StagePolynomial",
    "StepContext",
    "StepResult",
    "Trajectory",
    "eval_stage_polynomial",
    "integrate",
    "lagrange_matrix",
    "solve_stages_fixed_point",
    "step_eepc",
]


@dataclass(frozen=True)
class StepContext:
    t0: float
    h: float

    @property
    def t1(self):
        return self.t0 + self.h

    @property
    def t_ref(self):
        """Reference time of the exponential transform, the step midpoint."""
        return self.t0 + 0.5 * self.h


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-13
    max_iter: int = 100
    strategy: str = "fixed-point"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.strategy not in ("fixed-point", "newton"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def lagrange_matrix(nodes, points):
    """Matrix ``L[q, j] = ell_j(points[q])`` of the Lagrange basis on `nodes`."""
    nodes = np.asarray(nodes, float)
    points = np.atleast_1d(np.asarray(points, float))
    L = np.ones((points.size, nodes.size))
    for j, xj in enumerate(nodes):
        for k, xk in enumerate(nodes):
            if k != j:
                L[:, j] *= (points - xk) / (xj - xk)
    return L


@dataclass
class StagePolynomial:
    """Degree-``s`` interpolant through ``node_values[j]`` at ``tau = j / s``."""

    s: int
    node_values: np.ndarray
    h: float
    t0: float

    def __call__(self, tau):
        return eval_stage_polynomial(self, tau)


def eval_stage_polynomial(p, tau):
    nodes = np.arange(p.s + 1) / p.s
    W = np.asarray(p.node_values, float)
    if np.ndim(tau) == 0:
        hit = np.flatnonzero(nodes == tau)
        if hit.size:
            return W[hit[0]].copy()
        return (lagrange_matrix(nodes, tau) @ W)[0]
    return lagrange_matrix(nodes, tau) @ W


@dataclass
class StepResult:
    x1: np.ndarray
    iterations: int
    stage_values: np.ndarray  # (s + 1, dim), transformed variable


@lru_cache(maxsize=64)
def _stage_matrices(s, a_bytes, a_shape, qn_bytes, qw_bytes):
    a = np.frombuffer(a_bytes).reshape(a_shape)
    qn = np.frombuffer(qn_bytes)
    qw = np.frombuffer(qw_bytes)
    taus = np.arange(1, s + 1) / s
    # weights[j - 1, q] = omega_q * A(tau_j, sigma_q)
    tt, ss = np.meshgrid(taus, qn, indexing="ij")
    weights = np.polynomial.polynomial.polyval2d(tt, ss, a) * qw[None, :]
    # A(1, sigma) == 1 for every valid tableau; pin it so the final stage is B_sigma = 1.
    weights[-1] = qw
    interp = lagrange_matrix(np.arange(s + 1) / s, qn)
    return interp, weights


def stage_matrices(tab):
    """``(interp, weights)``: quadrature-point interpolation and stage weight matrices."""
    a = np.ascontiguousarray(tab.a_coeffs, dtype=float)
    return _stage_matrices(
        tab.s, a.tobytes(), a.shape,
        np.ascontiguousarray(tab.quad_nodes, float).tobytes(),
        np.ascontiguousarray(tab.quad_weights, float).tobytes(),
    )


def solve_stages_fixed_point(stage_map, W, tol, max_iter, scale=None):
    """Iterate ``W <- stage_map(W)`` on the free rows ``W[1:]``.

    Stops when ``max_j ||W_j^{k+1} - W_j^k||_inf <= tol * (1 + scale)``; `scale`
    defaults to ``||W[0]||_inf``. Returns ``(W, iterations)``.
    """
    W = np.array(W, dtype=float, copy=True)
    if scale is None:
        scale = np.max(np.abs(W[0])) if W[0].size else 0.0
    bound = tol * (1.0 + scale)
    diff = np.inf
    for it in range(1, max_iter + 1):
        new = stage_map(W)
        diff = np.max(np.abs(new - W[1:])) if new.size else 0.0
        W[1:] = new
        if not np.isfinite(diff):
            break
        if diff <= bound:
            return W, it
    raise NonConvergence(float(diff), max_iter)


def _solve_newton(stage_map, W, tol, max_iter):
    W = np.array(W, dtype=float, copy=True)
    scale = np.max(np.abs(W[0])) if W[0].size else 0.0
    shape = W[1:].shape
    count = [0]

    def residual(z):
        W[1:] = z.reshape(shape)
        return (z.reshape(shape) - stage_map(W)).ravel()

    def tick(*_):
        count[0] += 1

    try:
        z = optimize.newton_krylov(
            residual, W[1:].ravel(), f_tol=tol * (1.0 + scale), maxiter=max_iter,
            callback=tick,
        )
    except optimize.NoConvergence as exc:
        z = np.asarray(exc.args[0]).ravel()
        raise NonConvergence(float(np.max(np.abs(residual(z)))), max_iter) from None
    W[1:] = z.reshape(shape)
    # Finish with fixed-point sweeps so the returned stages satisfy the same test.
    W, sweeps = solve_stages_fixed_point(stage_map, W, tol, max_iter)
    return W, count[0] + sweeps


def step_eepc(sys, ctx, x0, tab, opts=None):
    """Advance `x0` from ``ctx.t0`` by ``ctx.h`` with the EEPC method of tableau `tab`.

    Negative ``h`` is allowed; the transform reference stays at the interval midpoint.

    Returns
    -------
    StepResult
        ``x1``, the number of stage iterations and the stage values ``w_0..w_s`` of
        the transformed polynomial.
    """
    opts = opts or SolverOptions()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.dim,):
        raise DimensionMismatch(f"state has shape {x0.shape}, system dimension is {sys.dim}")
    s, h = tab.s, ctx.h
    t_mid = ctx.t_ref
    phi_ref = sys.damping_antideriv(t_mid)
    w0 = np.exp(sys.damping_antideriv(ctx.t0) - phi_ref) * x0

    interp, weights = stage_matrices(tab)
    grad = sys.grad_h
    if sys.state_dependent_skew:
        def stage_map(W):
            S = sys.skew(t_mid, 0.5 * (W[0] + W[s]))
            F = (S @ grad(interp @ W).T).T
            return W[0] + h * (weights @ F)
    else:
        S = sys.skew(t_mid, w0)

        def stage_map(W):
            F = (S @ grad(interp @ W).T).T
            return W[0] + h * (weights @ F)

    W = np.tile(w0, (s + 1, 1))
    if opts.strategy == "newton":
        W, iterations = _solve_newton(stage_map, W, opts.tol, opts.max_iter)
    else:
        W, iterations = solve_stages_fixed_point(stage_map, W, opts.tol, opts.max_iter)
    x1 = np.exp(phi_ref - sys.damping_antideriv(ctx.t1)) * W[s]
    return StepResult(x1, iterations, W)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_times, dim)
    iterations: list

    def __len__(self):
        return len(self.times)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0


def n_steps(T, dt, t0=0.0, strict=True):
    """Number of steps of size `dt` from `t0` towards `T`.

    With `strict`, ``(T - t0) / dt`` must be an integer to within 1e-9; otherwise the
    count is the largest whole number of steps that does not pass `T`.
    """
    ratio = (T - t0) / dt
    if ratio < -1e-9:
        raise ValueError(f"end time {T} precedes start time {t0}")
    n = int(round(ratio))
    if abs(ratio - n) <= 1e-9:
        return n
    if strict:
        raise ValueError(f"interval length {T - t0} is not an integer multiple of dt={dt}")
    return int(np.floor(ratio))


def integrate(sys, x0, T, dt, tab, opts=None, t0=0.0, callback=None, strict=False):
    """Integrate from `t0` with fixed step `dt`, recording every state.

    Takes ``n_steps(T, dt, t0, strict)`` steps, so the last time may fall short of `T`
    by less than one step when `strict` is off.
    """
    n = n_steps(T, dt, t0, strict)
    times = t0 + dt * np.arange(n + 1)
    states = np.empty((n + 1, sys.dim))
    states[0] = x0
    iterations = []
    x = np.asarray(x0, dtype=float)
    for k in range(n):
        try:
            res = step_eepc(sys, StepContext(times[k], dt), x, tab, opts)
        except NonConvergence as exc:
            exc.step = k
            raise
        x = res.x1
        states[k + 1] = x
        iterations.append(res.iterations)
        if callback is not None:
            callback(k, times[k + 1], x)
    return Trajectory(times, states, iterations)
