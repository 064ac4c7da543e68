"""Damped Hamiltonian systems ``x' = S(x) grad H(x) - D(t) x``.

Includes periodic central-difference operators and the semi-discrete damped Burgers
and KdV systems, plus a 2-D linear damped rotation with a closed-form solution for
convergence checks. Damping is always stored as the diagonal of ``D(t)``, so a PDE
term ``-2 gamma u`` gives ``D_kk = 2 gamma``.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import GridTooSmall, MissingSeed

__all__ = [
    "DampedSystem",
    "DampingCase",
    "FDOperators",
    "InvariantDescriptor",
    "KdVParams",
    "build_fd_operators",
    "gaussian_profile",
    "kdv_a_matrix",
    "make_burgers",
    "make_damping",
    "make_kdv_h1",
    "make_kdv_h2",
    "make_linear_rotation",
    "linear_rotation_exact",
]


@dataclass(frozen=True)
class InvariantDescriptor:
    """A monitored functional ``I`` with, when known, its decay rate ``eta(t)``.

    ``eta_integral(a, b)`` returns ``int_a^b eta``.
    """

    name: str
    eval: Callable
    eta: Optional[Callable] = None
    eta_integral: Optional[Callable] = None

    def __call__(self, x):
        return self.eval(x)

    @property
    def has_eta(self):
        return self.eta_integral is not None


@dataclass(frozen=True)
class DampedSystem:
    """Problem data for the EEPC stepper.

    ``skew(t_mid, x_mid)`` returns the (possibly frozen) skew-symmetric operator as a
    dense or sparse matrix. ``grad_h`` must accept a batch of states stacked along the
    first axis.
    """

    dim: int
    skew: Callable
    grad_h: Callable
    energy: Callable
    damping_diag: Callable
    damping_antideriv: Callable
    invariants: tuple = ()
    state_dependent_skew: bool = False
    name: str = ""
    dx: Optional[float] = None

    def skew_apply(self, t_mid, x_mid, z):
        return self.skew(t_mid, x_mid) @ z

    def rhs(self, t, x):
        """Right-hand side of the damped ODE, for reference checks."""
        return self.skew_apply(t, x, self.grad_h(x)) - self.damping_diag(t) * x

    def invariant(self, name):
        for inv in self.invariants:
            if inv.name == name:
                return inv
        raise KeyError(name)


# ---------------------------------------------------------------------------
# finite differences


@dataclass(frozen=True)
class FDOperators:
    d1: sp.csr_matrix
    d2: sp.csr_matrix
    d3: sp.csr_matrix
    dx: float

    @property
    def n1(self):
        return self.d1.shape[0]


def _circulant(first_row_entries, n):
    """Sparse circulant with ``row_i[(i + k) % n] = value`` for ``{k: value}``."""
    rows, cols, vals = [], [], []
    idx = np.arange(n)
    for k, v in first_row_entries.items():
        rows.append(idx)
        cols.append((idx + k) % n)
        vals.append(np.full(n, v))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )


def build_fd_operators(n1, dx):
    """Periodic central differences ``D1`` (first), ``D2`` (second), ``D3 = D1 D2``."""
    if n1 < 3:
        raise GridTooSmall(f"periodic stencils need at least 3 points, got {n1}")
    if not dx > 0:
        raise ValueError(f"dx must be positive, got {dx}")
    d1 = _circulant({1: 0.5 / dx, -1: -0.5 / dx}, n1)
    d2 = _circulant({0: -2.0 / dx**2, 1: 1.0 / dx**2, -1: 1.0 / dx**2}, n1)
    d3 = (d1 @ d2).tocsr()
    return FDOperators(d1, d2, d3, dx)


def kdv_a_matrix(u, dx):
    """Skew discretization of ``u d/dx + d/dx u`` on a periodic grid.

    ``(A(u) z)_j = ((u_j + u_{j+1}) z_{j+1} - (u_j + u_{j-1}) z_{j-1}) / (2 dx)``.
    """
    u = np.asarray(u, float)
    n = u.size
    up = (u + np.roll(u, -1)) / (2.0 * dx)  # couples j with j+1
    idx = np.arange(n)
    rows = np.concatenate([idx, (idx + 1) % n])
    cols = np.concatenate([(idx + 1) % n, idx])
    return sp.csr_matrix((np.concatenate([up, -up]), (rows, cols)), shape=(n, n))


def _apply_rows(op, X):
    """Apply a matrix to a single state or to each row of a batch."""
    return op @ X if X.ndim == 1 else (op @ X.T).T


# ---------------------------------------------------------------------------
# damping


@dataclass(frozen=True)
class DampingCase:
    """Damping specification in terms of the PDE coefficient ``gamma``.

    kind : ``"constant-equal"``, ``"constant-unequal"`` or ``"time-dependent-equal"``
        For the time-dependent case ``gamma(t) = gamma * exp(-t)``.
    """

    kind: str = "constant-equal"
    gamma: float = 0.25
    spread: float = 0.1
    seed: Optional[int] = None
    rate: str = "exp"

    KINDS = ("constant-equal", "constant-unequal", "time-dependent-equal", "none")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if self.kind == "time-dependent-equal" and self.rate != "exp":
            raise ValueError(f"unknown rate function {self.rate!r}")

    @property
    def equal(self):
        return self.kind != "constant-unequal"


@dataclass(frozen=True)
class Damping:
    diag: Callable
    antideriv: Callable
    equal: bool
    # int_a^b of the common diagonal entry; only for equal-diagonal damping
    rate_integral: Optional[Callable] = None
    gammas: Optional[np.ndarray] = field(default=None, repr=False)


def make_damping(case, dim):
    """Diagonal of ``D(t) = 2 gamma(t)`` and its antiderivative ``Phi(t)``.

    The unequal case draws ``gamma_k = gamma (1 + spread u_k)`` with
    ``u_k ~ U(-1, 1)`` from a PCG64 generator seeded by ``case.seed``.
    """
    ones = np.ones(dim)
    g = case.gamma
    if case.kind == "none":
        return Damping(lambda t: 0.0 * ones, lambda t: 0.0 * ones, True, lambda a, b: 0.0)
    if case.kind == "constant-equal":
        return Damping(
            lambda t: 2 * g * ones,
            lambda t: 2 * g * t * ones,
            True,
            lambda a, b: 2 * g * (b - a),
        )
    if case.kind == "constant-unequal":
        if case.seed is None:
            raise MissingSeed("constant-unequal damping needs a seed")
        rng = np.random.Generator(np.random.PCG64(case.seed))
        gammas = g * (1.0 + case.spread * rng.uniform(-1.0, 1.0, dim))
        return Damping(
            lambda t: 2 * gammas,
            lambda t: 2 * gammas * t,
            False,
            gammas=gammas,
        )
    # time-dependent-equal, gamma(t) = g exp(-t)
    return Damping(
        lambda t: 2 * g * np.exp(-t) * ones,
        lambda t: -2 * g * np.exp(-t) * ones,
        True,
        lambda a, b: 2 * g * (np.exp(-a) - np.exp(-b)),
    )


def _scaled_rate(damp, factor):
    """``(eta, eta_integral)`` for an invariant decaying at `factor` times ``D_kk``."""
    if not damp.equal:
        return None, None
    return (
        lambda t: factor * float(damp.diag(t)[0]),
        lambda a, b: factor * damp.rate_integral(a, b),
    )


# ---------------------------------------------------------------------------
# concrete systems


def gaussian_profile(x, sigma=1.0, amplitude=None):
    """``exp(-x^2 / (2 sigma^2)) / sqrt(2 pi)`` unless `amplitude` overrides the prefactor."""
    if amplitude is None:
        amplitude = 1.0 / np.sqrt(2.0 * np.pi)
    return amplitude * np.exp(-np.asarray(x) ** 2 / (2.0 * sigma**2))


def make_burgers(n1, dx, damping):
    """Damped Burgers: ``u' = -1/2 D1 u^2 - 2 gamma u`` with ``H = sum u^3 / 3``.

    Invariants: ``H`` and the mass ``M = sum u``; for equal-diagonal damping ``M``
    decays at ``eta = D_kk``.
    """
    ops = build_fd_operators(n1, dx)
    damp = make_damping(damping, n1)
    S = (-0.5 * ops.d1).tocsr()

    def energy(u):
        return np.sum(np.asarray(u) ** 3, axis=-1) / 3.0

    def mass(u):
        return np.sum(u, axis=-1)

    eta, eta_int = _scaled_rate(damp, 1.0)
    invariants = (
        InvariantDescriptor("H", energy),
        InvariantDescriptor("M", mass, eta, eta_int),
    )
    return DampedSystem(
        dim=n1,
        skew=lambda t, x: S,
        grad_h=lambda u: np.asarray(u) ** 2,
        energy=energy,
        damping_diag=damp.diag,
        damping_antideriv=damp.antideriv,
        invariants=invariants,
        name="burgers",
        dx=dx,
    )


@dataclass(frozen=True)
class KdVParams:
    alpha: float = -3.0 / 8.0
    rho: float = -0.1
    nu: float = -1e-5


def _kdv_h1(ops, p):
    def energy(u):
        u = np.asarray(u)
        du = (np.roll(u, -1, axis=-1) - u) / ops.dx
        return np.sum(p.alpha / 3 * u**3 + p.rho / 2 * u**2 - p.nu / 2 * du**2, axis=-1)

    def grad(u):
        u = np.asarray(u)
        return p.alpha * u**2 + p.rho * u + p.nu * _apply_rows(ops.d2, u)

    return energy, grad


def _h2(u):
    return 0.5 * np.sum(np.asarray(u) ** 2, axis=-1)


def make_kdv_h1(n1, dx, params, damping):
    """KdV in the first Hamiltonian form, ``u' = D1 grad H1(u) - 2 gamma u``.

    ``grad H1 = alpha u^2 + rho u + nu D2 u``. The monitored ``H2`` has no exact
    decay law in this form.
    """
    params = params if isinstance(params, KdVParams) else KdVParams(**params)
    ops = build_fd_operators(n1, dx)
    damp = make_damping(damping, n1)
    energy, grad = _kdv_h1(ops, params)
    return DampedSystem(
        dim=n1,
        skew=lambda t, x: ops.d1,
        grad_h=grad,
        energy=energy,
        damping_diag=damp.diag,
        damping_antideriv=damp.antideriv,
        invariants=(InvariantDescriptor("H1", energy), InvariantDescriptor("H2", _h2)),
        name="kdv-h1",
        dx=dx,
    )


def make_kdv_h2(n1, dx, params, damping):
    """KdV in the second Hamiltonian form, ``u' = (nu D3 + 2 alpha/3 A(u) + rho D1) u - 2 gamma u``.

    The skew operator depends on the state and is frozen per step at the midpoint of
    the transformed endpoint values. For equal-diagonal damping ``H2 = |u|^2 / 2``
    decays at ``eta = 2 D_kk = 4 gamma``.
    """
    params = params if isinstance(params, KdVParams) else KdVParams(**params)
    ops = build_fd_operators(n1, dx)
    damp = make_damping(damping, n1)
    linear = (params.nu * ops.d3 + params.rho * ops.d1).tocsr()
    c = 2.0 * params.alpha / 3.0
    h1, _ = _kdv_h1(ops, params)

    def skew(t, x):
        return linear + c * kdv_a_matrix(x, dx)

    eta, eta_int = _scaled_rate(damp, 2.0)
    return DampedSystem(
        dim=n1,
        skew=skew,
        grad_h=lambda u: np.asarray(u, dtype=float),
        energy=_h2,
        damping_diag=damp.diag,
        damping_antideriv=damp.antideriv,
        invariants=(InvariantDescriptor("H2", _h2, eta, eta_int), InvariantDescriptor("H1", h1)),
        state_dependent_skew=True,
        name="kdv-h2",
        dx=dx,
    )


def make_linear_rotation(omega=1.0, gamma=0.1):
    """``x' = omega J x - gamma x`` in 2-D with ``H = |x|^2 / 2``.

    See :func:`linear_rotation_exact` for the closed-form flow.
    """
    J = omega * np.array([[0.0, 1.0], [-1.0, 0.0]])
    ones = np.ones(2)

    def energy(x):
        return 0.5 * np.sum(np.asarray(x) ** 2, axis=-1)

    inv = InvariantDescriptor("H", energy, lambda t: 2 * gamma, lambda a, b: 2 * gamma * (b - a))
    return DampedSystem(
        dim=2,
        skew=lambda t, x: J,
        grad_h=lambda x: np.asarray(x, dtype=float),
        energy=energy,
        damping_diag=lambda t: gamma * ones,
        damping_antideriv=lambda t: gamma * t * ones,
        invariants=(inv,),
        name="linear-rotation",
    )


def linear_rotation_exact(t, x0, omega=1.0, gamma=0.1):
    """Closed-form flow of :func:`make_linear_rotation` via the matrix exponential."""
    M = omega * np.array([[0.0, 1.0], [-1.0, 0.0]]) - gamma * np.eye(2)
    return scipy.linalg.expm(M * t) @ np.asarray(x0, float)
