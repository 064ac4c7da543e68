"""Exponential energy-dissipation-preserving collocation integrators for damped Hamiltonian systems."""

__version__ = "0.1.0"

from .diagnostics import (
    fit_slope,
    invariant_series,
    order_study,
    reference_solution,
    residual_averaged,
    residual_known_eta,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    GridTooSmall,
    MissingSeed,
    NonConvergence,
    NonPositiveInvariant,
    UnsupportedStageCount,
)
from .stepper import (
    SolverOptions,
    StagePolynomial,
    StepContext,
    Trajectory,
    eval_stage_polynomial,
    integrate,
    solve_stages_fixed_point,
    step_eepc,
)
from .systems import (
    DampedSystem,
    DampingCase,
    InvariantDescriptor,
    KdVParams,
    build_fd_operators,
    make_burgers,
    make_damping,
    make_kdv_h1,
    make_kdv_h2,
    make_linear_rotation,
)
from .tableau import CollocationTableau, gauss_legendre, make_tableau, make_tableau_general
