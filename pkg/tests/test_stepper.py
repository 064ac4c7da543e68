import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eepc.errors import DimensionMismatch, NonConvergence
from eepc.stepper import (
    SolverOptions,
    StagePolynomial,
    StepContext,
    eval_stage_polynomial,
    integrate,
    n_steps,
    solve_stages_fixed_point,
    step_eepc,
)
from eepc.systems import (
    DampedSystem,
    DampingCase,
    linear_rotation_exact,
    make_burgers,
    make_kdv_h2,
    make_linear_rotation,
)
from eepc.tableau import make_tableau

CASE_I = DampingCase("constant-equal", 0.25)
CASE_II = DampingCase("constant-unequal", 0.25, spread=0.1, seed=7)
CASE_III = DampingCase("time-dependent-equal", 1.0)


def pure_decay(rates):
    rates = np.asarray(rates, float)
    n = rates.size
    return DampedSystem(
        dim=n,
        skew=lambda t, x: np.zeros((n, n)),
        grad_h=lambda x: np.asarray(x, float),
        energy=lambda x: 0.5 * np.sum(np.asarray(x) ** 2, axis=-1),
        damping_diag=lambda t: rates,
        damping_antideriv=lambda t: rates * t,
    )


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_zero_skew_gives_exact_decay(s):
    sys = pure_decay([0.3, 1.2, 2.0])
    x0 = np.array([1.0, -2.0, 0.5])
    res = step_eepc(sys, StepContext(0.4, 0.2), x0, make_tableau(s))
    np.testing.assert_allclose(res.x1, np.exp(-0.2 * sys.damping_diag(0)) * x0, rtol=1e-15)


def test_rotation_norm_and_local_error():
    gamma, h = 0.1, 0.01
    sys = make_linear_rotation(1.0, gamma)
    x0 = np.array([1.0, 0.5])
    x1 = step_eepc(sys, StepContext(0.0, h), x0, make_tableau(2)).x1
    assert abs(np.linalg.norm(x1) - np.exp(-gamma * h) * np.linalg.norm(x0)) <= 1e-12
    assert np.linalg.norm(x1 - linear_rotation_exact(h, x0, 1.0, gamma)) < h**5


def test_undamped_burgers_conserves_energy(burgers_setup):
    n1, dx, u0 = burgers_setup
    sys = make_burgers(n1, dx, DampingCase("none"))
    traj = integrate(sys, u0, 1.0, 0.01, make_tableau(1))
    H = sys.energy(traj.states)
    assert np.max(np.abs(H - H[0])) <= 1e-11


def test_fixed_point_matches_avf_on_linear_decay():
    h, x0 = 0.1, np.array([1.3])

    def stage_map(W):
        return W[0] - h * 0.5 * (W[0] + W[1])

    W, it = solve_stages_fixed_point(stage_map, np.tile(x0, (2, 1)), 1e-13, 100)
    assert W[1, 0] == pytest.approx(x0[0] * (1 - h / 2) / (1 + h / 2), abs=1e-13)
    assert it <= 30


def test_zero_step_takes_one_iteration(burgers_setup):
    n1, dx, u0 = burgers_setup
    res = step_eepc(make_burgers(n1, dx, CASE_I), StepContext(1.0, 0.0), u0, make_tableau(3))
    assert res.iterations == 1
    np.testing.assert_array_equal(res.x1, u0)


def test_fixed_point_reports_nonconvergence():
    with pytest.raises(NonConvergence) as info:
        solve_stages_fixed_point(lambda W: 2.0 * W[1:] + 1.0, np.ones((2, 3)), 1e-13, 5)
    assert info.value.max_iter == 5
    with pytest.raises(NonConvergence):
        solve_stages_fixed_point(lambda W: W[1:] * np.nan, np.ones((2, 3)), 1e-13, 5)


def test_integrate_tags_failing_step(burgers_setup):
    n1, dx, u0 = burgers_setup
    sys = make_burgers(n1, dx, CASE_I)
    with pytest.raises(NonConvergence) as info:
        integrate(sys, u0, 0.1, 0.01, make_tableau(2), SolverOptions(tol=1e-13, max_iter=2))
    assert info.value.step == 0


def test_dimension_mismatch(burgers_setup):
    n1, dx, u0 = burgers_setup
    with pytest.raises(DimensionMismatch):
        step_eepc(make_burgers(n1, dx, CASE_I), StepContext(0.0, 0.01), u0[:-1], make_tableau(1))


@pytest.mark.parametrize("s", [1, 2, 4])
def test_kdv_h2_stage_solver_converges(kdv_setup, s):
    n1, dx, u0, p = kdv_setup
    sys = make_kdv_h2(n1, dx, p, DampingCase("constant-equal", 0.01))
    res = step_eepc(sys, StepContext(0.0, 0.009), u0, make_tableau(s))
    assert res.iterations < 100
    assert np.all(np.isfinite(res.x1))


@settings(max_examples=25, deadline=None)
@given(
    s=st.integers(1, 4),
    h=st.floats(0.002, 0.05),
    t0=st.floats(0.0, 3.0),
    case=st.sampled_from([CASE_I, CASE_II, CASE_III]),
)
def test_step_is_symmetric(s, h, t0, case):
    n1 = 40
    dx = 2 * np.pi / n1
    x = -np.pi + dx * np.arange(1, n1 + 1)
    u0 = np.exp(-x**2)
    sys = make_burgers(n1, dx, case)
    tab = make_tableau(s)
    x1 = step_eepc(sys, StepContext(t0, h), u0, tab).x1
    back = step_eepc(sys, StepContext(t0 + h, -h), x1, tab).x1
    assert np.max(np.abs(back - u0)) <= 10 * 1e-13 * (1 + np.max(np.abs(u0)))


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_transformed_energy_conserved_under_unequal_damping(burgers_setup, s):
    n1, dx, u0 = burgers_setup
    sys = make_burgers(n1, dx, CASE_II)
    W = step_eepc(sys, StepContext(0.0, 0.01), u0, make_tableau(s)).stage_values
    assert sys.energy(W[-1]) == pytest.approx(sys.energy(W[0]), abs=1e-14)


@pytest.mark.parametrize("case", [CASE_I, CASE_III])
def test_cubic_energy_decays_at_three_times_damping(burgers_setup, case):
    n1, dx, u0 = burgers_setup
    sys = make_burgers(n1, dx, case)
    traj = integrate(sys, u0, 0.5, 0.01, make_tableau(2))
    phi = np.array([sys.damping_antideriv(t)[0] for t in traj.times])
    expected = sys.energy(u0) * np.exp(-3 * (phi - phi[0]))
    np.testing.assert_allclose(sys.energy(traj.states), expected, rtol=1e-12)


def test_newton_strategy_agrees_with_fixed_point(burgers_setup):
    n1, dx, u0 = burgers_setup
    sys = make_burgers(n1, dx, CASE_I)
    tab = make_tableau(3)
    ctx = StepContext(0.0, 0.02)
    a = step_eepc(sys, ctx, u0, tab).x1
    b = step_eepc(sys, ctx, u0, tab, SolverOptions(strategy="newton")).x1
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(tol=0.0)
    with pytest.raises(ValueError):
        SolverOptions(max_iter=0)
    with pytest.raises(ValueError):
        SolverOptions(strategy="anderson")


def test_stage_polynomial_interpolates():
    values = np.array([[1.0, 0.0], [2.0, 1.0], [5.0, 4.0]])  # tau -> 1 + 4 tau^2 on first column
    p = StagePolynomial(2, values, h=0.1, t0=0.0)
    np.testing.assert_array_equal(p(0.5), values[1])
    np.testing.assert_allclose(p(0.25), [1.25, 0.25])
    np.testing.assert_allclose(eval_stage_polynomial(p, np.array([0.0, 1.0])), values[[0, 2]])


def test_n_steps():
    assert n_steps(1.0, 0.1) == 10
    assert n_steps(0.0, 0.1) == 0
    with pytest.raises(ValueError):
        n_steps(1.0, 0.3)
    assert n_steps(1.0, 0.3, strict=False) == 3
    assert n_steps(50.0, 0.009, strict=False) == 5555


def test_zero_length_integration(burgers_setup):
    n1, dx, u0 = burgers_setup
    traj = integrate(make_burgers(n1, dx, CASE_I), u0, 0.0, 0.01, make_tableau(1))
    assert len(traj) == 1 and traj.iterations == []


@pytest.mark.parametrize("q, conserved", [(1, False), (3, True), (8, True)])
def test_energy_conservation_needs_exact_quadrature(burgers_setup, q, conserved):
    # s=2 with a cubic energy needs exactness for degree 5, i.e. q >= 3
    n1, dx, u0 = burgers_setup
    sys = make_burgers(n1, dx, DampingCase("none"))
    traj = integrate(sys, u0, 2.0, 0.05, make_tableau(2, q))
    H = sys.energy(traj.states)
    drift = np.max(np.abs(H - H[0]))
    assert (drift <= 1e-13) == conserved
