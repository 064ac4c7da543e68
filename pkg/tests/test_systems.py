import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate

from eepc.errors import GridTooSmall, MissingSeed
from eepc.systems import (
    DampingCase,
    KdVParams,
    build_fd_operators,
    kdv_a_matrix,
    make_burgers,
    make_damping,
    make_kdv_h1,
    make_kdv_h2,
)

CASE_I = DampingCase("constant-equal", 0.25)
N, DX = 24, 0.2

vectors = arrays(np.float64, N, elements=st.floats(-2, 2))


def fd_gradient(f, u, eps=1e-6):
    g = np.empty_like(u)
    for k in range(u.size):
        e = np.zeros_like(u)
        e[k] = eps
        g[k] = (f(u + e) - f(u - e)) / (2 * eps)
    return g


def test_fd_first_rows():
    ops = build_fd_operators(4, 1.0)
    np.testing.assert_array_equal(ops.d1.toarray()[0], [0, 0.5, 0, -0.5])
    np.testing.assert_array_equal(ops.d2.toarray()[0], [-2, 1, 0, 1])


def test_fd_structure():
    ops = build_fd_operators(N, DX)
    d1, d2, d3 = (m.toarray() for m in (ops.d1, ops.d2, ops.d3))
    np.testing.assert_array_equal(d1, -d1.T)
    np.testing.assert_array_equal(d2, d2.T)
    np.testing.assert_allclose(d3, d1 @ d2, atol=1e-12)
    np.testing.assert_allclose(d3, -d3.T, atol=1e-10)
    np.testing.assert_allclose(d1 @ np.ones(N), 0, atol=1e-14)
    np.testing.assert_allclose(d2 @ np.ones(N), 0, atol=1e-12)
    np.testing.assert_allclose(np.ones(N) @ d1, 0, atol=1e-14)


def test_fd_grid_too_small():
    with pytest.raises(GridTooSmall):
        build_fd_operators(2, 0.1)


def test_burgers_trivial_values():
    sys = make_burgers(5, 0.3, CASE_I)
    np.testing.assert_array_equal(sys.grad_h(np.zeros(5)), 0)
    assert sys.energy(np.zeros(5)) == 0
    assert sys.energy(np.ones(5)) == pytest.approx(5 / 3)
    assert sys.invariant("M")(np.ones(5)) == 5


@given(vectors)
def test_burgers_mass_conformality(u):
    sys = make_burgers(N, DX, CASE_I)
    # 1^T (-1/2 D1 u^2 - 2 gamma u) = -2 gamma 1^T u
    assert np.sum(sys.rhs(0.0, u)) == pytest.approx(-0.5 * np.sum(u), abs=1e-12 * (1 + np.sum(u**2)))


@pytest.mark.parametrize("maker", ["burgers", "kdv-h1", "kdv-h2"])
def test_gradient_consistency(maker):
    rng = np.random.default_rng(3)
    u = rng.uniform(-1, 1, N)
    sys = {
        "burgers": lambda: make_burgers(N, DX, CASE_I),
        "kdv-h1": lambda: make_kdv_h1(N, DX, KdVParams(nu=-0.01), CASE_I),
        "kdv-h2": lambda: make_kdv_h2(N, DX, KdVParams(), CASE_I),
    }[maker]()
    fd = fd_gradient(sys.energy, u)
    assert np.linalg.norm(sys.grad_h(u) - fd) <= 1e-6 * np.linalg.norm(fd)


def test_kdv_h1_degenerates_to_quadratic_gradient():
    sys = make_kdv_h1(N, DX, KdVParams(alpha=0.7, rho=0.0, nu=0.0), CASE_I)
    u = np.linspace(-1, 1, N)
    np.testing.assert_allclose(sys.grad_h(u), 0.7 * u**2)
    assert sys.energy(np.zeros(N)) == 0


def test_kdv_h1_batch_gradient_matches_rows():
    sys = make_kdv_h1(N, DX, KdVParams(), CASE_I)
    U = np.random.default_rng(0).standard_normal((3, N))
    np.testing.assert_allclose(sys.grad_h(U), np.array([sys.grad_h(u) for u in U]))


@settings(max_examples=50)
@given(vectors, vectors, vectors)
def test_kdv_a_matrix_skew(u, y, z):
    A = kdv_a_matrix(u, DX)
    scale = (1 + np.abs(u).max()) * (1 + np.abs(y).max()) * (1 + np.abs(z).max()) / DX
    assert abs(y @ (A @ z) + z @ (A @ y)) <= 1e-12 * scale * N


def test_kdv_a_matrix_kills_constants():
    A = kdv_a_matrix(np.full(N, 1.7), DX)
    np.testing.assert_allclose(A @ np.ones(N), 0, atol=1e-12)


@settings(max_examples=50)
@given(vectors)
def test_kdv_h2_skew_quadratic_form(u):
    sys = make_kdv_h2(N, DX, KdVParams(), CASE_I)
    S = sys.skew(0.3, u)
    assert abs(u @ (S @ u)) <= 1e-10 * max(1.0, u @ u)


@pytest.mark.parametrize("maker", [make_burgers, make_kdv_h1, make_kdv_h2])
def test_skew_apply_skew(maker):
    args = (N, DX, CASE_I) if maker is make_burgers else (N, DX, KdVParams(), CASE_I)
    sys = maker(*args)
    rng = np.random.default_rng(11)
    xm, y, z = rng.standard_normal((3, N))
    assert abs(y @ sys.skew_apply(0.1, xm, z) + z @ sys.skew_apply(0.1, xm, y)) <= 1e-12 * N / DX**3


@given(vectors)
def test_h2_conformal_identity(u):
    sys = make_kdv_h2(N, DX, KdVParams(), DampingCase("constant-equal", 0.01))
    # grad H2^T D u = 2 * D_kk * H2
    lhs = sys.grad_h(u) @ (sys.damping_diag(0.0) * u)
    assert lhs == pytest.approx(2 * 0.02 * sys.energy(u), abs=1e-14)


def test_damping_case_values():
    d = make_damping(CASE_I, 6)
    np.testing.assert_allclose(d.diag(3.0), 0.5)
    d3 = make_damping(DampingCase("time-dependent-equal", 1.0), 6)
    np.testing.assert_allclose(d3.diag(0.0), 2.0)
    kdv3 = make_damping(DampingCase("time-dependent-equal", 0.5), 6)
    np.testing.assert_allclose(kdv3.diag(0.0), 1.0)


def test_unequal_damping_bounds_and_reproducibility():
    case = DampingCase("constant-unequal", 0.25, spread=0.1, seed=42)
    a = make_damping(case, 500).diag(0.0)
    b = make_damping(case, 500).diag(7.0)
    np.testing.assert_array_equal(a, b)
    assert a.min() >= 0.45 and a.max() <= 0.55
    assert np.ptp(a) > 0
    other = make_damping(DampingCase("constant-unequal", 0.25, seed=43), 500).diag(0.0)
    assert not np.array_equal(a, other)


def test_unequal_damping_needs_seed():
    with pytest.raises(MissingSeed):
        make_damping(DampingCase("constant-unequal", 0.25), 4)


def test_unknown_damping_kind():
    with pytest.raises(ValueError):
        DampingCase("quadratic")


@pytest.mark.parametrize("case", [
    CASE_I,
    DampingCase("constant-unequal", 0.25, seed=1),
    DampingCase("time-dependent-equal", 1.0),
])
def test_antiderivative_differentiates_to_diag(case):
    d = make_damping(case, 8)
    for t in np.random.default_rng(5).uniform(0, 5, 6):
        fd = (d.antideriv(t + 1e-5) - d.antideriv(t - 1e-5)) / 2e-5
        np.testing.assert_allclose(fd, d.diag(t), atol=1e-6)


@pytest.mark.parametrize("case", [CASE_I, DampingCase("time-dependent-equal", 0.5)])
def test_eta_integral_matches_quadrature(case):
    sys = make_kdv_h2(N, DX, KdVParams(), case)
    inv = sys.invariant("H2")
    val, _ = integrate.quad(inv.eta, 0.3, 1.7, epsabs=1e-14)
    assert inv.eta_integral(0.3, 1.7) == pytest.approx(val, abs=1e-10)
    mass = make_burgers(N, DX, case).invariant("M")
    val, _ = integrate.quad(mass.eta, 0.3, 1.7, epsabs=1e-14)
    assert mass.eta_integral(0.3, 1.7) == pytest.approx(val, abs=1e-10)


def test_kdv_case3_h2_rate():
    # gamma_k(t) = e^{-t}/2: eta = 4 gamma, integral 2 (e^{-a} - e^{-b})
    inv = make_kdv_h2(N, DX, KdVParams(), DampingCase("time-dependent-equal", 0.5)).invariant("H2")
    assert inv.eta_integral(0.2, 0.5) == pytest.approx(2 * (np.exp(-0.2) - np.exp(-0.5)), rel=1e-14)


def test_unequal_damping_registers_no_eta():
    case = DampingCase("constant-unequal", 0.25, seed=1)
    assert not make_burgers(N, DX, case).invariant("M").has_eta
    assert not make_kdv_h2(N, DX, KdVParams(), case).invariant("H2").has_eta
