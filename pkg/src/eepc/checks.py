"""Self-checks of tableau identities and operator skewness, reported with measured defects."""
from dataclasses import dataclass

import numpy as np

from .systems import (
    DampingCase,
    KdVParams,
    build_fd_operators,
    kdv_a_matrix,
    make_burgers,
    make_kdv_h1,
    make_kdv_h2,
)
from .tableau import (
    gauss_legendre,
    make_tableau,
    make_tableau_general,
    order_condition_defect,
    row_sum_defect,
    symmetry_defect,
)


@dataclass
class CheckResult:
    name: str
    defect: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.defect) and self.defect <= self.tol)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44s} defect={self.defect:.3e}  tol={self.tol:.0e}"


def _skew_defect(S, rng, n):
    y, z = rng.standard_normal((2, n))
    return abs(y @ (S @ z) + z @ (S @ y)) / (np.linalg.norm(y) * np.linalg.norm(z))


def tableau_checks():
    out = []
    for s in range(1, 5):
        tab = make_tableau(s)
        gen = make_tableau_general(s)
        out.append(CheckResult(f"s={s} closed form vs Gauss construction",
                               float(np.max(np.abs(tab.a_coeffs - gen.a_coeffs))), 1e-12))
        exact = max(abs(float(v)) for k in range(1, s + 1)
                    for v in order_condition_defect(tab, k, exact=True))
        out.append(CheckResult(f"s={s} order conditions k=1..{s} (exact)", exact, 1e-13))
        flt = max(float(np.max(np.abs(order_condition_defect(tab, k)))) for k in range(1, s + 1))
        out.append(CheckResult(f"s={s} order conditions k=1..{s} (float)", flt, 1e-13))
        out.append(CheckResult(f"s={s} C_tau = tau",
                               float(np.max(np.abs(row_sum_defect(tab)))), 1e-13))
        out.append(CheckResult(f"s={s} A(t,s) + A(1-t,1-s) = 1 on 20x20", symmetry_defect(tab), 1e-12))
    nodes, weights = gauss_legendre(8)
    out.append(CheckResult("quadrature q=8 weights sum to 1", abs(weights.sum() - 1.0), 1e-14))
    out.append(CheckResult("quadrature q=8 integrates sigma^15", abs(weights @ nodes**15 - 1 / 16), 1e-14))
    return out


def operator_checks(seed=0):
    rng = np.random.default_rng(seed)
    n, dx = 40, 0.1
    ops = build_fd_operators(n, dx)
    d1, d2, d3 = (m.toarray() for m in (ops.d1, ops.d2, ops.d3))
    out = [
        CheckResult("D1 skew-symmetric", float(np.max(np.abs(d1 + d1.T))), 1e-12),
        CheckResult("D2 symmetric", float(np.max(np.abs(d2 - d2.T))), 1e-12),
        CheckResult("D3 = D1 D2 skew-symmetric", float(np.max(np.abs(d3 + d3.T))) * dx**3, 1e-12),
        CheckResult("D1, D2 row sums zero",
                    float(max(np.max(np.abs(d1.sum(1))), np.max(np.abs(d2.sum(1))) * dx**2)), 1e-12),
        CheckResult("1^T D1 = 0", float(np.max(np.abs(d1.sum(0)))), 1e-12),
    ]
    u = rng.standard_normal(n)
    out.append(CheckResult("A(u) skew (random u)", _skew_defect(kdv_a_matrix(u, dx), rng, n) * dx, 1e-12))
    case = DampingCase("constant-equal", 0.01)
    for sys in (make_burgers(n, dx, case), make_kdv_h1(n, dx, KdVParams(), case),
                make_kdv_h2(n, dx, KdVParams(), case)):
        S = sys.skew(0.0, u)
        out.append(CheckResult(f"{sys.name} skew operator", _skew_defect(S, rng, n), 1e-12))
    return out


def run_self_checks():
    return tableau_checks() + operator_checks()
