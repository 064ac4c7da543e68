"""Continuous-stage Runge-Kutta tableaux of the energy-preserving collocation family.

The coefficient ``A(tau, sigma)`` is stored as a bivariate polynomial::

    A(tau, sigma) = sum_{m, n} a[m, n] * tau**m * sigma**n

with ``m = 0..s`` and ``n = 0..s-1``. The hand-derived tableaux for ``s <= 4`` are kept
as exact rationals so they can be compared coefficient-for-coefficient.
"""
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from .errors import UnsupportedStageCount

__all__ = [
    "CollocationTableau",
    "gauss_legendre",
    "make_tableau",
    "make_tableau_general",
    "order_condition_defect",
    "row_sum_defect",
    "symmetry_defect",
]

DEFAULT_QUADRATURE = 8


def gauss_legendre(q):
    """Gauss-Legendre rule with `q` nodes shifted to [0, 1].

    Exact for polynomials of degree ``2q - 1``. Returns ``(nodes, weights)``.
    """
    if q < 1:
        raise ValueError(f"quadrature needs at least one node, got {q}")
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x + 1.0), 0.5 * w


# Rows are powers of sigma, columns powers of tau (transposed on construction).
_CLOSED_FORMS = {
    1: [[0, 1]],
    2: [[0, 4, -3],
        [0, -6, 6]],
    3: [[0, 9, -18, 10],
        [0, -36, 96, -60],
        [0, 30, -90, 60]],
    4: [[0, 16, -60, 80, -35],
        [0, -120, 600, -900, 420],
        [0, 240, -1350, 2160, -1050],
        [0, -140, 840, -1400, 700]],
}


@dataclass(frozen=True)
class CollocationTableau:
    """Tableau ``A(tau, sigma)`` with ``s`` stages and an attached quadrature rule.

    Attributes
    ----------
    s : int
        Stage count; the method has order ``2 s``.
    a_coeffs : ndarray, shape (s + 1, s)
        ``a_coeffs[m, n]`` multiplies ``tau**m * sigma**n``.
    quad_nodes, quad_weights : ndarray
        Quadrature rule on [0, 1] used for the integrals over ``sigma``.
    exact : tuple of tuple of Fraction, optional
        Exact rational coefficients when the tableau is known in closed form.
    """

    s: int
    a_coeffs: np.ndarray
    quad_nodes: np.ndarray
    quad_weights: np.ndarray
    exact: tuple = field(default=None, compare=False, repr=False)

    @property
    def order(self):
        return 2 * self.s

    @property
    def nodes(self):
        """Equispaced abscissae ``j / s`` carrying the stage values."""
        return np.arange(self.s + 1) / self.s

    @property
    def quadrature(self):
        return list(zip(self.quad_nodes.tolist(), self.quad_weights.tolist()))

    def __call__(self, tau, sigma):
        tau, sigma = np.broadcast_arrays(np.asarray(tau, float), np.asarray(sigma, float))
        return P.polyval2d(tau, sigma, self.a_coeffs)

    def row(self, tau):
        """Coefficients in ``sigma`` of ``A(tau, .)`` at a fixed ``tau``."""
        return P.polyval(tau, self.a_coeffs)

    def exact_row(self, tau):
        """Exact version of :meth:`row` for a rational ``tau``."""
        if self.exact is None:
            raise ValueError("tableau has no exact representation")
        tau = Fr(tau)
        return [sum(c * tau**m for m, c in enumerate(col)) for col in zip(*self.exact)]

    def with_quadrature(self, q):
        nodes, weights = gauss_legendre(q)
        return CollocationTableau(self.s, self.a_coeffs, nodes, weights, self.exact)


def make_tableau(s, q=DEFAULT_QUADRATURE):
    """Closed-form tableau of order ``2 s`` for ``s`` in 1..4.

    ``s = 1`` gives ``A = tau``, the averaged vector field method.
    """
    if s not in _CLOSED_FORMS:
        raise UnsupportedStageCount(f"closed-form tableaux exist for s = 1..4, got {s}")
    exact = tuple(tuple(Fr(v) for v in col) for col in zip(*_CLOSED_FORMS[s]))
    coeffs = np.array([[float(v) for v in row] for row in exact])
    nodes, weights = gauss_legendre(q)
    return CollocationTableau(s, coeffs, nodes, weights, exact)


def _legendre_roots(s):
    """Roots of the degree-`s` Legendre polynomial on [0, 1], Newton-polished in mpmath."""
    roots = []
    for x in np.polynomial.legendre.leggauss(s)[0]:
        x = mpmath.mpf(x)
        for _ in range(8):
            x -= mpmath.legendre(s, x) / mpmath.diff(lambda y: mpmath.legendre(s, y), x)
        roots.append((x + 1) / 2)
    return roots


def _mp_polymul(p, q):
    out = [mpmath.mpf(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


@lru_cache(maxsize=None)
def _general_coeffs(s):
    # Coefficients reach ~1e3 for s = 4, so the sum is formed in extended precision.
    with mpmath.workdps(50):
        c = _legendre_roots(s)
        a = [[mpmath.mpf(0)] * s for _ in range(s + 1)]
        for i in range(s):
            ell = [mpmath.mpf(1)]
            for j in range(s):
                if j != i:
                    ell = _mp_polymul(ell, [-c[j] / (c[i] - c[j]), 1 / (c[i] - c[j])])
            prim = [mpmath.mpf(0)] + [v / (n + 1) for n, v in enumerate(ell)]
            b = sum(prim)
            for m, pm in enumerate(prim):
                for n, ln in enumerate(ell):
                    a[m][n] += pm * ln / b
        return np.array([[float(v) for v in row] for row in a])


def make_tableau_general(s, q=DEFAULT_QUADRATURE):
    """Tableau built from the Lagrange basis on Gauss-Legendre collocation points.

    Works for any ``s >= 1``; for ``s <= 4`` it reproduces :func:`make_tableau` up to
    rounding and is meant for cross-validation.
    """
    if s < 1:
        raise UnsupportedStageCount(f"stage count must be positive, got {s}")
    nodes, weights = gauss_legendre(q)
    return CollocationTableau(s, _general_coeffs(s).copy(), nodes, weights)


def order_condition_defect(tab, k, exact=False):
    """Coefficients in ``tau`` of ``int_0^1 A(tau, sigma) sigma**(k-1) dsigma - tau**k / k``.

    Returns a list of Fractions when ``exact`` is set, otherwise a float array.
    """
    if exact:
        rows = tab.exact
        out = [sum(c / (n + k) for n, c in enumerate(row)) for row in rows]
        out[k] -= Fr(1, k)
        return out
    a = tab.a_coeffs
    out = a @ (1.0 / (np.arange(a.shape[1]) + k))
    out[k] -= 1.0 / k
    return out


def row_sum_defect(tab, exact=False):
    """``C_tau - tau`` as a polynomial in ``tau``; the k = 1 order condition."""
    return order_condition_defect(tab, 1, exact=exact)


def symmetry_defect(tab, n=20):
    """Max of ``|A(tau, sigma) + A(1 - tau, 1 - sigma) - 1|`` on an ``n x n`` grid."""
    g = np.linspace(0.0, 1.0, n)
    tau, sigma = np.meshgrid(g, g, indexing="ij")
    return float(np.max(np.abs(tab(tau, sigma) + tab(1 - tau, 1 - sigma) - 1.0)))
