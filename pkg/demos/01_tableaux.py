"""
Collocation tableaux
====================

The stage coefficients ``A(tau, sigma)`` for s = 1..4 are stored as exact
fractions. A second construction from Gauss-Legendre collocation points
reproduces them and extends to larger s.
"""

# %%
import numpy as np

from eepc import make_tableau, make_tableau_general
from eepc.tableau import order_condition_defect, symmetry_defect

# %%
# The s = 2 tableau at the midpoint gives the familiar 5/4 - 3/2 sigma weights.
tab = make_tableau(2)
print("A(1/2, sigma) coefficients:", tab.exact_row(0.5))

# %%
# Order conditions int A(tau, sigma) sigma^(k-1) dsigma = tau^k / k and the
# symmetry identity A(tau, sigma) + A(1 - tau, 1 - sigma) = 1.
for s in range(1, 5):
    tab = make_tableau(s)
    worst = max(np.max(np.abs(order_condition_defect(tab, k))) for k in range(1, s + 1))
    print(f"s={s}  order {tab.order}  condition defect {worst:.1e}  symmetry {symmetry_defect(tab):.1e}")

# %%
# The general construction agrees with the closed forms and also gives s = 5.
print(np.max(np.abs(make_tableau_general(4).a_coeffs - make_tableau(4).a_coeffs)))
print(make_tableau_general(5).a_coeffs.shape)
