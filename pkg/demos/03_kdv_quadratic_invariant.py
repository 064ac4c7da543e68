"""
KdV with a quadratic invariant
==============================

Written with the state-dependent skew operator, KdV has H2 = |u|^2 / 2 as its
Hamiltonian. Under equal damping H2 decays at 4 gamma, and the integrator
keeps that law to round-off.
"""

# %%
import numpy as np

from eepc import DampingCase, KdVParams, integrate, make_kdv_h2, make_tableau, residual_known_eta
from eepc.systems import gaussian_profile

L, dx = 4.0, 0.0808
n1 = int(round(2 * L / dx))
x = -L + dx * np.arange(1, n1 + 1)
u0 = gaussian_profile(x)
params = KdVParams(alpha=-3 / 8, rho=-0.1, nu=-1e-5)

# %%
for case in (DampingCase("constant-equal", 0.01), DampingCase("time-dependent-equal", 0.5)):
    sys = make_kdv_h2(n1, dx, params, case)
    for s in (1, 2, 4):
        traj = integrate(sys, u0, 2.0, 0.009, make_tableau(s))
        r = residual_known_eta(traj, sys.invariant("H2"))
        print(f"{case.kind:22s} s={s}  max |R_H2| = {r.max_abs():.2e}")

# %%
# The cubic energy H1 is only monitored; it is not a Hamiltonian of this form.
h1 = sys.invariant("H1")
print("H1 at t=0 and t=T:", h1.eval(traj.states[0]), h1.eval(traj.states[-1]))
