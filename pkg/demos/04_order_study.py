"""
Temporal convergence
====================

On the damped linear rotation the global error falls like dt^(2s). On
nonlinear problems with damping the stage map evaluates the vector field in
the transformed variable, which caps the observed order at two; without
damping the full order returns.
"""

# %%
import numpy as np

from eepc import DampingCase, make_burgers, make_linear_rotation, make_tableau, order_study
from eepc.systems import gaussian_profile, linear_rotation_exact

tabs = [make_tableau(s) for s in range(1, 5)]

# %%
x0 = np.array([1.0, 0.5])
ref = linear_rotation_exact(1.0, x0, 10.0, 0.1)
study = order_study(make_linear_rotation(10.0, 0.1), x0, 1.0, [0.1, 0.05, 0.025, 0.0125], tabs,
                    reference=ref)
print("linear rotation:", {s: round(v, 2) for s, v in study.slopes.items()})

# %%
n1, dx = 80, np.pi / 40
u0 = gaussian_profile(-np.pi + dx * np.arange(1, n1 + 1))
for case in (DampingCase("constant-equal", 0.25), DampingCase("none")):
    st = order_study(make_burgers(n1, dx, case), u0, 2.0, [0.2, 0.1, 0.05], tabs[:3], dt_ref=0.0125)
    print(f"burgers {case.kind}:", {s: None if v is None else round(v, 2) for s, v in st.slopes.items()})

# %%
# Wall-clock per run is kept alongside each error.
for row in study.rows[:4]:
    print(row)
