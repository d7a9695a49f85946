#!/usr/bin/env python3
"""Self-similar fronts under a 1/sqrt(t) surface pair.

When the absorbed flux and the evaporation speed both decay like 1/sqrt(t),
the whole problem collapses onto omega = x/sqrt(t): both fronts sit at fixed
similarity coordinates and the profiles solve a pair of nonlinear ODEs.  The
reduced problem has no closed form, so it is solved by damped-Newton shooting
on the surface heat content and the front coordinate.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stefansym import aluminium_spec, build_transformed_bvp, kirchhoff_inverse
from stefansym.self_similar import solve_self_similar

bvp = build_transformed_bvp(aluminium_spec(), time_law="inverse_sqrt")
sol = solve_self_similar(bvp)

print(f"surface coordinate  omega1 = {sol.omega1:.6f} m/sqrt(s)")
print(f"front coordinate    omega2 = {sol.omega2:.6f} m/sqrt(s)")
print(f"boundary residual          = {sol.bc_residual:.2e}")
print(f"Newton iterations          = {sol.iterations}")

# fronts in physical space: s_k(t) = omega_k * sqrt(t)
t = np.linspace(1e-4, 0.05, 200)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.plot(t, sol.omega1 * np.sqrt(t) * 1e3, label="evaporating surface")
ax1.plot(t, sol.omega2 * np.sqrt(t) * 1e3, label="melting front")
ax1.set_xlabel("time [s]")
ax1.set_ylabel("position [mm]")
ax1.legend()
ax1.set_title("square-root front laws")

# temperature profile across both phases in the similarity coordinate
spec = aluminium_spec()
om_l, u = sol.u_profile
om_s, v = sol.v_profile
ax2.plot(om_l, kirchhoff_inverse(spec, "liquid", u), lw=2, label="liquid")
keep = om_s <= sol.omega2 + 20 * (om_s[1] - om_s[0]) * 50
ax2.plot(om_s[keep], kirchhoff_inverse(spec, "solid", v[keep]), lw=2,
         label="solid")
ax2.axvline(sol.omega2, color="k", ls="--", lw=0.8)
ax2.set_xlabel(r"$x/\sqrt{t}$  [m/$\sqrt{\mathrm{s}}$]")
ax2.set_ylabel("temperature [K]")
ax2.legend()
ax2.set_title("similarity profile")

fig.tight_layout()
fig.savefig("similarity_shooting.png", dpi=150)
print("wrote similarity_shooting.png")
