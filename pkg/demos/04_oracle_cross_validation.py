#!/usr/bin/env python3
"""Cross-validate the exact front against a front-tracking simulation.

The finite-difference oracle knows nothing about the exact solution beyond
its initial profile: it advances the full moving-boundary system on
front-fixed grids.  If the exact front speed is right, the simulated fronts
must track it, and refining the grid must shrink the disagreement.
"""

from stefansym import aluminium_spec, build_transformed_bvp
from stefansym.fd_oracle import validate_self_similar, validate_travelling_wave
from stefansym.self_similar import solve_self_similar
from stefansym.travelling_wave import solve_travelling_wave

bvp = build_transformed_bvp(aluminium_spec())
sol = solve_travelling_wave(bvp)
print(f"exact front speed: {sol.mu:.5f} m/s; liquid thickness "
      f"{sol.delta * 1e3:.3f} mm")
print("running the oracle over three grids (fronts travel 4 thicknesses)...")

val = validate_travelling_wave(bvp, sol, grids=((21, 150), (41, 300),
                                                (81, 600)), travel=4.0)
print(f"{'grid':>10} {'fitted speed':>13} {'rel. error':>11} "
      f"{'profile drift':>14}")
for g in val.grids:
    print(f"{g.n_liq:>4}x{g.n_sol:<5} {g.fitted_v2:13.6f} "
          f"{g.velocity_error:11.2e} {g.profile_drift:14.2e}")
print(f"monotone convergence: {val.monotone}")

print()
print("same idea for the 1/sqrt(t) problem: fronts must follow omega*sqrt(t)")
ss_bvp = build_transformed_bvp(aluminium_spec(), time_law="inverse_sqrt")
ss = solve_self_similar(ss_bvp)
val = validate_self_similar(ss_bvp, ss, t0=0.01, t_end=0.016, grid=(17, 900))
print(f"shooting front coordinate: {ss.omega2:.6f}")
print(f"oracle-fitted coordinate:  {val.omega2_fit:.6f} "
      f"({val.omega2_dev:.2%} off)")
print(f"fitted power-law exponents: {val.exponent_s1:.4f}, "
      f"{val.exponent_s2:.4f} (exact: 0.5)")
