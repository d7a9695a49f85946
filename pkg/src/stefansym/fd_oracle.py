"""Front-tracking finite-difference solver for the moving-boundary system.

An independent validation route: each phase domain is mapped onto a fixed
unit interval (front-fixing), the heat-content equations advance with an
explicit conservative stencil, the surface recedes at the evaporation speed,
and the melting front moves by the latent-heat flux balance.  Runs are
deterministic: identical inputs step bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .material import TransformedBVP, TIME_LAW_STEADY, TIME_LAW_INVERSE_SQRT
from .self_similar import SelfSimilarSolution
from .travelling_wave import TravellingWaveSolution, enthalpy_profile

__all__ = [
    "FrontTrackedState",
    "CflError",
    "FrontCollapseError",
    "SurfaceSolveError",
    "RunRecord",
    "GridValidation",
    "TravellingWaveValidation",
    "SelfSimilarValidation",
    "cfl_bound",
    "step",
    "run",
    "seed_travelling_wave",
    "seed_self_similar",
    "validate_travelling_wave",
    "validate_self_similar",
    "fit_front_velocity",
    "fit_sqrt_front",
]


class CflError(ValueError):
    """Requested time step exceeds the explicit stability bound."""


class FrontCollapseError(RuntimeError):
    """The liquid layer shrank below the resolvable width."""


class SurfaceSolveError(RuntimeError):
    """The surface flux balance could not be solved for the boundary node."""


@dataclass(frozen=True)
class FrontTrackedState:
    """Fronts plus per-phase nodal heat contents on mapped uniform grids."""

    t: float
    s1: float
    s2: float
    x_max: float
    u: np.ndarray      # liquid nodes on [s1, s2], surface first
    v: np.ndarray      # solid nodes on [s2, x_max], front first

    def __post_init__(self):
        if not self.s1 < self.s2 < self.x_max:
            raise ValueError("fronts must satisfy s1 < s2 < x_max")

    @property
    def n_liq(self) -> int:
        return len(self.u)

    @property
    def n_sol(self) -> int:
        return len(self.v)

    def liquid_x(self):
        return np.linspace(self.s1, self.s2, self.n_liq)

    def solid_x(self):
        return np.linspace(self.s2, self.x_max, self.n_sol)

    def dx_liq(self) -> float:
        return (self.s2 - self.s1) / (self.n_liq - 1)

    def dx_sol(self) -> float:
        return (self.x_max - self.s2) / (self.n_sol - 1)


def front_speeds(state: FrontTrackedState, bvp: TransformedBVP):
    """Surface recession speed and melting-front speed at the current state."""
    V1 = float(bvp.h_at(state.t, state.u[0]))
    dxl, dxs = state.dx_liq(), state.dx_sol()
    u, v = state.u, state.v
    du = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dxl)
    dv = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dxs)
    V2 = (float(bvp.d2(bvp.v_m)) * dv - float(bvp.d1(bvp.u_m)) * du) / bvp.H2
    return V1, V2


def cfl_bound(state: FrontTrackedState, bvp: TransformedBVP,
              factor: float = 0.4) -> float:
    """Largest stable explicit step, ``factor * dx^2 / max(d)`` per subgrid."""
    d1_max = float(np.max(bvp.d1(state.u)))
    d2_max = float(np.max(bvp.d2(state.v)))
    return factor * min(state.dx_liq() ** 2 / d1_max,
                        state.dx_sol() ** 2 / d2_max)


def _solve_surface_node(bvp, t, u1, u2, dx, guess):
    """Boundary heat content satisfying the one-sided flux balance."""
    def g(u0):
        grad = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * dx)
        return (float(bvp.d1(u0)) * grad
                - bvp.H1 * float(bvp.h_at(t, u0))
                + float(bvp.q_at(t, u0)))

    scale = float(bvp.q_at(t, guess)) + bvp.H1 * float(bvp.h_at(t, guess))
    u0 = float(guess)
    h_step = 1e-7 * abs(bvp.u_m)
    for _ in range(60):
        val = g(u0)
        if abs(val) <= 1e-12 * scale + 1e-300:
            return u0
        slope = (g(u0 + h_step) - val) / h_step
        if slope == 0.0:
            break
        correction = val / slope
        u0 = u0 - correction
        if not np.isfinite(u0) or u0 <= 0.0:
            break
        if abs(correction) <= 1e-14 * max(abs(u0), abs(bvp.u_m)):
            return u0
    # bracketed fallback
    from scipy.optimize import brentq
    lo, hi = 0.5 * bvp.u_m, 1.5 * bvp.u_cap
    try:
        return brentq(g, lo, hi, rtol=1e-14)
    except ValueError as exc:
        raise SurfaceSolveError(
            f"no surface root in [{lo:.3e}, {hi:.3e}] at t={t:.6e}") from exc


def step(state: FrontTrackedState, bvp: TransformedBVP,
         dt: float) -> FrontTrackedState:
    """One explicit front-tracking update.

    Interior nodes advance with a conservative diffusion stencil plus the
    mesh-motion advection of the front-fixed map; fronts move by forward
    Euler; the melting values and the far field are re-pinned and the surface
    node re-solves its flux balance at the new time.
    """
    bound = cfl_bound(state, bvp)
    if dt > bound * (1.0 + 1e-9):
        raise CflError(f"dt={dt:.3e} exceeds stability bound {bound:.3e}")

    u, v = state.u, state.v
    L1 = state.s2 - state.s1
    L2 = state.x_max - state.s2
    dy = 1.0 / (state.n_liq - 1)
    dz = 1.0 / (state.n_sol - 1)
    V1, V2 = front_speeds(state, bvp)

    y = np.linspace(0.0, 1.0, state.n_liq)
    z = np.linspace(0.0, 1.0, state.n_sol)

    # liquid interior
    d_half = bvp.d1(0.5 * (u[:-1] + u[1:]))
    flux = d_half * np.diff(u) / dy
    diff = (flux[1:] - flux[:-1]) / (dy * L1 * L1)
    adv = ((V1 * (1.0 - y[1:-1]) + V2 * y[1:-1]) / L1
           * (u[2:] - u[:-2]) / (2.0 * dy))
    u_new = u.copy()
    u_new[1:-1] = u[1:-1] + dt * (diff + adv)

    # solid interior
    d_half = bvp.d2(0.5 * (v[:-1] + v[1:]))
    flux = d_half * np.diff(v) / dz
    diff = (flux[1:] - flux[:-1]) / (dz * L2 * L2)
    adv = (V2 * (1.0 - z[1:-1]) / L2) * (v[2:] - v[:-2]) / (2.0 * dz)
    v_new = v.copy()
    v_new[1:-1] = v[1:-1] + dt * (diff + adv)

    t_new = state.t + dt
    s1_new = state.s1 + dt * V1
    s2_new = state.s2 + dt * V2
    dx_new = (s2_new - s1_new) / (state.n_liq - 1)
    if s2_new - s1_new <= 2.0 * dx_new or s2_new - s1_new <= 0.0:
        raise FrontCollapseError(
            f"liquid layer collapsed at t={t_new:.6e}")

    u_new[-1] = bvp.u_m
    v_new[0] = bvp.v_m
    v_new[-1] = bvp.v_inf
    u_new[0] = _solve_surface_node(bvp, t_new, u_new[1], u_new[2],
                                   dx_new, guess=u[0])

    return replace(state, t=t_new, s1=s1_new, s2=s2_new, u=u_new, v=v_new)


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _total_enthalpy(state: FrontTrackedState) -> float:
    return (_trapezoid(state.u, dx=state.dx_liq())
            + _trapezoid(state.v, dx=state.dx_sol()))


def _boundary_rate(state: FrontTrackedState, bvp: TransformedBVP):
    """Rate of change of the total heat content from the boundary terms."""
    V1, V2 = front_speeds(state, bvp)
    dxs = state.dx_sol()
    v = state.v
    far_flux = float(bvp.d2(v[-1])) * (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) \
        / (2.0 * dxs)
    q = float(bvp.q_at(state.t, state.u[0]))
    rate = (q - bvp.H1 * V1 - V1 * state.u[0]
            + V2 * (bvp.u_m - bvp.v_m) - bvp.H2 * V2 + far_flux)
    scale = (q + bvp.H1 * abs(V1) + abs(V1) * abs(state.u[0])
             + abs(V2) * (abs(bvp.u_m) + abs(bvp.v_m))
             + bvp.H2 * abs(V2) + abs(far_flux))
    return rate, scale


@dataclass
class RunRecord:
    """Trajectory and bookkeeping of one oracle run."""

    times: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    final: FrontTrackedState
    n_steps: int
    snapshots: list = field(default_factory=list)
    conservation_defects: list = field(default_factory=list)
    u_range: tuple = (np.nan, np.nan)
    v_range: tuple = (np.nan, np.nan)


def run(state: FrontTrackedState, bvp: TransformedBVP, t_end: float,
        cfl: float = 0.4, snapshot_every: float = None,
        bookkeep_every: int = 100) -> RunRecord:
    """Advance to ``t_end`` with automatic stable steps.

    Records front trajectories every step, optional field snapshots on a
    fixed simulated-time cadence, windowed conservation defects, and the
    visited field ranges.
    """
    times, s1s, s2s = [state.t], [state.s1], [state.s2]
    snapshots = []
    defects = []
    u_min = u_max = state.u[0]
    v_min = v_max = state.v[0]
    next_snapshot = state.t if snapshot_every else None
    window_E = _total_enthalpy(state)
    window_flux = 0.0
    window_scale = 0.0
    window_t = state.t
    n_steps = 0

    while state.t < t_end * (1.0 - 1e-12):
        if next_snapshot is not None and state.t >= next_snapshot * (1 - 1e-12):
            snapshots.append((state.t, state.s1, state.s2,
                              state.u.copy(), state.v.copy()))
            next_snapshot += snapshot_every
        dt = min(cfl_bound(state, bvp, factor=cfl), t_end - state.t)
        rate, scale = _boundary_rate(state, bvp)
        state = step(state, bvp, dt)
        n_steps += 1
        window_flux += rate * dt
        window_scale += scale * dt
        times.append(state.t)
        s1s.append(state.s1)
        s2s.append(state.s2)
        u_min = min(u_min, float(np.min(state.u)))
        u_max = max(u_max, float(np.max(state.u)))
        v_min = min(v_min, float(np.min(state.v)))
        v_max = max(v_max, float(np.max(state.v)))
        if n_steps % bookkeep_every == 0:
            E = _total_enthalpy(state)
            defect = abs((E - window_E) - window_flux) \
                / max(window_scale, abs(E - window_E), 1e-300)
            defects.append((state.t, defect))
            window_E = E
            window_flux = 0.0
            window_scale = 0.0
            window_t = state.t

    if next_snapshot is not None:
        snapshots.append((state.t, state.s1, state.s2,
                          state.u.copy(), state.v.copy()))
    return RunRecord(times=np.asarray(times), s1=np.asarray(s1s),
                     s2=np.asarray(s2s), final=state, n_steps=n_steps,
                     snapshots=snapshots, conservation_defects=defects,
                     u_range=(u_min, u_max), v_range=(v_min, v_max))


def fit_front_velocity(times, positions, skip_fraction: float = 0.1):
    """Least-squares straight-line speed of a front trajectory."""
    times = np.asarray(times)
    positions = np.asarray(positions)
    start = int(len(times) * skip_fraction)
    slope, _ = np.polyfit(times[start:], positions[start:], 1)
    return float(slope)


def fit_sqrt_front(times, positions, skip_fraction: float = 0.1):
    """Fit ``s(t) = w*sqrt(t)``; returns (w, log-log exponent)."""
    times = np.asarray(times)
    positions = np.asarray(positions)
    start = int(len(times) * skip_fraction)
    t, s = times[start:], positions[start:]
    basis = np.vstack([np.sqrt(t), np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(basis, s, rcond=None)
    exponent, _ = np.polyfit(np.log(t), np.log(s), 1)
    return float(coef[0]), float(exponent)


# --- seeding from reduced solutions ------------------------------------------

def seed_travelling_wave(bvp: TransformedBVP, sol: TravellingWaveSolution,
                         n_liq: int, n_sol: int,
                         t_end: float) -> FrontTrackedState:
    """Initialize from the exact plane-front profile at t = 0."""
    x_max = sol.delta + 20.0 * math.sqrt(float(bvp.d2(bvp.v_inf)) * t_end)
    x_liq = np.linspace(0.0, sol.delta, n_liq)
    x_sol = np.linspace(sol.delta, x_max, n_sol)
    _, _, u = enthalpy_profile(sol, bvp, x_liq)
    _, _, v = enthalpy_profile(sol, bvp, x_sol)
    u[-1] = bvp.u_m
    v[0] = bvp.v_m
    return FrontTrackedState(t=0.0, s1=0.0, s2=sol.delta, x_max=x_max,
                             u=u, v=v)


def seed_self_similar(bvp: TransformedBVP, sol: SelfSimilarSolution,
                      t0: float, n_liq: int, n_sol: int,
                      t_end: float) -> FrontTrackedState:
    """Initialize from the similarity profile at time ``t0 > 0``."""
    if t0 <= 0.0:
        raise ValueError("t0 must be positive")
    rt0 = math.sqrt(t0)
    s1, s2 = sol.omega1 * rt0, sol.omega2 * rt0
    x_max = sol.omega2 * math.sqrt(t_end) \
        + 20.0 * math.sqrt(float(bvp.d2(bvp.v_inf)) * t_end)
    x_liq = np.linspace(s1, s2, n_liq)
    x_sol = np.linspace(s2, x_max, n_sol)
    u = np.asarray(sol.u_at(x_liq / rt0), dtype=float)
    v = np.asarray(sol.v_at(x_sol / rt0), dtype=float)
    u[-1] = bvp.u_m
    v[0] = bvp.v_m
    v[-1] = bvp.v_inf
    return FrontTrackedState(t=t0, s1=s1, s2=s2, x_max=x_max, u=u, v=v)


# --- validation drivers -------------------------------------------------------

@dataclass(frozen=True)
class GridValidation:
    n_liq: int
    n_sol: int
    fitted_v1: float
    fitted_v2: float
    velocity_error: float      # max relative deviation of either front speed
    profile_drift: float       # Linf drift in the co-moving frame, normalized
    thickness_drift: float
    n_steps: int
    max_conservation_defect: float


@dataclass(frozen=True)
class TravellingWaveValidation:
    mu: float
    grids: tuple
    monotone: bool

    @property
    def finest(self) -> GridValidation:
        return self.grids[-1]


def validate_travelling_wave(bvp: TransformedBVP, sol: TravellingWaveSolution,
                             grids=((21, 150), (41, 300), (81, 600)),
                             travel: float = 10.0,
                             cfl: float = 0.4) -> TravellingWaveValidation:
    """Seed the oracle with the exact plane front and measure its drift.

    Runs until the fronts travel ``travel`` liquid thicknesses, on each grid,
    and reports fitted front speeds, co-moving profile drift, and thickness
    drift.  Grid errors should shrink monotonically.
    """
    if bvp.time_law != TIME_LAW_STEADY:
        raise ValueError("plane-front validation requires the steady law")
    t_end = travel * sol.delta / sol.mu
    reports = []
    for n_liq, n_sol in grids:
        state = seed_travelling_wave(bvp, sol, n_liq, n_sol, t_end)
        rec = run(state, bvp, t_end, cfl=cfl)
        v1 = fit_front_velocity(rec.times, rec.s1)
        v2 = fit_front_velocity(rec.times, rec.s2)
        vel_err = max(abs(v1 - sol.mu), abs(v2 - sol.mu)) / sol.mu

        # compare each phase in its own front-anchored frame so the residual
        # thickness error does not alias into a phase mismatch at the pins
        final = rec.final
        xi_liq = (final.liquid_x() - final.s1) \
            / (final.s2 - final.s1) * sol.delta
        u_exact = sol.liquid_offset(sol.liquid_map.inverse(xi_liq)) + bvp.u_m
        drift_u = np.max(np.abs(final.u - u_exact)) / (sol.u_s - bvp.u_m)
        xi_sol = sol.delta + (final.solid_x() - final.s2)
        v_exact = sol.solid_offset(sol.solid_map.inverse(xi_sol)) + bvp.v_inf
        drift_v = np.max(np.abs(final.v - v_exact)) / abs(sol.Vm)
        thickness = abs((final.s2 - final.s1) - sol.delta) / sol.delta
        worst_defect = max((d for _, d in rec.conservation_defects),
                           default=0.0)
        reports.append(GridValidation(
            n_liq=n_liq, n_sol=n_sol, fitted_v1=v1, fitted_v2=v2,
            velocity_error=vel_err,
            profile_drift=float(max(drift_u, drift_v)),
            thickness_drift=float(thickness), n_steps=rec.n_steps,
            max_conservation_defect=worst_defect))
    errors = [r.velocity_error for r in reports]
    monotone = all(errors[i + 1] < errors[i] for i in range(len(errors) - 1))
    return TravellingWaveValidation(mu=sol.mu, grids=tuple(reports),
                                    monotone=monotone)


@dataclass(frozen=True)
class SelfSimilarValidation:
    omega1_fit: float
    omega2_fit: float
    omega1_dev: float
    omega2_dev: float
    exponent_s1: float
    exponent_s2: float
    n_steps: int


def validate_self_similar(bvp: TransformedBVP, sol: SelfSimilarSolution,
                          t0: float, t_end: float,
                          grid=(41, 400), cfl: float = 0.4) -> SelfSimilarValidation:
    """Seed the oracle with the similarity profile and fit the front laws."""
    if bvp.time_law != TIME_LAW_INVERSE_SQRT:
        raise ValueError("similarity validation requires the 1/sqrt(t) law")
    state = seed_self_similar(bvp, sol, t0, grid[0], grid[1], t_end)
    rec = run(state, bvp, t_end, cfl=cfl)
    w1, p1 = fit_sqrt_front(rec.times, rec.s1)
    w2, p2 = fit_sqrt_front(rec.times, rec.s2)
    return SelfSimilarValidation(
        omega1_fit=w1, omega2_fit=w2,
        omega1_dev=abs(w1 - sol.omega1) / sol.omega1,
        omega2_dev=abs(w2 - sol.omega2) / sol.omega2,
        exponent_s1=p1, exponent_s2=p2, n_steps=rec.n_steps)
