"""Self-similar reduction of the 1/sqrt(t) surface-pair problem.

With the surface flux and recession speed both decaying like 1/sqrt(t), the
problem collapses onto the coordinate ``omega = x/sqrt(t)``: both fronts sit
at fixed ``omega_1 < omega_2`` and the per-phase heat contents solve
``(d(w) w')' + (omega/2) w' = 0``.  No closed form exists for general
coefficients, so the reduced problem is solved here by damped-Newton shooting
on the surface heat content and the front coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import erf

from .material import TIME_LAW_INVERSE_SQRT, TIME_LAW_STEADY, LIQUID, SOLID, TransformedBVP
from .travelling_wave import NoTravellingWaveError, solve_travelling_wave

__all__ = [
    "SelfSimilarSolution",
    "DegenerateDiffusivityError",
    "ShootingIntegrationError",
    "ShootingConvergenceError",
    "SURFACE_EVAPORATION",
    "SURFACE_PINNED",
    "ss_rhs",
    "shoot_residuals",
    "solve_self_similar",
    "one_phase_front_coefficient",
]

SURFACE_EVAPORATION = "evaporation"
SURFACE_PINNED = "pinned"


class DegenerateDiffusivityError(ValueError):
    """The diffusivity is non-positive (or undefined) at a visited state."""

    def __init__(self, msg, omega=None):
        super().__init__(msg)
        self.omega = omega


class ShootingIntegrationError(RuntimeError):
    """A phase integration blew up; carries the failing coordinate."""

    def __init__(self, msg, omega=None):
        super().__init__(msg)
        self.omega = omega


class ShootingConvergenceError(RuntimeError):
    """Newton stagnated; carries the residual history and best iterate."""

    def __init__(self, msg, history, best):
        super().__init__(msg)
        self.history = history
        self.best = best


def ss_rhs(bvp: TransformedBVP, phase: str, omega: float, state):
    """First-order form of the similarity ODE for one phase.

    ``state`` is ``(w, p)`` with ``p = d(w) * dw/domega``; the derivative is
    ``(p/d(w), -(omega/2) * p/d(w))``.
    """
    w, p = state
    d_of = bvp.d1 if phase == LIQUID else bvp.d2
    d = d_of(w)
    if not np.isfinite(d) or d <= 0.0:
        raise DegenerateDiffusivityError(
            f"{phase} diffusivity non-positive at w={w:.6e}", omega=omega)
    slope = p / d
    return slope, -0.5 * omega * slope


def _integrate_phase(bvp, phase, omega_span, w0, p0, rtol=1e-10,
                     t_eval=None, w_scale=None, p_scale=None):
    if w_scale is None:
        w_scale = max(abs(w0), 1.0)
    if p_scale is None:
        p_scale = max(abs(p0), 1e-6 * w_scale)

    def fun(omega, y):
        return ss_rhs(bvp, phase, omega, y)

    try:
        res = solve_ivp(fun, omega_span, [w0, p0], method="RK45",
                        rtol=rtol, atol=[rtol * w_scale, rtol * p_scale],
                        t_eval=t_eval, dense_output=False)
    except DegenerateDiffusivityError as exc:
        raise ShootingIntegrationError(
            f"{phase} integration failed: {exc}", omega=exc.omega) from exc
    if not res.success:
        raise ShootingIntegrationError(
            f"{phase} integration stopped: {res.message}", omega=res.t[-1])
    if not np.all(np.isfinite(res.y)):
        raise ShootingIntegrationError(
            f"{phase} integration produced non-finite values", omega=res.t[-1])
    return res


def default_omega_max(bvp: TransformedBVP, omega2: float) -> float:
    """Truncation coordinate: ten far-field diffusion widths past the front."""
    return omega2 + 10.0 * math.sqrt(2.0 * bvp.d2(bvp.v_inf))


def _front_weighted_grid(bvp, omega2, om_max, n=2048):
    """Tabulation grid dense over the decaying layer behind the front."""
    layer = min(6.0 * 2.0 * bvp.d2(bvp.v_m) / max(omega2, 1e-12),
                0.5 * (om_max - omega2))
    n_front = (2 * n) // 3
    front = np.linspace(omega2, omega2 + layer, n_front, endpoint=False)
    tail = np.linspace(omega2 + layer, om_max, n - n_front)
    return np.concatenate([front, tail])


def shoot_residuals(bvp: TransformedBVP, omega1: float, omega2: float,
                    u1_guess: float, omega_max: float | None = None,
                    p1: float | None = None, rtol: float = 1e-10):
    """Normalized residual triple of one shooting pass.

    Integrates the liquid phase from ``omega1`` (slope from the surface flux
    balance unless ``p1`` overrides it) to ``omega2``, then the solid phase
    from the melting front to the truncation coordinate.  Residuals: surface
    recession consistency, melting value mismatch, far-field mismatch.
    """
    if not omega1 < omega2:
        raise ValueError("omega1 must lie below omega2")
    if omega_max is None:
        omega_max = default_omega_max(bvp, omega2)
    if p1 is None:
        p1 = bvp.H1 * 0.5 * omega1 - bvp.q_of_u(u1_guess)

    liq = _integrate_phase(bvp, LIQUID, (omega1, omega2), u1_guess, p1,
                           rtol=rtol, w_scale=max(abs(u1_guess), abs(bvp.u_m)))
    u2, pu2 = liq.y[0, -1], liq.y[1, -1]

    pv2 = pu2 + bvp.H2 * 0.5 * omega2
    sol = _integrate_phase(bvp, SOLID, (omega2, omega_max), bvp.v_m, pv2,
                           rtol=rtol,
                           w_scale=max(abs(bvp.v_m), abs(bvp.v_inf)))
    v_end = sol.y[0, -1]

    h1 = bvp.h_of_u(u1_guess)
    r1 = (0.5 * omega1 - h1) / max(abs(h1), 1e-300)
    r2 = (u2 - bvp.u_m) / max(abs(u1_guess - bvp.u_m), 0.01 * abs(bvp.u_m))
    r3 = (v_end - bvp.v_inf) / abs(bvp.v_m - bvp.v_inf)
    return np.array([r1, r2, r3])


@dataclass(frozen=True)
class SelfSimilarSolution:
    """Converged similarity fronts and tabulated per-phase profiles."""

    omega1: float
    omega2: float
    omega_max: float
    u1: float
    surface: str
    bc_residual: float
    residuals: np.ndarray
    iterations: int
    u_profile: tuple    # (omega grid, liquid heat content)
    v_profile: tuple    # (omega grid, solid heat content)
    _u_interp: PchipInterpolator = field(repr=False)
    _v_interp: PchipInterpolator = field(repr=False)
    v_inf: float

    def u_at(self, omega):
        """Liquid heat content at omega, clamped to [omega1, omega2]."""
        return self._u_interp(np.clip(omega, self.omega1, self.omega2))

    def v_at(self, omega):
        """Solid heat content at omega; the far tail continues at v_inf."""
        om = np.asarray(omega, dtype=float)
        out = self._v_interp(np.clip(om, self.omega2, self.omega_max))
        out = np.where(om > self.omega_max, self.v_inf, out)
        return out if np.ndim(omega) else float(out)

    def front_positions(self, t):
        """Physical front positions at time t: omega_k * sqrt(t)."""
        rt = np.sqrt(t)
        return self.omega1 * rt, self.omega2 * rt


def one_phase_front_coefficient(stefan_number: float) -> float:
    """Root of ``lam*exp(lam^2)*erf(lam) = Ste/sqrt(pi)``.

    Front coefficient of the classical single-phase freezing/melting problem;
    used only to seed the shooting iteration.
    """
    if stefan_number <= 0.0:
        raise ValueError("stefan number must be positive")
    target = stefan_number / math.sqrt(math.pi)
    f = lambda lam: lam * math.exp(lam**2) * erf(lam) - target
    hi = 1.0
    while f(hi) < 0.0:
        hi *= 2.0
    return brentq(f, 1e-12, hi, rtol=1e-12)


def _initial_guess(bvp: TransformedBVP):
    """Surface heat content from the steady plane front, front coordinate from
    the plane-front thickness; one-phase estimate as fallback."""
    try:
        tw = solve_travelling_wave(bvp.with_time_law(TIME_LAW_STEADY))
        u1 = tw.u_s
        omega1 = 2.0 * bvp.h_of_u(u1)
        omega2 = omega1 + tw.delta
        return u1, omega2
    except (NoTravellingWaveError, ValueError):
        u1 = math.sqrt(bvp.u_m * bvp.u_cap)
        ste = max((u1 - bvp.u_m) / bvp.H2, 1e-3)
        lam = one_phase_front_coefficient(ste)
        omega2 = 2.0 * bvp.h_of_u(u1) + 2.0 * lam * math.sqrt(bvp.d1(bvp.u_m))
        return u1, omega2


def _damped_newton(fun, z0, scales, tol, max_iter):
    z = np.asarray(z0, dtype=float)
    f = fun(z)
    history = [float(np.max(np.abs(f)))]
    for iteration in range(1, max_iter + 1):
        if history[-1] <= tol:
            return z, f, iteration - 1, history
        jac = np.empty((len(f), len(z)))
        for j in range(len(z)):
            h = 1e-6 * max(abs(z[j]), 1e-3 * scales[j])
            zp = z.copy()
            zp[j] += h
            jac[:, j] = (fun(zp) - f) / h
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            raise ShootingConvergenceError(
                "singular shooting Jacobian", history, z) from None
        lam = 1.0
        best = None
        while lam >= 1.0 / 1024.0:
            z_try = z + lam * step
            try:
                f_try = fun(z_try)
            except ShootingIntegrationError:
                lam *= 0.5
                continue
            if np.max(np.abs(f_try)) < history[-1]:
                best = (z_try, f_try)
                break
            lam *= 0.5
        if best is None:
            raise ShootingConvergenceError(
                f"Newton stagnated after {iteration} iterations "
                f"(best residual {history[-1]:.3e})", history, z)
        z, f = best
        history.append(float(np.max(np.abs(f))))
    if history[-1] <= tol:
        return z, f, max_iter, history
    raise ShootingConvergenceError(
        f"no convergence in {max_iter} iterations "
        f"(best residual {history[-1]:.3e})", history, z)


def solve_self_similar(bvp: TransformedBVP,
                       surface: str = SURFACE_EVAPORATION,
                       u1_pinned: float | None = None,
                       initial: tuple | None = None,
                       tol: float = 1e-8,
                       max_iter: int = 100,
                       omega_max: float | None = None) -> SelfSimilarSolution:
    """Shoot for the similarity solution of the two-phase problem.

    With the default evaporating surface the unknowns are the surface heat
    content and the melting-front coordinate; the surface coordinate is
    eliminated through the recession law.  With ``surface="pinned"`` the
    surface sits at ``omega = 0`` holding the given heat content ``u1_pinned``
    with a free slope: the classical two-phase configuration used for
    cross-checks.
    """
    if bvp.v_m == bvp.v_inf:
        raise ValueError("v_m must differ from v_inf")

    if surface == SURFACE_EVAPORATION:
        if bvp.time_law != TIME_LAW_INVERSE_SQRT:
            raise ValueError(
                "similarity reduction requires the inverse-sqrt time law")
        if initial is None:
            initial = _initial_guess(bvp)
        u1_0, omega2_0 = initial
        scales = (max(abs(u1_0), abs(bvp.u_m)), abs(omega2_0))

        def fun(z):
            u1, omega2 = z
            omega1 = 2.0 * bvp.h_of_u(u1)
            if not omega1 < omega2:
                raise ShootingIntegrationError(
                    "front ordering violated", omega=omega2)
            om_max = omega_max or default_omega_max(bvp, omega2)
            r = shoot_residuals(bvp, omega1, omega2, u1, omega_max=om_max)
            return r[1:]

        z, f, iterations, history = _damped_newton(
            fun, [u1_0, omega2_0], scales, tol, max_iter)
        u1, omega2 = float(z[0]), float(z[1])
        omega1 = 2.0 * float(bvp.h_of_u(u1))
        p1 = bvp.H1 * 0.5 * omega1 - bvp.q_of_u(u1)
    elif surface == SURFACE_PINNED:
        if u1_pinned is None:
            raise ValueError("pinned surface requires u1_pinned")
        u1 = float(u1_pinned)
        if initial is None:
            ste = max((u1 - bvp.u_m) / bvp.H2, 1e-3)
            lam = one_phase_front_coefficient(ste)
            omega2_0 = 2.0 * lam * math.sqrt(float(bvp.d1(bvp.u_m)))
            p1_0 = float(bvp.d1(u1)) * (bvp.u_m - u1) / omega2_0
        else:
            p1_0, omega2_0 = initial
        scales = (abs(p1_0), abs(omega2_0))

        def fun(z):
            p1, omega2 = z
            if not omega2 > 0.0:
                raise ShootingIntegrationError(
                    "front ordering violated", omega=omega2)
            om_max = omega_max or default_omega_max(bvp, omega2)
            r = shoot_residuals(bvp, 0.0, omega2, u1, omega_max=om_max, p1=p1)
            return r[1:]

        z, f, iterations, history = _damped_newton(
            fun, [p1_0, omega2_0], scales, tol, max_iter)
        p1, omega2 = float(z[0]), float(z[1])
        omega1 = 0.0
    else:
        raise ValueError(f"unknown surface mode {surface!r}")

    om_max = omega_max or default_omega_max(bvp, omega2)
    omega_liq = np.linspace(omega1, omega2, 512)
    liq = _integrate_phase(bvp, LIQUID, (omega1, omega2), u1, p1,
                           t_eval=omega_liq, rtol=1e-12,
                           w_scale=max(abs(u1), abs(bvp.u_m)))
    pu2 = liq.y[1, -1]
    omega_sol = _front_weighted_grid(bvp, omega2, om_max)
    solid = _integrate_phase(bvp, SOLID, (omega2, om_max), bvp.v_m,
                             pu2 + bvp.H2 * 0.5 * omega2,
                             t_eval=omega_sol, rtol=1e-12,
                             w_scale=max(abs(bvp.v_m), abs(bvp.v_inf)))

    if surface == SURFACE_EVAPORATION:
        residuals = shoot_residuals(bvp, omega1, omega2, u1, omega_max=om_max)
    else:
        residuals = shoot_residuals(bvp, 0.0, omega2, u1, omega_max=om_max,
                                    p1=p1)

    return SelfSimilarSolution(
        omega1=omega1, omega2=omega2, omega_max=om_max, u1=u1,
        surface=surface,
        bc_residual=float(np.max(np.abs(residuals[1:]))),
        residuals=residuals, iterations=iterations,
        u_profile=(omega_liq, liq.y[0]),
        v_profile=(omega_sol, solid.y[0]),
        _u_interp=PchipInterpolator(omega_liq, liq.y[0]),
        _v_interp=PchipInterpolator(omega_sol, solid.y[0]),
        v_inf=bvp.v_inf,
    )
