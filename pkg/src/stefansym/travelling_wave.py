"""Exact plane-front solutions of the two-phase melting/evaporation problem.

In a frame moving with the front, the heat-content problem reduces to a pair
of linear constant-coefficient ODEs after straightening the coordinate by the
phase diffusivity.  The profiles are explicit exponentials; the front speed
solves a single transcendental equation parametrized here by the surface heat
content, so the inverse of the recession law is never needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .material import (
    TIME_LAW_STEADY,
    LIQUID,
    SOLID,
    MaterialSpec,
    TransformedBVP,
    kirchhoff_inverse,
)

__all__ = [
    "TravellingWaveSolution",
    "NoTravellingWaveError",
    "SingularResidualError",
    "CoordinateMap",
    "velocity_residual",
    "solve_travelling_wave",
    "profile_transformed",
    "enthalpy_profile",
    "profile_physical",
]


class NoTravellingWaveError(RuntimeError):
    """No sign change of the speed residual on the admissible bracket."""

    def __init__(self, msg, residual_low=None, residual_high=None):
        super().__init__(msg)
        self.residual_low = residual_low
        self.residual_high = residual_high


class SingularResidualError(ZeroDivisionError):
    """The recession speed vanishes where the residual is requested."""


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


class CoordinateMap:
    """Monotone coordinate stretch ``xi(eta) = xi0 + integral of g``.

    ``g`` must be positive on ``[eta0, eta1]``.  Node-to-node integrals use
    10-point Gauss-Legendre quadrature; the inverse is seeded by a monotone
    cubic interpolant and polished by Newton steps with the analytic slope.
    Beyond ``eta1`` the map continues linearly with slope ``g(eta1)``.
    """

    def __init__(self, g: Callable, eta0: float, eta1: float, xi0: float = 0.0,
                 n_nodes: int = 2048):
        self.g = g
        self.eta0, self.eta1 = float(eta0), float(eta1)
        nodes = np.linspace(eta0, eta1, n_nodes)
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        half = 0.5 * (nodes[1] - nodes[0])
        samples = g(mid[None, :] + half * _GL_NODES[:, None])
        segments = half * np.sum(samples * _GL_WEIGHTS[:, None], axis=0)
        xi = xi0 + np.concatenate([[0.0], np.cumsum(segments)])
        if not np.all(np.diff(xi) > 0.0):
            raise ValueError("coordinate stretch is not strictly increasing")
        self.nodes = nodes
        self.xi_nodes = xi
        self.xi0, self.xi1 = float(xi[0]), float(xi[-1])
        self.tail_slope = float(g(np.asarray([eta1]))[0])
        self._inverse_seed = PchipInterpolator(xi, nodes)

    def forward(self, eta):
        """xi at eta (scalar or array)."""
        eta_arr = np.atleast_1d(np.asarray(eta, dtype=float))
        eta_clip = np.clip(eta_arr, self.eta0, self.eta1)
        idx = np.clip(np.searchsorted(self.nodes, eta_clip, side="right") - 1,
                      0, len(self.nodes) - 2)
        lo = self.nodes[idx]
        half = 0.5 * (eta_clip - lo)
        mid = lo + half
        samples = self.g(mid[None, :] + half[None, :] * _GL_NODES[:, None])
        partial = half * np.sum(samples * _GL_WEIGHTS[:, None], axis=0)
        out = self.xi_nodes[idx] + partial
        tail = eta_arr > self.eta1
        if np.any(tail):
            out = np.where(tail, self.xi1 + (eta_arr - self.eta1) * self.tail_slope, out)
        return out if np.ndim(eta) else float(out[0])

    def inverse(self, xi):
        """eta at xi, clamped to the tabulated range plus the linear tail."""
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        xi_clip = np.clip(xi_arr, self.xi0, self.xi1)
        eta = np.asarray(self._inverse_seed(xi_clip), dtype=float)
        for _ in range(4):
            eta = np.clip(eta - (self.forward(eta) - xi_clip) / self.g(eta),
                          self.eta0, self.eta1)
        tail = xi_arr > self.xi1
        if np.any(tail):
            eta = np.where(tail,
                           self.eta1 + (xi_arr - self.xi1) / self.tail_slope,
                           eta)
        return eta if np.ndim(xi) else float(eta[0])


@dataclass(frozen=True)
class TravellingWaveSolution:
    """Front speed, layer thickness and profile constants of a plane front.

    ``u_s`` is the surface heat content, ``delta_star`` the liquid thickness in
    the straightened coordinate and ``delta`` the physical one.  The liquid
    offset profile is ``C1 + C2*exp(-mu*eta)`` on ``[0, delta_star]`` and the
    solid one ``C3 + C4*exp(-mu*eta)`` beyond it.
    """

    mu: float
    u_s: float
    delta_star: float
    delta: float
    C1: float
    C2: float
    C3: float
    C4: float
    Vm: float
    K: float
    u_m: float
    residual: float
    n_candidate_roots: int
    liquid_map: CoordinateMap = field(repr=False)
    solid_map: CoordinateMap = field(repr=False)

    def liquid_offset(self, eta):
        """Liquid heat content above the melting threshold, at eta."""
        return self.C1 + self.C2 * np.exp(-self.mu * np.asarray(eta, dtype=float))

    def solid_offset(self, eta):
        """Solid heat content above the far-field value, at eta."""
        return self.C3 + self.C4 * np.exp(-self.mu * np.asarray(eta, dtype=float))

    @property
    def multiple_roots(self) -> bool:
        return self.n_candidate_roots > 1


def velocity_residual(bvp: TransformedBVP, u_s: float) -> float:
    """Mismatch of the front-speed balance at surface heat content ``u_s``.

    Vanishes exactly when the front speed equals the recession speed at the
    surface; positive residual means the absorbed flux still exceeds what the
    moving front can carry away.
    """
    h = bvp.h_of_u(u_s)
    if np.ndim(u_s) == 0 and h == 0.0:
        raise SingularResidualError("recession speed vanishes at u_s")
    rhs = (bvp.v_m - bvp.v_inf) - bvp.u_m + bvp.H2
    return bvp.q_of_u(u_s) / h - bvp.H1 - u_s - rhs


def solve_travelling_wave(bvp: TransformedBVP,
                          n_bracket: int = 64,
                          rtol: float = 1e-12) -> TravellingWaveSolution:
    """Solve the plane-front problem for a steady surface pair.

    Scans 64 log-spaced surface heat contents for a sign change of
    :func:`velocity_residual`, refines the smallest root by bracketed
    bisection/secant iteration, then assembles the explicit profiles, the
    straightened thickness, and the physical thickness.
    """
    if bvp.time_law != TIME_LAW_STEADY:
        raise ValueError("plane-front reduction requires the steady time law")
    Vm = bvp.v_m - bvp.v_inf
    K = Vm + bvp.H2
    if K <= 0.0:
        raise NoTravellingWaveError(
            "melting-side heat sink (v_m - v_inf + H2) must be positive")

    lo = bvp.u_m * (1.0 + 1e-6)
    grid = np.geomspace(lo, bvp.u_cap, n_bracket)
    res = np.array([velocity_residual(bvp, u) for u in grid])
    signs = np.sign(res)
    crossings = np.flatnonzero(signs[:-1] * signs[1:] < 0.0)
    exact = np.flatnonzero(res == 0.0)
    if len(crossings) == 0 and len(exact) == 0:
        raise NoTravellingWaveError(
            f"no sign change of the speed residual on "
            f"[{grid[0]:.6e}, {grid[-1]:.6e}]",
            residual_low=float(res[0]), residual_high=float(res[-1]))

    n_roots = len(crossings) + len(exact)
    if len(exact) and (len(crossings) == 0 or exact[0] <= crossings[0]):
        u_s = float(grid[exact[0]])
    else:
        i = crossings[0]
        u_s = brentq(lambda u: velocity_residual(bvp, u),
                     grid[i], grid[i + 1], rtol=rtol, xtol=grid[i] * rtol)

    mu = float(bvp.h_of_u(u_s))
    a = u_s - bvp.u_m
    E = 1.0 + a / K                       # exp(mu * delta_star)
    delta_star = math.log(E) / mu
    C1 = -a / (E - 1.0)                   # equals -K
    C2 = a * E / (E - 1.0)                # equals K * E
    C3 = 0.0
    C4 = Vm * E

    liquid_map = CoordinateMap(
        lambda eta: np.asarray(
            bvp.d1(C1 + C2 * np.exp(-mu * eta) + bvp.u_m), dtype=float),
        0.0, delta_star)
    delta = liquid_map.forward(delta_star)
    solid_span = 60.0 / mu
    solid_map = CoordinateMap(
        lambda eta: np.asarray(
            bvp.d2(C4 * np.exp(-mu * eta) + bvp.v_inf), dtype=float),
        delta_star, delta_star + solid_span, xi0=delta)

    residual = velocity_residual(bvp, u_s)
    scale = abs(bvp.q_of_u(u_s) / mu) + abs(bvp.H1) + abs(u_s)
    sol = TravellingWaveSolution(
        mu=mu, u_s=u_s, delta_star=delta_star, delta=delta,
        C1=C1, C2=C2, C3=C3, C4=C4, Vm=Vm, K=K, u_m=bvp.u_m,
        residual=float(residual), n_candidate_roots=int(n_roots),
        liquid_map=liquid_map, solid_map=solid_map)

    _check_solution_identities(sol, scale)
    return sol


def _check_solution_identities(sol: TravellingWaveSolution, scale: float) -> None:
    if not (sol.mu > 0.0 and sol.delta > 0.0 and sol.delta_star > 0.0):
        raise NoTravellingWaveError("solved front is not advancing")
    if abs(sol.residual) > 1e-9 * scale:
        raise NoTravellingWaveError(  # pragma: no cover - defensive
            f"speed residual {sol.residual:.3e} above tolerance")
    u_end = sol.liquid_offset(sol.delta_star)
    if abs(u_end) > 1e-10 * max(abs(sol.u_s - sol.u_m), 1.0):
        raise NoTravellingWaveError("liquid profile fails to close at the front")
    v_end = sol.solid_offset(sol.delta_star)
    if abs(v_end - sol.Vm) > 1e-10 * abs(sol.Vm):
        raise NoTravellingWaveError("solid profile fails to start at the front")


def profile_transformed(sol: TravellingWaveSolution, eta: float):
    """Offset profile at straightened coordinate ``eta >= 0``.

    Returns ``("liquid", U)`` up to the front and ``("solid", V)`` beyond it.
    """
    if eta < 0.0:
        raise ValueError("eta must be non-negative")
    if eta <= sol.delta_star:
        return LIQUID, float(sol.liquid_offset(eta))
    return SOLID, float(sol.solid_offset(eta))


def enthalpy_profile(sol: TravellingWaveSolution, bvp: TransformedBVP, xi):
    """Heat content at moving-frame coordinate ``xi >= 0``.

    Returns ``(phases, eta, w)`` where ``phases`` marks liquid/solid, ``eta``
    is the straightened coordinate and ``w`` the per-phase heat content.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi_arr < 0.0):
        raise ValueError("xi must be non-negative")
    liquid = xi_arr <= sol.delta
    eta = np.where(liquid,
                   sol.liquid_map.inverse(np.minimum(xi_arr, sol.delta)),
                   sol.solid_map.inverse(np.maximum(xi_arr, sol.delta)))
    w = np.where(liquid,
                 sol.liquid_offset(eta) + bvp.u_m,
                 sol.solid_offset(eta) + bvp.v_inf)
    phases = np.where(liquid, LIQUID, SOLID)
    if np.ndim(xi):
        return phases, eta, w
    return str(phases[0]), float(eta[0]), float(w[0])


def profile_physical(sol: TravellingWaveSolution, bvp: TransformedBVP,
                     spec: MaterialSpec, xi):
    """Temperature at moving-frame coordinate ``xi >= 0``."""
    phases, _, w = (enthalpy_profile(sol, bvp, np.atleast_1d(xi))
                    if np.ndim(xi) == 0 else enthalpy_profile(sol, bvp, xi))
    phases = np.atleast_1d(phases)
    w = np.atleast_1d(w)
    T = np.empty_like(w)
    liquid = phases == LIQUID
    if np.any(liquid):
        T[liquid] = kirchhoff_inverse(spec, LIQUID, w[liquid])
    if np.any(~liquid):
        T[~liquid] = kirchhoff_inverse(spec, SOLID, w[~liquid])
    return T if np.ndim(xi) else float(T[0])
