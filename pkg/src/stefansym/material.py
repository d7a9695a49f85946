"""Material data and its enthalpy-variable (heat-content) form.

Raw metal constants are converted, by integrating the volumetric heat
capacity, into a pair of nonlinear diffusion problems for the liquid and
solid heat contents ``u`` and ``v``, coupled through an evaporating surface
and a melting front.  All evaluators produced here are plain functions of
their inputs and are safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = [
    "MaterialSpec",
    "TransformedBVP",
    "ConstitutiveLawError",
    "EnthalpyDomainError",
    "BvpConstructionError",
    "MaterialConfigError",
    "specific_heat",
    "kirchhoff_forward",
    "kirchhoff_inverse",
    "enthalpy_from_heat_capacity",
    "build_transformed_bvp",
    "load_material",
    "aluminium_spec",
    "material_path",
]

LIQUID = "liquid"
SOLID = "solid"

TIME_LAW_STEADY = "steady"
TIME_LAW_INVERSE_SQRT = "inverse_sqrt"


class ConstitutiveLawError(ValueError):
    """A constitutive law is non-physical (e.g. non-positive specific heat)."""


class EnthalpyDomainError(ValueError):
    """An enthalpy value lies outside the image of the forward transform."""


class BvpConstructionError(ValueError):
    """The transformed problem violates one of its construction invariants."""


class MaterialConfigError(ValueError):
    """A material config file is missing, malformed, or out of range."""


@dataclass(frozen=True)
class MaterialSpec:
    """Physical constants of a metal, SI units.

    The solid specific heat follows the linear law ``c2(T) = c2_a + c2_b*T``;
    the liquid one is the constant ``c1``.  The absorbed fraction of the
    incident flux is ``chi0 * (T/chi_Tref)**chi_p``.
    """

    lambda1: float  # W/m/K, liquid conductivity
    lambda2: float  # W/m/K, solid conductivity
    rho: float      # kg/m^3
    c1: float       # J/kg/K
    c2_a: float     # J/kg/K
    c2_b: float     # J/kg/K^2
    Lm: float       # J/kg
    Lv: float       # J/kg
    Tv: float       # K
    Tm: float       # K
    Tinf: float     # K
    chi0: float
    chi_p: float
    chi_Tref: float  # K
    q0: float       # W/m^2
    A: float        # kg/mol
    Pa: float       # Pa
    R: float        # J/mol/K

    def __post_init__(self):
        positive = (
            "lambda1", "lambda2", "rho", "c1", "Lm", "Lv",
            "Tv", "Tm", "q0", "A", "Pa", "R",
        )
        for name in positive:
            if not getattr(self, name) > 0.0:
                raise MaterialConfigError(f"{name} must be strictly positive")
        if not (self.Tinf < self.Tm < self.Tv):
            raise MaterialConfigError("temperatures must satisfy Tinf < Tm < Tv")
        # linear law: positivity on [Tinf, Tm] holds iff it holds at both ends
        for T in (self.Tinf, self.Tm):
            if not self.c2_a + self.c2_b * T > 0.0:
                raise ConstitutiveLawError(
                    f"solid specific heat non-positive at T={T:g} K"
                )

    def c2(self, T):
        return self.c2_a + self.c2_b * T

    def evaporation_reference_temperature(self) -> float:
        """Activation temperature of the surface recession law, A*Lv/R."""
        return self.A * self.Lv / self.R

    def sound_speed_scale(self) -> float:
        """Velocity prefactor of the recession law, of order the sound speed."""
        Tstar = self.evaporation_reference_temperature()
        return (
            self.Pa * math.sqrt(self.A)
            / (self.rho * math.sqrt(2.0 * math.pi * self.R * self.Tv))
            * math.exp(Tstar / self.Tv)
        )


def specific_heat(spec: MaterialSpec, phase: str, T):
    """Per-phase specific heat c(T), J/kg/K."""
    if phase == LIQUID:
        return np.full_like(np.asarray(T, dtype=float), spec.c1) if np.ndim(T) else spec.c1
    if phase == SOLID:
        return spec.c2(np.asarray(T, dtype=float)) if np.ndim(T) else spec.c2(T)
    raise ValueError(f"unknown phase {phase!r}")


def kirchhoff_forward(spec: MaterialSpec, phase: str, T):
    """Volumetric heat content at temperature ``T``: integral of rho*c from 0 to T.

    Closed forms are used for the constant (liquid) and linear (solid) laws.
    Strictly increasing in ``T`` whenever the specific heat is positive.
    """
    T_arr = np.asarray(T, dtype=float)
    if np.any(T_arr < 0.0):
        raise EnthalpyDomainError("temperature must be non-negative")
    if phase == LIQUID:
        out = spec.rho * spec.c1 * T_arr
    elif phase == SOLID:
        # positivity of c2 on [0, T] for the linear law: check both endpoints
        if spec.c2(0.0) <= 0.0 or np.any(spec.c2(T_arr) <= 0.0):
            raise ConstitutiveLawError("solid specific heat non-positive on [0, T]")
        out = spec.rho * (spec.c2_a * T_arr + 0.5 * spec.c2_b * T_arr**2)
    else:
        raise ValueError(f"unknown phase {phase!r}")
    return out if np.ndim(T) else float(out)


def kirchhoff_inverse(spec: MaterialSpec, phase: str, u):
    """Temperature at which the forward transform equals ``u``.

    Constant law inverts linearly; the linear law inverts through the positive
    root of its quadratic antiderivative.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0.0):
        raise EnthalpyDomainError("heat content must be non-negative")
    if phase == LIQUID:
        out = u_arr / (spec.rho * spec.c1)
    elif phase == SOLID:
        if spec.c2_b == 0.0:
            out = u_arr / (spec.rho * spec.c2_a)
        else:
            disc = spec.c2_a**2 + 2.0 * spec.c2_b * u_arr / spec.rho
            if np.any(disc <= 0.0):
                raise EnthalpyDomainError("heat content outside the image range")
            out = (np.sqrt(disc) - spec.c2_a) / spec.c2_b
    else:
        raise ValueError(f"unknown phase {phase!r}")
    return out if np.ndim(u) else float(out)


def enthalpy_from_heat_capacity(c: Callable, rho: float, T: float,
                                rtol: float = 1e-10) -> float:
    """Integral of ``rho*c`` over [0, T] by adaptive Simpson quadrature.

    Used for heat-capacity laws with no recognized closed form.  Raises
    :class:`ConstitutiveLawError` if ``c`` is non-positive anywhere sampled.
    """
    if T < 0.0:
        raise EnthalpyDomainError("temperature must be non-negative")
    if T == 0.0:
        return 0.0

    def f(x):
        val = c(x)
        if val <= 0.0:
            raise ConstitutiveLawError(f"specific heat non-positive at T={x:g} K")
        return rho * val

    # plain recursive adaptive Simpson with interval-halving error control
    def recurse(a, b, fa, fm, fb, whole, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = left + right - whole
        if depth > 48 or abs(err) <= 15.0 * rtol * abs(left + right):
            return left + right + err / 15.0
        return (recurse(a, m, fa, flm, fm, left, depth + 1)
                + recurse(m, b, fm, frm, fb, right, depth + 1))

    fa, fm, fb = f(0.0), f(0.5 * T), f(T)
    whole = T / 6.0 * (fa + 4.0 * fm + fb)
    return recurse(0.0, T, fa, fm, fb, whole, 0)


@dataclass(frozen=True)
class TransformedBVP:
    """Two-phase moving-boundary problem in heat-content variables.

    ``d1``/``d2`` are the phase diffusivities as functions of the respective
    heat contents, ``q_of_u`` the absorbed surface flux, ``h_of_u`` the surface
    recession speed.  ``time_law`` selects whether the surface pair acts
    steadily or decays like 1/sqrt(t).  ``H1``/``H2`` are the volumetric
    latent heats, and ``u_m``/``v_m``/``v_inf`` the heat contents at melting
    (each side) and in the far field.
    """

    d1: Callable
    d2: Callable
    q_of_u: Callable
    h_of_u: Callable
    time_law: str
    H1: float
    H2: float
    u_m: float
    v_m: float
    v_inf: float
    u_cap: float

    def time_factor(self, t):
        if self.time_law == TIME_LAW_STEADY:
            return np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else 1.0
        if self.time_law == TIME_LAW_INVERSE_SQRT:
            return 1.0 / np.sqrt(t)
        raise ValueError(f"unknown time law {self.time_law!r}")

    def q_at(self, t, u):
        """Absorbed flux q(t, u)."""
        return self.q_of_u(u) * self.time_factor(t)

    def h_at(self, t, u):
        """Surface recession speed h(t, u)."""
        return self.h_of_u(u) * self.time_factor(t)

    def v_range(self):
        lo = min(self.v_inf, self.v_m)
        hi = max(self.v_inf, self.v_m)
        return lo, hi

    def with_time_law(self, time_law: str) -> "TransformedBVP":
        return replace(self, time_law=time_law)

    def validate(self, n_grid: int = 10_000) -> None:
        """Check the construction invariants on a dense grid.

        Raises :class:`BvpConstructionError` naming the violating quantity and
        subinterval on failure.
        """
        if self.time_law not in (TIME_LAW_STEADY, TIME_LAW_INVERSE_SQRT):
            raise BvpConstructionError(f"unknown time law {self.time_law!r}")
        if self.v_m == self.v_inf:
            raise BvpConstructionError("v_m must differ from v_inf")
        if not self.u_cap > self.u_m:
            raise BvpConstructionError("u_cap must exceed u_m")

        u = np.linspace(self.u_m, self.u_cap, n_grid)
        d1 = np.asarray(self.d1(u), dtype=float)
        if not np.all(d1 > 0.0):
            raise BvpConstructionError(
                _violation("d1", u, d1 > 0.0, "non-positive"))
        lo, hi = self.v_range()
        v = np.linspace(lo, hi, n_grid)
        d2 = np.asarray(self.d2(v), dtype=float)
        if not np.all(np.isfinite(d2)) or not np.all(d2 > 0.0):
            raise BvpConstructionError(
                _violation("d2", v, np.isfinite(d2) & (d2 > 0.0), "non-positive"))
        qv = np.asarray(self.q_of_u(u), dtype=float)
        if not np.all(qv > 0.0):
            raise BvpConstructionError(
                _violation("q_of_u", u, qv > 0.0, "non-positive"))
        hv = np.asarray(self.h_of_u(u), dtype=float)
        if not np.all(hv >= 0.0):
            raise BvpConstructionError(
                _violation("h_of_u", u, hv >= 0.0, "negative"))
        if not np.all(np.diff(hv) > 0.0):
            ok = np.concatenate([[True], np.diff(hv) > 0.0])
            raise BvpConstructionError(
                _violation("h_of_u", u, ok, "non-increasing"))


def _violation(name: str, grid, ok_mask, word: str) -> str:
    bad = np.flatnonzero(~ok_mask)
    lo, hi = grid[bad[0]], grid[bad[-1]]
    return f"{name} is {word} on [{lo:.6e}, {hi:.6e}]"


def build_transformed_bvp(spec: MaterialSpec, time_law: str = TIME_LAW_STEADY,
                          u_cap_temperature_factor: float = 1.5) -> TransformedBVP:
    """Map a material to its heat-content problem and validate it.

    The working range of the liquid heat content is capped at the value the
    forward transform takes at ``u_cap_temperature_factor * Tv``; surface
    states never plausibly exceed it and root brackets need a ceiling.
    """
    rho, c1 = spec.rho, spec.c1
    lam1, lam2 = spec.lambda1, spec.lambda2
    a2, b2 = spec.c2_a, spec.c2_b
    rc1 = rho * c1

    Tstar = spec.evaporation_reference_temperature()
    Vstar = spec.sound_speed_scale()
    Tv = spec.Tv
    chi0, chi_p, chi_Tref, q0 = spec.chi0, spec.chi_p, spec.chi_Tref, spec.q0

    d1_value = lam1 / rc1

    def d1(u):
        return np.full_like(np.asarray(u, dtype=float), d1_value) \
            if np.ndim(u) else d1_value

    def d2(v):
        arg = a2**2 + 2.0 * b2 * np.asarray(v, dtype=float) / rho
        with np.errstate(invalid="ignore"):
            out = (lam2 / rho) / np.sqrt(arg)  # nan outside the physical range
        return out if np.ndim(v) else float(out)

    def q_of_u(u):
        T1 = np.asarray(u, dtype=float) / rc1
        out = chi0 * (T1 / chi_Tref) ** chi_p * q0
        return out if np.ndim(u) else float(out)

    def h_of_u(u):
        T1 = np.asarray(u, dtype=float) / rc1
        out = Vstar * np.sqrt(Tv / T1) * np.exp(-Tstar / T1)
        return out if np.ndim(u) else float(out)

    bvp = TransformedBVP(
        d1=d1,
        d2=d2,
        q_of_u=q_of_u,
        h_of_u=h_of_u,
        time_law=time_law,
        H1=rho * spec.Lv,
        H2=rho * spec.Lm,
        u_m=kirchhoff_forward(spec, LIQUID, spec.Tm),
        v_m=kirchhoff_forward(spec, SOLID, spec.Tm),
        v_inf=kirchhoff_forward(spec, SOLID, spec.Tinf),
        u_cap=kirchhoff_forward(spec, LIQUID, u_cap_temperature_factor * spec.Tv),
    )
    bvp.validate()
    return bvp


# --- material config files -------------------------------------------------

_FIELD_NAMES = tuple(MaterialSpec.__dataclass_fields__)


def load_material(path) -> MaterialSpec:
    """Read a flat ``key = value`` material file (``#`` starts a comment)."""
    p = Path(path)
    if not p.is_file():
        raise MaterialConfigError(f"material file not found: {p}")
    values = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, val = line.partition("=")
        else:
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise MaterialConfigError(f"{p}:{lineno}: cannot parse {raw!r}")
            key, val = parts
        key, val = key.strip(), val.strip()
        if key not in _FIELD_NAMES:
            raise MaterialConfigError(f"{p}:{lineno}: unknown key {key!r}")
        if key in values:
            raise MaterialConfigError(f"{p}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise MaterialConfigError(
                f"{p}:{lineno}: value for {key!r} is not a number: {val!r}"
            ) from None
    missing = [k for k in _FIELD_NAMES if k not in values]
    if missing:
        raise MaterialConfigError(f"{p}: missing keys {', '.join(missing)}")
    try:
        return MaterialSpec(**values)
    except ValueError as exc:
        raise MaterialConfigError(f"{p}: {exc}") from exc


def material_path(name: str) -> Path:
    """Path of a packaged material file, e.g. ``material_path('aluminium')``."""
    res = resources.files("stefansym.data").joinpath(f"{name}.txt")
    with resources.as_file(res) as p:
        if not p.is_file():
            raise MaterialConfigError(f"no packaged material named {name!r}")
        return p


def aluminium_spec(**overrides) -> MaterialSpec:
    """Packaged aluminium constants; keyword overrides replace single fields."""
    spec = load_material(material_path("aluminium"))
    return replace(spec, **overrides) if overrides else spec
