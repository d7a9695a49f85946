"""One-parameter transformation families and their jet prolongations.

Each family maps ``(t, x, u[, v])`` with closed-form expressions and carries
the analytic partial derivatives needed to push first- and second-order
derivative coordinates (and free-surface slopes) through the chain rule.
Free-surface variables themselves are always carried along unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "GroupAction",
    "FieldMap",
    "SolutionField",
    "LocalValidityError",
    "ProlongationError",
    "EPS_GRID",
    "translation",
    "scaling",
    "scaling_with_shift",
    "conformal",
    "superposition",
    "heat_kernel",
    "quadratic_heat_solution",
    "transform_jet",
    "apply",
    "prolong",
]

EPS_GRID = (-0.5, -0.25, -0.1, -0.01, 0.01, 0.1, 0.25, 0.5)


class LocalValidityError(ValueError):
    """The transformation is not defined at the requested point."""


class ProlongationError(ValueError):
    """The coordinate Jacobian is singular or an unsupported map was used."""


def _const(value):
    # scalar partials broadcast against array jets in the chain rule
    def f(t, x, eps):
        return value
    return f


def _zero_field(t, x, w, eps):
    return np.zeros_like(np.asarray(w, dtype=float)) if np.ndim(w) else 0.0


@dataclass(frozen=True)
class FieldMap:
    """One dependent variable map ``w* = W(t, x, w; eps)`` with partials."""

    map: Callable
    d_t: Callable = _zero_field
    d_x: Callable = _zero_field
    d_w: Callable = None
    d_xx: Callable = _zero_field
    d_xw: Callable = _zero_field
    d_ww: Callable = _zero_field

    def __post_init__(self):
        if self.d_w is None:
            object.__setattr__(
                self, "d_w",
                lambda t, x, w, eps: np.ones_like(np.asarray(w, dtype=float))
                if np.ndim(w) else 1.0)


IDENTITY_FIELD = FieldMap(map=lambda t, x, w, eps: w)


@dataclass(frozen=True)
class GroupAction:
    """One-parameter point-transformation family with analytic partials.

    ``eps = 0`` is the identity and composition adds parameters, so the
    inverse of a transformation is the same family at ``-eps``.
    """

    name: str
    kind: str
    t_map: Callable
    x_map: Callable
    t_t: Callable
    t_x: Callable
    x_t: Callable
    x_x: Callable
    x_xx: Callable
    fields: dict = field(default_factory=dict)
    validity: Callable = None
    separable: bool = True  # t* = T(t), x* = X(x): enables 2nd prolongation

    def field_map(self, name: str) -> FieldMap:
        return self.fields.get(name, IDENTITY_FIELD)

    def is_valid(self, t, x, eps) -> bool:
        if self.validity is None:
            return True
        return bool(np.all(self.validity(t, x, eps)))


def translation(name: str, dt: float = 0.0, dx: float = 0.0) -> GroupAction:
    """t* = t + dt*eps, x* = x + dx*eps, fields untouched."""
    return GroupAction(
        name=name, kind="translation",
        t_map=lambda t, x, eps: t + dt * eps,
        x_map=lambda t, x, eps: x + dx * eps,
        t_t=_const(1.0), t_x=_const(0.0), x_t=_const(0.0),
        x_x=_const(1.0), x_xx=_const(0.0))


def _field_scale(c: float) -> FieldMap:
    return FieldMap(
        map=lambda t, x, w, eps: w * math.exp(c * eps),
        d_w=lambda t, x, w, eps: (np.full_like(np.asarray(w, dtype=float),
                                               math.exp(c * eps))
                                  if np.ndim(w) else math.exp(c * eps)))


def _field_shift(c: float) -> FieldMap:
    return FieldMap(map=lambda t, x, w, eps: w + c * eps)


def _build_field_maps(field_laws: dict) -> dict:
    out = {}
    for fname, (law, c) in (field_laws or {}).items():
        if law == "scale":
            out[fname] = _field_scale(c)
        elif law == "shift":
            out[fname] = _field_shift(c)
        else:
            raise ValueError(f"unknown field law {law!r}")
    return out


def scaling(name: str, at: float = 0.0, ax: float = 0.0,
            field_laws: dict | None = None) -> GroupAction:
    """t* = t e^{at*eps}, x* = x e^{ax*eps}; fields scale or shift.

    ``field_laws`` maps a field name to ``("scale", c)`` for ``w e^{c*eps}``
    or ``("shift", c)`` for ``w + c*eps``.
    """
    return GroupAction(
        name=name, kind="scaling",
        t_map=lambda t, x, eps: t * math.exp(at * eps),
        x_map=lambda t, x, eps: x * math.exp(ax * eps),
        t_t=lambda t, x, eps: math.exp(at * eps),
        t_x=_const(0.0), x_t=_const(0.0),
        x_x=lambda t, x, eps: math.exp(ax * eps),
        x_xx=_const(0.0),
        fields=_build_field_maps(field_laws))


def scaling_with_shift(name: str, at: float, ax: float, shift_rate: float,
                       field_laws: dict | None = None) -> GroupAction:
    """Scaling composed with an x-shift generated by ``shift_rate * d/dx``.

    ``x* = x e^{ax*eps} + shift_rate*(e^{ax*eps}-1)/ax`` (plain translation
    when ``ax = 0``); still a one-parameter group.
    """
    if ax == 0.0:
        def x_map(t, x, eps):
            return x + shift_rate * eps
    else:
        def x_map(t, x, eps):
            return x * math.exp(ax * eps) \
                + shift_rate * (math.exp(ax * eps) - 1.0) / ax

    return GroupAction(
        name=name, kind="scaling_with_shift",
        t_map=lambda t, x, eps: t * math.exp(at * eps),
        x_map=x_map,
        t_t=lambda t, x, eps: math.exp(at * eps),
        t_x=_const(0.0), x_t=_const(0.0),
        x_x=lambda t, x, eps: math.exp(ax * eps),
        x_xx=_const(0.0),
        fields=_build_field_maps(field_laws))


def conformal(name: str, power: float = 3.0,
              field_names: tuple = ("u",)) -> GroupAction:
    """x* = x/(1 - eps*x) with fields scaled by (1 - eps*x)^power.

    Defined only where ``1 - eps*x > 0``.
    """
    def g(t, x, eps):
        return 1.0 - eps * np.asarray(x, dtype=float) if np.ndim(x) \
            else 1.0 - eps * x

    def make_field():
        return FieldMap(
            map=lambda t, x, w, eps: g(t, x, eps) ** power * w,
            d_x=lambda t, x, w, eps: -power * eps
            * g(t, x, eps) ** (power - 1.0) * w,
            d_w=lambda t, x, w, eps: g(t, x, eps) ** power
            + np.zeros_like(np.asarray(w, dtype=float)),
            d_xx=lambda t, x, w, eps: power * (power - 1.0) * eps * eps
            * g(t, x, eps) ** (power - 2.0) * w,
            d_xw=lambda t, x, w, eps: -power * eps
            * g(t, x, eps) ** (power - 1.0)
            + np.zeros_like(np.asarray(w, dtype=float)),
        )

    return GroupAction(
        name=name, kind="conformal",
        t_map=lambda t, x, eps: t,
        x_map=lambda t, x, eps: x / g(t, x, eps),
        t_t=_const(1.0), t_x=_const(0.0), x_t=_const(0.0),
        x_x=lambda t, x, eps: g(t, x, eps) ** (-2.0),
        x_xx=lambda t, x, eps: 2.0 * eps * g(t, x, eps) ** (-3.0),
        fields={fname: make_field() for fname in field_names},
        validity=lambda t, x, eps: g(t, x, eps) > 0.0)


@dataclass(frozen=True)
class SolutionField:
    """A scalar field alpha(t, x) with the derivatives prolongation needs."""

    f: Callable
    f_t: Callable
    f_x: Callable
    f_xx: Callable


def heat_kernel(k: float) -> SolutionField:
    """Fundamental solution of ``alpha_t = k*alpha_xx`` (for t > 0)."""
    def f(t, x):
        return np.exp(-np.asarray(x, dtype=float) ** 2 / (4.0 * k * t)) \
            / np.sqrt(4.0 * math.pi * k * t)

    def f_x(t, x):
        return -np.asarray(x, dtype=float) / (2.0 * k * t) * f(t, x)

    def f_xx(t, x):
        xx = np.asarray(x, dtype=float)
        return (xx**2 / (4.0 * k * k * t * t) - 1.0 / (2.0 * k * t)) * f(t, x)

    return SolutionField(f=f, f_t=lambda t, x: k * f_xx(t, x),
                         f_x=f_x, f_xx=f_xx)


def quadratic_heat_solution(k: float) -> SolutionField:
    """The polynomial solution ``x^2 + 2*k*t`` of the same linear equation."""
    return SolutionField(
        f=lambda t, x: np.asarray(x, dtype=float) ** 2 + 2.0 * k * t,
        f_t=lambda t, x: 2.0 * k + 0.0 * np.asarray(x, dtype=float),
        f_x=lambda t, x: 2.0 * np.asarray(x, dtype=float),
        f_xx=lambda t, x: 2.0 + 0.0 * np.asarray(x, dtype=float))


def superposition(name: str, field_name: str,
                  alpha: SolutionField) -> GroupAction:
    """w* = w + eps*alpha(t, x): additive shift by a known solution field."""
    fmap = FieldMap(
        map=lambda t, x, w, eps: w + eps * alpha.f(t, x),
        d_t=lambda t, x, w, eps: eps * alpha.f_t(t, x),
        d_x=lambda t, x, w, eps: eps * alpha.f_x(t, x),
        d_xx=lambda t, x, w, eps: eps * alpha.f_xx(t, x),
    )
    return GroupAction(
        name=name, kind="linear_superposition",
        t_map=lambda t, x, eps: t, x_map=lambda t, x, eps: x,
        t_t=_const(1.0), t_x=_const(0.0), x_t=_const(0.0),
        x_x=_const(1.0), x_xx=_const(0.0),
        fields={field_name: fmap})


# --- jet transport ----------------------------------------------------------

_FIELD_KEYS = ("u", "v")


def transform_jet(action: GroupAction, eps: float, jet: dict) -> dict:
    """Push a jet-space point through the prolonged transformation.

    ``jet`` holds ``t``, ``x``, any of the fields ``u``/``v`` with optional
    ``*_t``/``*_x``/``*_xx`` entries, and any free surfaces ``S<i>`` with
    their ``_t``/``_x`` slopes.  Front speeds ``V<i>`` are recomputed from
    the transformed surface slopes.  All entries may be numpy arrays.
    """
    t, x = jet["t"], jet["x"]
    if not action.is_valid(t, x, eps):
        raise LocalValidityError(
            f"{action.name} is not defined at eps={eps:g} for these points")

    T_t = action.t_t(t, x, eps)
    T_x = action.t_x(t, x, eps)
    X_t = action.x_t(t, x, eps)
    X_x = action.x_x(t, x, eps)
    det = T_t * X_x - T_x * X_t
    if np.any(np.abs(det) < 1e-300) or np.any(np.abs(X_x) < 1e-300):
        raise ProlongationError(f"{action.name}: singular coordinate Jacobian")

    out = {"t": action.t_map(t, x, eps), "x": action.x_map(t, x, eps)}

    for fname in _FIELD_KEYS:
        if fname not in jet:
            continue
        w = jet[fname]
        fmap = action.field_map(fname)
        out[fname] = fmap.map(t, x, w, eps)
        has_first = f"{fname}_t" in jet and f"{fname}_x" in jet
        if has_first:
            w_t, w_x = jet[f"{fname}_t"], jet[f"{fname}_x"]
            Dt = fmap.d_t(t, x, w, eps) + fmap.d_w(t, x, w, eps) * w_t
            Dx = fmap.d_x(t, x, w, eps) + fmap.d_w(t, x, w, eps) * w_x
            out[f"{fname}_t"] = (Dt * X_x - Dx * X_t) / det
            out[f"{fname}_x"] = (T_t * Dx - T_x * Dt) / det
        if f"{fname}_xx" in jet:
            if not has_first:
                raise ProlongationError(
                    "second-order entries require the first-order jet")
            if not action.separable:
                raise ProlongationError(
                    f"{action.name}: second prolongation needs t*=T(t), x*=X(x)")
            w_xx = jet[f"{fname}_xx"]
            Dxx = (fmap.d_xx(t, x, w, eps)
                   + 2.0 * fmap.d_xw(t, x, w, eps) * w_x
                   + fmap.d_ww(t, x, w, eps) * w_x**2
                   + fmap.d_w(t, x, w, eps) * w_xx)
            X_xx = action.x_xx(t, x, eps)
            out[f"{fname}_xx"] = (Dxx - Dx * X_xx / X_x) / X_x**2

    for key in jet:
        if key.startswith("S") and not key.endswith(("_t", "_x")):
            out[key] = jet[key]  # free surfaces ride along unchanged
            st, sx = jet.get(f"{key}_t"), jet.get(f"{key}_x")
            if st is not None and sx is not None:
                s_tstar = (st * X_x - sx * X_t) / det
                s_xstar = (T_t * sx - T_x * st) / det
                out[f"{key}_t"] = s_tstar
                out[f"{key}_x"] = s_xstar
                out[f"V{key[1:]}"] = -s_tstar / s_xstar
    return out


def apply(action: GroupAction, eps: float, point: dict) -> dict:
    """Transform a base-space point (no derivative entries required)."""
    return transform_jet(action, eps, point)


def prolong(action: GroupAction, eps: float, point: dict) -> dict:
    """Transform a point together with its derivative coordinates."""
    return transform_jet(action, eps, point)


def inverse_point(action: GroupAction, eps: float, t_star, x_star):
    """Base coordinates mapping to ``(t*, x*)``: the family at ``-eps``."""
    return (action.t_map(t_star, x_star, -eps),
            action.x_map(t_star, x_star, -eps))
