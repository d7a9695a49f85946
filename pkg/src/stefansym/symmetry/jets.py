"""Exact jet samples of nonlinear diffusion equations.

Solutions of ``w_t = (d(w) w_x)_x`` in travelling or self-similar form turn
the PDE into an ODE for the profile; carrying the flux ``p = d(w) w'`` as a
state variable lets every derivative entry of the jet be written in terms of
``(w, p)``, so the sampled jets satisfy the PDE identically, independent of
integration error.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "travelling_wave_jets",
    "self_similar_jets",
    "explicit_jets",
    "merge_jets",
]


def _profile(d, speed_term, span, w0, p0, rtol=1e-12):
    """Integrate w' = p/d(w), p' = -speed_term(s) * p/d(w) over span."""
    def fun(s, y):
        w, p = y
        dval = d(w)
        if not np.isfinite(dval) or dval <= 0.0:
            raise ValueError(f"diffusivity non-positive at w={w:.6e}")
        slope = p / dval
        return [slope, -speed_term(s) * slope]

    res = solve_ivp(fun, span, [w0, p0], rtol=rtol,
                    atol=[rtol * max(abs(w0), 1.0), rtol * max(abs(p0), 1e-12)],
                    dense_output=True)
    if not res.success:
        raise RuntimeError(f"profile integration failed: {res.message}")
    return res.sol


def travelling_wave_jets(d, d_prime, speed=0.25, w0=1.5, p0=-0.4,
                         span=1.0, times=(0.7, 1.3), n_points=5,
                         field="u"):
    """Jets of a constant-shape profile translating at ``speed``.

    Returns a dict of arrays keyed ``t, x, <field>, <field>_t/_x/_xx``.
    """
    sol = _profile(d, lambda s: speed, (0.0, span), w0, p0)
    xi = np.linspace(0.1 * span, 0.9 * span, n_points)
    t_list, x_list, jets = [], [], {"w": [], "w_x": [], "w_t": [], "w_xx": []}
    for t in times:
        w, p = sol(xi)
        dval = d(w)
        slope = p / dval
        t_list.append(np.full_like(xi, t))
        x_list.append(xi + speed * t)
        jets["w"].append(w)
        jets["w_x"].append(slope)
        jets["w_t"].append(-speed * slope)
        jets["w_xx"].append((-speed * slope - d_prime(w) * slope**2) / dval)
    out = {"t": np.concatenate(t_list), "x": np.concatenate(x_list)}
    for key, parts in jets.items():
        out[key.replace("w", field, 1)] = np.concatenate(parts)
    return out


def self_similar_jets(d, d_prime, w0=1.5, p0=-0.4, omega_span=(0.3, 1.0),
                      times=(0.8, 1.25), n_points=5, field="u"):
    """Jets of a spreading profile depending on ``x / sqrt(t)`` only."""
    sol = _profile(d, lambda s: 0.5 * s, omega_span, w0, p0)
    lo, hi = omega_span
    omegas = np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), n_points)
    t_list, x_list = [], []
    jets = {"w": [], "w_x": [], "w_t": [], "w_xx": []}
    for t in times:
        rt = np.sqrt(t)
        w, p = sol(omegas)
        dval = d(w)
        g1 = p / dval                     # dw/domega
        g2 = (-0.5 * omegas * g1 - d_prime(w) * g1**2) / dval
        t_list.append(np.full_like(omegas, t))
        x_list.append(omegas * rt)
        jets["w"].append(w)
        jets["w_x"].append(g1 / rt)
        jets["w_t"].append(-0.5 * omegas * g1 / t)
        jets["w_xx"].append(g2 / t)
    out = {"t": np.concatenate(t_list), "x": np.concatenate(x_list)}
    for key, parts in jets.items():
        out[key.replace("w", field, 1)] = np.concatenate(parts)
    return out


def explicit_jets(u, u_t, u_x, u_xx, t_vals, x_vals, field="u"):
    """Jets of an explicitly known field on a (t, x) product grid."""
    tt, xx = np.meshgrid(np.asarray(t_vals, float), np.asarray(x_vals, float),
                         indexing="ij")
    tt, xx = tt.ravel(), xx.ravel()
    return {
        "t": tt, "x": xx,
        field: u(tt, xx),
        f"{field}_t": u_t(tt, xx),
        f"{field}_x": u_x(tt, xx),
        f"{field}_xx": u_xx(tt, xx),
    }


def merge_jets(*jet_dicts):
    """Concatenate jet dictionaries sharing the same keys."""
    keys = jet_dicts[0].keys()
    return {k: np.concatenate([j[k] for j in jet_dicts]) for k in keys}
