"""Numeric invariance checks for equations, boundaries, and far fields.

A problem is invariant under a transformation family when the governing
equation manifold, every boundary-condition manifold (fixed and free), and
every condition at infinity are each mapped into themselves by the suitably
prolonged family.  The checks below sample each manifold, push the samples
through the prolonged family over a grid of parameter values, and measure the
normalized defect.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .actions import EPS_GRID, GroupAction, LocalValidityError, transform_jet

__all__ = [
    "PdeOperator",
    "diffusion_pde",
    "BoundaryCondition",
    "ItemResult",
    "InvarianceReport",
    "JetContractError",
    "ManifoldSamplingError",
    "check_pde_invariance",
    "check_boundary_invariance",
    "check_infinity_invariance",
    "fit_exponential_defect",
    "PDE_TOL",
    "BOUNDARY_TOL",
]

PDE_TOL = 1e-6
BOUNDARY_TOL = 1e-8
BASE_PDE_TOL = 1e-8
BASE_BOUNDARY_TOL = 1e-10


class JetContractError(ValueError):
    """The supplied samples miss jet entries or do not solve the equation."""


class ManifoldSamplingError(ValueError):
    """A boundary sampler produced points off its own manifold."""


@dataclass(frozen=True)
class PdeOperator:
    """Residual of one scalar second-order evolution equation on a jet."""

    name: str
    residual: Callable   # (t, x, w, w_t, w_x, w_xx) -> value
    scale: Callable      # same signature -> positive magnitude


def diffusion_pde(name: str, d: Callable, d_prime: Callable) -> PdeOperator:
    """Conservation form ``w_t = (d(w) w_x)_x`` expanded on the jet."""
    def residual(t, x, w, w_t, w_x, w_xx):
        return w_t - d_prime(w) * w_x**2 - d(w) * w_xx

    def scale(t, x, w, w_t, w_x, w_xx):
        return (np.abs(w_t) + np.abs(d_prime(w) * w_x**2)
                + np.abs(d(w) * w_xx) + 1e-300)

    return PdeOperator(name=name, residual=residual, scale=scale)


@dataclass(frozen=True)
class ItemResult:
    """Outcome of one invariance item for one family."""

    item: str
    status: str                      # "pass" | "fail" | "skipped"
    max_residual: float
    eps_grid: tuple = ()
    residuals: tuple = ()            # max normalized defect per eps
    fit_residuals: tuple = ()        # defect against the fixed base scale
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class InvarianceReport:
    """Per-item verdicts of a full problem check for one family."""

    action_name: str
    items: tuple
    findings: tuple = ()

    @property
    def passed(self) -> bool:
        return all(item.status == "pass" for item in self.items)

    def item(self, prefix: str) -> ItemResult:
        for it in self.items:
            if it.item.startswith(prefix):
                return it
        raise KeyError(prefix)

    def summary_lines(self):
        mark = {"pass": "pass", "fail": "FAIL", "skipped": "skip"}
        for it in self.items:
            yield (f"  [{mark[it.status]}] {it.item}: "
                   f"max defect {it.max_residual:.3e} {it.details}".rstrip())


def _field_names(jet: dict):
    return [k for k in ("u", "v") if k in jet]


def check_pde_invariance(action: GroupAction, pde: PdeOperator, samples: dict,
                         field: str = "u", eps_grid=EPS_GRID,
                         tol: float = PDE_TOL) -> ItemResult:
    """Item: the equation manifold maps into itself under the 2nd prolongation.

    ``samples`` must carry second-order jets of solutions (defect at most
    1e-8 of the term scale) for ``field``.
    """
    for key in (field, f"{field}_t", f"{field}_x", f"{field}_xx"):
        if key not in samples:
            raise JetContractError(f"samples lack jet entry {key!r}")

    args = (samples["t"], samples["x"], samples[field],
            samples[f"{field}_t"], samples[f"{field}_x"],
            samples[f"{field}_xx"])
    base = np.abs(pde.residual(*args)) / pde.scale(*args)
    if np.max(base) > BASE_PDE_TOL:
        raise JetContractError(
            f"samples violate {pde.name} (defect {np.max(base):.3e})")

    jet = {"t": samples["t"], "x": samples["x"],
           field: samples[field],
           f"{field}_t": samples[f"{field}_t"],
           f"{field}_x": samples[f"{field}_x"],
           f"{field}_xx": samples[f"{field}_xx"]}
    per_eps = []
    for eps in eps_grid:
        moved = transform_jet(action, eps, jet)
        args = (moved["t"], moved["x"], moved[field],
                moved[f"{field}_t"], moved[f"{field}_x"],
                moved[f"{field}_xx"])
        defect = np.abs(pde.residual(*args)) / pde.scale(*args)
        per_eps.append(float(np.max(defect)))
    worst = max(per_eps)
    return ItemResult(
        item=f"pde:{pde.name}[{field}]",
        status="pass" if worst <= tol else "fail",
        max_residual=worst, eps_grid=tuple(eps_grid),
        residuals=tuple(per_eps))


@dataclass(frozen=True)
class BoundaryCondition:
    """One boundary-condition manifold.

    ``kind`` is ``fixed`` (known curve ``manifold(t, x) = 0``), ``free``
    (unknown surface named by ``surface``, jets carry its slopes), or
    ``infinity``.  ``residuals`` maps a jet dict to a list of
    ``(value, scale)`` pairs, one per scalar condition.
    """

    name: str
    kind: str
    residuals: Callable
    manifold: Callable = None
    surface: str = None
    order: int = 1


def _check_on_manifold(condition, jets, tol):
    for value, scale in condition.residuals(jets):
        if np.max(np.abs(value) / (np.abs(scale) + 1e-300)) > tol:
            raise ManifoldSamplingError(
                f"sampler left the manifold of {condition.name}")


def check_boundary_invariance(action: GroupAction,
                              condition: BoundaryCondition,
                              sampler: Callable,
                              eps_grid=EPS_GRID,
                              tol: float = BOUNDARY_TOL) -> ItemResult:
    """Items: fixed- and free-boundary manifolds map into themselves.

    ``sampler()`` must return jets lying on the condition's manifold to
    1e-10 of scale.  For fixed curves the transformed base point must stay on
    the curve; in all cases the transformed jet must satisfy the condition.
    """
    jets = sampler()
    _check_on_manifold(condition, jets, BASE_BOUNDARY_TOL)
    base_scales = [float(np.max(np.abs(scale)) + 1e-300)
                   for _, scale in condition.residuals(jets)]

    per_eps = []
    per_eps_fit = []
    for eps in eps_grid:
        moved = transform_jet(action, eps, jets)
        worst = 0.0
        worst_fit = 0.0
        if condition.kind == "fixed":
            length = np.maximum(1.0, np.abs(jets["x"]))
            memb = float(np.max(np.abs(condition.manifold(
                moved["t"], moved["x"])) / length))
            worst = max(worst, memb)
            worst_fit = max(worst_fit, memb)
        for j, (value, scale) in enumerate(condition.residuals(moved)):
            defect = np.max(np.abs(value) / (np.abs(scale) + 1e-300))
            worst = max(worst, float(defect))
            worst_fit = max(worst_fit,
                            float(np.max(np.abs(value)) / base_scales[j]))
        per_eps.append(worst)
        per_eps_fit.append(worst_fit)
    worst = max(per_eps)
    return ItemResult(
        item=f"boundary:{condition.name}",
        status="pass" if worst <= tol else "fail",
        max_residual=worst, eps_grid=tuple(eps_grid),
        residuals=tuple(per_eps), fit_residuals=tuple(per_eps_fit))


def check_infinity_invariance(action: GroupAction,
                              condition: BoundaryCondition,
                              sequence: Callable,
                              eps_grid=EPS_GRID,
                              growth: float = 100.0) -> ItemResult:
    """Item: the condition at ``x = +infinity`` maps into itself.

    ``sequence()`` returns jets along ``x_n = 10^n`` with field values
    approaching their far limits.  The transformed coordinates must stay
    finite, strictly increasing, positive at the tail and unbounded (growth
    across the last decades), and the transformed condition values must decay
    with the sequence.
    """
    jets = sequence()
    order = np.argsort(jets["x"])
    per_eps = []
    failure = ""
    for eps in eps_grid:
        try:
            moved = transform_jet(action, eps, jets)
        except LocalValidityError:
            per_eps.append(np.inf)
            failure = failure or "transformation breaks down along the sequence"
            continue
        xs = np.asarray(moved["x"], dtype=float)[order]
        ok = (np.all(np.isfinite(xs)) and np.all(np.diff(xs) > 0.0)
              and xs[-1] > 0.0 and xs[-1] >= growth * abs(xs[-4]))
        if not ok:
            per_eps.append(np.inf)
            failure = failure or (
                f"transformed coordinate stays bounded (tail {xs[-1]:.3e})")
            continue
        worst = 0.0
        for value, scale in condition.residuals(moved):
            vals = np.abs(np.asarray(value, dtype=float)[order])
            ref = max(vals[0], 1e-12 * float(np.max(np.abs(scale))))
            worst = max(worst, vals[-1] / (ref + 1e-300))
        per_eps.append(worst)
    finite = [r for r in per_eps if np.isfinite(r)]
    worst = max(per_eps) if len(finite) == len(per_eps) else np.inf
    passed = np.isfinite(worst) and worst <= 1e-6
    return ItemResult(
        item=f"infinity:{condition.name}",
        status="pass" if passed else "fail",
        max_residual=float(worst) if np.isfinite(worst) else np.inf,
        eps_grid=tuple(eps_grid), residuals=tuple(per_eps),
        details=failure)


def fit_exponential_defect(result: ItemResult):
    """Fit the defect shape ``C*(exp(c*eps) - 1)`` from the eps grid.

    Uses the fixed-scale defect series at the (0.25, 0.5) pair, where
    ``|r(2e)|/|r(e)| = exp(c*e) + 1`` for either sign of ``c``; returns the
    rate ``c`` or None when the shape does not fit.
    """
    series = result.fit_residuals or result.residuals
    try:
        i1 = result.eps_grid.index(0.25)
        i2 = result.eps_grid.index(0.5)
    except ValueError:
        return None
    r1, r2 = series[i1], series[i2]
    if not (np.isfinite(r1) and np.isfinite(r2)) or r1 <= 0.0:
        return None
    ratio = r2 / r1 - 1.0
    if ratio <= 0.0:
        return None
    return float(np.log(ratio) / 0.25)
