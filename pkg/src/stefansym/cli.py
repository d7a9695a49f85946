"""Command-line entry point: solvers, invariance checks, and cross-validation.

Artifacts are plain CSV/text, written with fixed 12-significant-digit
scientific notation and no timestamps, so identical configurations produce
byte-identical files.  Every artifact starts with a header line carrying the
tool version and a hash of the effective configuration.

Exit codes: 0 success, 1 solver non-convergence, 2 configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .material import (
    MaterialConfigError,
    MaterialSpec,
    build_transformed_bvp,
    kirchhoff_inverse,
    load_material,
    material_path,
)
from .travelling_wave import (
    NoTravellingWaveError,
    enthalpy_profile,
    solve_travelling_wave,
)
from .self_similar import (
    ShootingConvergenceError,
    ShootingIntegrationError,
    solve_self_similar,
)
from .fd_oracle import (
    FrontCollapseError,
    SurfaceSolveError,
    validate_travelling_wave,
)
from .symmetry import (
    classify_rod_bvp,
    classify_stefan_bvp,
    verify_table2_generators,
)

# published reference values for the aluminium example: front speed (m/s)
# and liquid thickness (m) at the two pulse powers
REFERENCE_RESULTS = {1e10: (0.10, 9.60e-4), 5e10: (0.54, 2.23e-4)}

STEFAN_FORMS = {
    "steady": lambda t, u: (1.0 + 0.3 * u**2) * np.ones_like(np.asarray(t, float)),
    "inverse-sqrt": lambda t, u: (1.0 + 0.3 * u**2) / np.sqrt(t),
    "linear-t": lambda t, u: (1.0 + 0.3 * u**2) * t,
    "exponential-t": lambda t, u: (1.0 + 0.3 * u**2) * np.exp(0.2 * t),
}

FMT = "%.12e"


class ConfigError(Exception):
    pass


def _config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, default=repr)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _header(config: dict) -> str:
    return f"# stefansym {__version__} config {_config_hash(config)}"


def _write_lines(path: Path, config: dict, lines) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(_header(config) + "\n")
        for line in lines:
            fh.write(line + "\n")


def _out_dir(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(os.environ.get("STEFANSYM_OUTDIR", "stefansym-out"))


def _load_spec(args) -> MaterialSpec:
    name_or_path = args.material
    path = Path(name_or_path)
    if not path.exists() and not path.suffix:
        path = material_path(name_or_path)
    spec = load_material(path)
    overrides = {}
    if getattr(args, "q0", None) is not None:
        overrides["q0"] = args.q0
    for item in getattr(args, "set", None) or []:
        key, _, value = item.partition("=")
        if not value:
            raise ConfigError(f"--set expects NAME=VALUE, got {item!r}")
        if key not in MaterialSpec.__dataclass_fields__:
            raise ConfigError(f"unknown material field {key!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ConfigError(f"value for {key!r} is not a number") from None
    try:
        return replace(spec, **overrides) if overrides else spec
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _phase_temperature(spec, phases, w):
    T = np.empty_like(w)
    liquid = phases == "liquid"
    if np.any(liquid):
        T[liquid] = kirchhoff_inverse(spec, "liquid", w[liquid])
    if np.any(~liquid):
        T[~liquid] = kirchhoff_inverse(spec, "solid", w[~liquid])
    return T


def _write_wave_profile(path, config, spec, bvp, sol, n_points, xi_max_deltas):
    xi = np.linspace(0.0, xi_max_deltas * sol.delta, n_points)
    phases, eta, w = enthalpy_profile(sol, bvp, xi)
    T = _phase_temperature(spec, phases, w)
    rows = ["xi_m,eta,phase,T_K,u_or_v_Jm3"]
    for i in range(len(xi)):
        rows.append(",".join([FMT % xi[i], FMT % eta[i], str(phases[i]),
                              FMT % T[i], FMT % w[i]]))
    _write_lines(path, config, rows)


def _wave_summary_line(sol) -> str:
    return ("mu,delta,delta_star,u_s,residual\n"
            + ",".join(FMT % v for v in
                       (sol.mu, sol.delta, sol.delta_star, sol.u_s,
                        sol.residual)))


def cmd_solve_tw(args) -> int:
    spec = _load_spec(args)
    config = {"command": "solve-tw", "material": spec.__dict__,
              "points": args.points, "xi_max_deltas": args.xi_max_deltas}
    bvp = build_transformed_bvp(spec)
    sol = solve_travelling_wave(bvp)
    out = _out_dir(args)
    _write_wave_profile(out / "tw_profile.csv", config, spec, bvp, sol,
                        args.points, args.xi_max_deltas)
    summary = _wave_summary_line(sol)
    _write_lines(out / "tw_summary.csv", config, summary.splitlines())
    print(summary)
    if sol.multiple_roots:
        print(f"note: {sol.n_candidate_roots} speed-residual roots bracketed; "
              "reporting the smallest", file=sys.stderr)
    return 0


def cmd_solve_ss(args) -> int:
    spec = _load_spec(args)
    config = {"command": "solve-ss", "material": spec.__dict__,
              "points": args.points}
    bvp = build_transformed_bvp(spec, time_law="inverse_sqrt")
    sol = solve_self_similar(bvp)
    out = _out_dir(args)

    rows = ["omega,phase,w_Jm3,T_K"]
    for omega, w in zip(*sol.u_profile):
        T = kirchhoff_inverse(spec, "liquid", float(w))
        rows.append(",".join([FMT % omega, "liquid", FMT % w, FMT % T]))
    for omega, w in zip(*sol.v_profile):
        T = kirchhoff_inverse(spec, "solid", float(w))
        rows.append(",".join([FMT % omega, "solid", FMT % w, FMT % T]))
    _write_lines(out / "ss_profile.csv", config, rows)

    summary = ("omega1,omega2,bc_residual\n"
               + ",".join(FMT % v for v in
                          (sol.omega1, sol.omega2, sol.bc_residual)))
    _write_lines(out / "ss_summary.csv", config, summary.splitlines())
    print(summary)
    return 0


def _residual_csv_rows(reports: dict):
    rows = ["family,item,eps,residual"]
    for name, report in sorted(reports.items()):
        for item in report.items:
            for eps, res in zip(item.eps_grid, item.residuals):
                rows.append(f"{name},{item.item},{eps:g},{FMT % res}")
    return rows


def cmd_check(args) -> int:
    out = _out_dir(args)
    scenario = args.scenario
    if scenario == "rod":
        config = {"command": "check-rod", "k": args.k, "gamma": args.gamma,
                  "q0": args.q0}
        result = classify_rod_bvp(args.k, args.gamma, args.q0)
        lines = [f"scenario: rod (k={args.k:g}, gamma={args.gamma:g}, "
                 f"q0={args.q0:g})",
                 f"classification row: {result.row}",
                 "passing families: " + (", ".join(result.passing) or "none"),
                 ""]
        for name, report in sorted(result.reports.items()):
            lines.append(f"{name}: {'pass' if report.passed else 'FAIL'}")
            lines.extend(report.summary_lines())
        if result.findings:
            lines.append("")
            lines.append("constraint findings:")
            lines.extend(f"  {f}" for f in result.findings)
        _write_lines(out / "check_rod_report.txt", config, lines)
        _write_lines(out / "check_rod_residuals.csv", config,
                     _residual_csv_rows(result.reports))
        print("\n".join(lines[:3]))
        return 0
    if scenario == "stefan":
        config = {"command": "check-stefan", "q_form": args.q_form,
                  "h_form": args.h_form}
        result = classify_stefan_bvp(STEFAN_FORMS[args.q_form],
                                     STEFAN_FORMS[args.h_form])
        lines = [f"scenario: stefan (q: {args.q_form}, h: {args.h_form})",
                 f"classification row: {result.row}",
                 "invariance groups: " + ", ".join(result.groups),
                 ""]
        rows = ["family,item,eps,residual"]
        for key, value in sorted(result.residuals.items()):
            lines.append(f"  functional defect {key}: {value:.3e}")
            rows.append(f"{key.split(':')[0]},{key},all,{FMT % value}")
        _write_lines(out / "check_stefan_report.txt", config, lines)
        _write_lines(out / "check_stefan_residuals.csv", config, rows)
        print("\n".join(lines[:3]))
        return 0
    if scenario.startswith("table2-case-"):
        try:
            case = int(scenario.rsplit("-", 1)[1])
        except ValueError:
            raise ConfigError(f"bad scenario {scenario!r}") from None
        config = {"command": "check-table2", "case": case}
        report = verify_table2_generators(case)
        lines = [f"scenario: diffusivity-pair case {case}",
                 f"all generators pass: {report.passed}", ""]
        lines.extend(report.summary_lines())
        rows = ["family,item,eps,residual"]
        for name, (ru, rv) in report.checks.items():
            for item in (ru, rv):
                for eps, res in zip(item.eps_grid, item.residuals):
                    rows.append(f"{name},{item.item},{eps:g},{FMT % res}")
        _write_lines(out / f"check_table2_case{case}_report.txt", config,
                     lines)
        _write_lines(out / f"check_table2_case{case}_residuals.csv", config,
                     rows)
        print("\n".join(lines[:2]))
        return 0
    raise ConfigError(f"unknown scenario {scenario!r}")


def _parse_grids(text: str):
    grids = []
    for part in text.split(","):
        try:
            n_liq, n_sol = part.lower().split("x")
            grids.append((int(n_liq), int(n_sol)))
        except ValueError:
            raise ConfigError(
                f"bad grid spec {part!r}; expected NLIQxNSOL") from None
    return tuple(grids)


def cmd_verify_fd(args) -> int:
    spec = _load_spec(args)
    grids = _parse_grids(args.grids)
    config = {"command": "verify-fd", "material": spec.__dict__,
              "grids": grids, "travel": args.travel,
              "snapshots": args.snapshots}
    bvp = build_transformed_bvp(spec)
    sol = solve_travelling_wave(bvp)
    out = _out_dir(args)

    val = validate_travelling_wave(bvp, sol, grids=grids, travel=args.travel)

    # snapshot trajectory on the finest grid
    from .fd_oracle import run, seed_travelling_wave
    t_end = args.travel * sol.delta / sol.mu
    state = seed_travelling_wave(bvp, sol, *grids[-1], t_end)
    rec = run(state, bvp, t_end, snapshot_every=t_end / args.snapshots)
    rows = ["t,s1,s2,phase,x,T"]
    for (t, s1, s2, u, v) in rec.snapshots:
        xs = np.linspace(s1, s2, len(u))
        Ts = kirchhoff_inverse(spec, "liquid", u)
        for x, T in zip(xs, Ts):
            rows.append(",".join([FMT % t, FMT % s1, FMT % s2, "liquid",
                                  FMT % x, FMT % T]))
        xs = np.linspace(s2, state.x_max, len(v))
        Ts = kirchhoff_inverse(spec, "solid", v)
        for x, T in zip(xs, Ts):
            rows.append(",".join([FMT % t, FMT % s1, FMT % s2, "solid",
                                  FMT % x, FMT % T]))
    _write_lines(out / "fd_snapshots.csv", config, rows)

    lines = [f"exact_front_speed_m_s = {FMT % val.mu}"]
    for g in val.grids:
        tag = f"grid_{g.n_liq}x{g.n_sol}"
        lines.append(f"{tag}.fitted_surface_speed_m_s = {FMT % g.fitted_v1}")
        lines.append(f"{tag}.fitted_front_speed_m_s = {FMT % g.fitted_v2}")
        lines.append(f"{tag}.velocity_error_rel = {FMT % g.velocity_error}")
        lines.append(f"{tag}.profile_drift_rel = {FMT % g.profile_drift}")
        lines.append(f"{tag}.thickness_drift_rel = {FMT % g.thickness_drift}")
    lines.append(f"monotone_convergence = {val.monotone}")
    lines.append(f"finest_velocity_error_rel = "
                 f"{FMT % val.finest.velocity_error}")
    _write_lines(out / "fd_report.txt", config, lines)
    print("\n".join(lines[-2:]))
    return 0


def cmd_reproduce_paper(args) -> int:
    out = _out_dir(args)
    rows = ["q0_W_m2,mu_computed_m_s,mu_reference_m_s,"
            "delta_computed_m,delta_reference_m"]
    spec0 = _load_spec(args)
    config = {"command": "reproduce-paper", "material": spec0.__dict__}
    for q0, (mu_ref, delta_ref) in sorted(REFERENCE_RESULTS.items()):
        spec = replace(spec0, q0=q0)
        bvp = build_transformed_bvp(spec)
        sol = solve_travelling_wave(bvp)
        rows.append(",".join([FMT % q0, FMT % sol.mu, FMT % mu_ref,
                              FMT % sol.delta, FMT % delta_ref]))
        _write_wave_profile(
            out / f"profile_q0_{q0:.0e}.csv".replace("+", ""),
            {**config, "q0": q0}, spec, bvp, sol,
            args.points, args.xi_max_deltas)
    _write_lines(out / "reference_comparison.csv", config, rows)
    print("\n".join(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stefansym",
        description="Exact and numerical solvers for two-phase "
                    "melting/evaporation moving-boundary problems.")
    parser.add_argument("--version", action="version",
                        version=f"stefansym {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_material_args(p):
        p.add_argument("--material", default="aluminium",
                       help="material file path or packaged name "
                            "(flat key=value, SI units)")
        p.add_argument("--q0", type=float, default=None,
                       help="override pulse power, W/m^2")
        p.add_argument("--set", action="append", metavar="NAME=VALUE",
                       help="override any material field (SI units); "
                            "repeatable")
        p.add_argument("--out", default=None,
                       help="output directory (default: $STEFANSYM_OUTDIR "
                            "or ./stefansym-out)")

    p = sub.add_parser("solve-tw",
                       help="exact plane-front solution (steady flux)")
    add_material_args(p)
    p.add_argument("--points", type=int, default=200,
                   help="profile sample count (dimensionless)")
    p.add_argument("--xi-max-deltas", type=float, default=5.0,
                   help="profile extent in liquid thicknesses "
                        "(dimensionless)")
    p.set_defaults(func=cmd_solve_tw)

    p = sub.add_parser("solve-ss",
                       help="self-similar solution (1/sqrt(t) flux)")
    add_material_args(p)
    p.add_argument("--points", type=int, default=0,
                   help="unused; profiles are emitted on the solver grid")
    p.set_defaults(func=cmd_solve_ss)

    p = sub.add_parser("check",
                       help="invariance checks: rod | stefan | table2-case-N")
    p.add_argument("scenario",
                   help="rod, stefan, or table2-case-N (N in 1..8)")
    p.add_argument("--k", type=float, default=1.0,
                   help="rod diffusivity exponent (dimensionless)")
    p.add_argument("--gamma", type=float, default=0.0,
                   help="rod flux modulation frequency, 1/s")
    p.add_argument("--q0", type=float, default=1.0,
                   help="rod flux amplitude (model units)")
    p.add_argument("--q-form", choices=sorted(STEFAN_FORMS), default="steady",
                   help="surface flux time dependence (stefan scenario)")
    p.add_argument("--h-form", choices=sorted(STEFAN_FORMS), default="steady",
                   help="recession-speed time dependence (stefan scenario)")
    p.add_argument("--out", default=None,
                   help="output directory")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify-fd",
                       help="cross-validate the exact front against the "
                            "finite-difference oracle")
    add_material_args(p)
    p.add_argument("--grids", default="21x150,41x300,81x600",
                   help="comma-separated NLIQxNSOL node counts")
    p.add_argument("--travel", type=float, default=10.0,
                   help="run length in liquid thicknesses (dimensionless)")
    p.add_argument("--snapshots", type=int, default=4,
                   help="snapshot count over the run (dimensionless)")
    p.set_defaults(func=cmd_verify_fd)

    p = sub.add_parser("reproduce-paper",
                       help="aluminium reference table at q0 = 1e10 and "
                            "5e10 W/m^2 plus profile curves")
    add_material_args(p)
    p.add_argument("--points", type=int, default=200,
                   help="profile sample count (dimensionless)")
    p.add_argument("--xi-max-deltas", type=float, default=5.0,
                   help="profile extent in liquid thicknesses "
                        "(dimensionless)")
    p.set_defaults(func=cmd_reproduce_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, MaterialConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NoTravellingWaveError, ShootingConvergenceError,
            ShootingIntegrationError, FrontCollapseError,
            SurfaceSolveError) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
