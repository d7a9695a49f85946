"""Front-tracking oracle: stability guards, convergence, cross-validation."""

import numpy as np
import pytest

from stefansym.fd_oracle import (
    CflError,
    FrontCollapseError,
    FrontTrackedState,
    cfl_bound,
    fit_front_velocity,
    fit_sqrt_front,
    run,
    seed_self_similar,
    seed_travelling_wave,
    step,
    validate_self_similar,
    validate_travelling_wave,
)
from stefansym.material import TransformedBVP, build_transformed_bvp, aluminium_spec
from stefansym.self_similar import solve_self_similar
from stefansym.travelling_wave import solve_travelling_wave


def manufactured_bvp(h_value=0.0, q_value=0.0, v_m=1.0, v_inf=1.0):
    """Constant-coefficient problem; surface pair optionally disabled."""
    def const(x, val):
        return np.full_like(np.asarray(x, dtype=float), val) \
            if np.ndim(x) else val
    return TransformedBVP(
        d1=lambda u: const(u, 1e-4), d2=lambda v: const(v, 1e-4),
        q_of_u=lambda u: const(u, q_value),
        h_of_u=lambda u: const(u, h_value),
        time_law="steady", H1=1.0, H2=1.0,
        u_m=2.0, v_m=v_m, v_inf=v_inf, u_cap=10.0)


class TestStep:
    def test_equilibrium_state_is_fixed_point(self):
        bvp = manufactured_bvp()     # no flux, no recession, v_m == v_inf
        state = FrontTrackedState(
            t=0.0, s1=0.0, s2=1e-3, x_max=5e-3,
            u=np.full(11, bvp.u_m), v=np.full(21, bvp.v_inf))
        out = state
        for _ in range(20):
            out = step(out, bvp, 0.5 * cfl_bound(out, bvp))
        assert np.max(np.abs(out.u - bvp.u_m)) <= 1e-9 * bvp.u_m
        assert np.max(np.abs(out.v - bvp.v_inf)) <= 1e-9 * bvp.v_inf
        assert out.s1 == 0.0 and out.s2 == 1e-3

    def test_cfl_violation_rejected(self):
        bvp = manufactured_bvp()
        state = FrontTrackedState(
            t=0.0, s1=0.0, s2=1e-3, x_max=5e-3,
            u=np.full(11, bvp.u_m), v=np.full(21, bvp.v_inf))
        with pytest.raises(CflError):
            step(state, bvp, 10.0 * cfl_bound(state, bvp))

    def test_front_collapse_detected(self):
        bvp = manufactured_bvp(h_value=1e6)   # surface outruns the front
        state = FrontTrackedState(
            t=0.0, s1=0.0, s2=1e-3, x_max=1.0,
            u=np.full(5, bvp.u_m), v=np.full(5, bvp.v_inf))
        with pytest.raises(FrontCollapseError):
            step(state, bvp, cfl_bound(state, bvp))

    def test_front_ordering_enforced(self):
        with pytest.raises(ValueError, match="s1 < s2"):
            FrontTrackedState(t=0.0, s1=1.0, s2=0.5, x_max=2.0,
                              u=np.zeros(3), v=np.zeros(3))


@pytest.fixture(scope="module")
def wave(al_bvp):
    return solve_travelling_wave(al_bvp)


class TestTravellingWaveCrossValidation:
    def test_seeded_fronts_advance_at_solved_speed(self, al_bvp, wave):
        t_end = 1.0 * wave.delta / wave.mu
        state = seed_travelling_wave(al_bvp, wave, 21, 150, t_end)
        rec = run(state, al_bvp, t_end)
        v1 = fit_front_velocity(rec.times, rec.s1)
        v2 = fit_front_velocity(rec.times, rec.s2)
        assert v1 == pytest.approx(wave.mu, rel=5e-3)
        assert v2 == pytest.approx(wave.mu, rel=5e-3)

    def test_refinement_shrinks_front_error(self, al_bvp, wave):
        # halving dx (dt follows as dx^2) cuts the front-position error
        # by roughly the mixed first/second order of the scheme
        t_end = 2.0 * wave.delta / wave.mu
        errors = []
        for n_liq, n_sol in ((21, 150), (41, 300)):
            state = seed_travelling_wave(al_bvp, wave, n_liq, n_sol, t_end)
            rec = run(state, al_bvp, t_end)
            exact = wave.mu * t_end
            errors.append(abs((rec.final.s2 - wave.delta) - exact))
        ratio = errors[0] / errors[1]
        assert 2.0 <= ratio <= 8.0

    def test_fields_stay_in_physical_ranges(self, al_bvp, wave):
        t_end = 1.0 * wave.delta / wave.mu
        state = seed_travelling_wave(al_bvp, wave, 21, 150, t_end)
        rec = run(state, al_bvp, t_end)
        tol_u = 1e-6 * (wave.u_s - al_bvp.u_m)
        tol_v = 1e-6 * (al_bvp.v_m - al_bvp.v_inf)
        assert rec.u_range[0] >= al_bvp.u_m - tol_u
        assert rec.u_range[1] <= al_bvp.u_cap
        assert rec.v_range[0] >= al_bvp.v_inf - tol_v
        assert rec.v_range[1] <= al_bvp.v_m + tol_v

    def test_conservation_bookkeeping_converges(self, al_bvp, wave):
        t_end = 1.0 * wave.delta / wave.mu
        defects = []
        for n_liq, n_sol in ((21, 150), (41, 300)):
            state = seed_travelling_wave(al_bvp, wave, n_liq, n_sol, t_end)
            rec = run(state, al_bvp, t_end)
            defects.append(max(d for _, d in rec.conservation_defects))
        assert defects[0] <= 5e-3
        assert defects[1] < defects[0]

    def test_snapshots_on_fixed_cadence(self, al_bvp, wave):
        t_end = 0.5 * wave.delta / wave.mu
        state = seed_travelling_wave(al_bvp, wave, 21, 150, t_end)
        rec = run(state, al_bvp, t_end, snapshot_every=t_end / 4.0)
        # cadence points inside the run plus the final state
        assert len(rec.snapshots) == 5
        times = [s[0] for s in rec.snapshots]
        assert times == sorted(times)
        assert times[-1] == pytest.approx(t_end, rel=1e-12)

    def test_validator_report_structure(self, al_bvp, wave):
        val = validate_travelling_wave(al_bvp, wave, grids=((21, 150),),
                                       travel=1.0)
        g = val.finest
        assert g.velocity_error <= 0.02
        assert g.profile_drift <= 0.02
        assert g.thickness_drift <= 0.05

    def test_time_law_guard(self, al_spec, wave):
        decaying = build_transformed_bvp(al_spec, time_law="inverse_sqrt")
        with pytest.raises(ValueError, match="steady"):
            validate_travelling_wave(decaying, wave)


@pytest.fixture(scope="module")
def ss_bvp():
    return build_transformed_bvp(aluminium_spec(), time_law="inverse_sqrt")


@pytest.fixture(scope="module")
def ss_sol(ss_bvp):
    return solve_self_similar(ss_bvp)


class TestSelfSimilarCrossValidation:
    def test_front_power_law_and_coefficients(self, ss_bvp, ss_sol):
        val = validate_self_similar(ss_bvp, ss_sol, t0=0.01, t_end=0.018,
                                    grid=(17, 900))
        assert 0.48 <= val.exponent_s1 <= 0.52
        assert 0.48 <= val.exponent_s2 <= 0.52
        assert val.omega1_dev <= 0.03
        assert val.omega2_dev <= 0.03

    def test_start_time_doubling_is_self_consistent(self, ss_bvp, ss_sol):
        # the similarity scaling maps one run onto the other, so fitted
        # coefficients agree far below the discretization level
        a = validate_self_similar(ss_bvp, ss_sol, t0=0.01, t_end=0.016,
                                  grid=(17, 900))
        b = validate_self_similar(ss_bvp, ss_sol, t0=0.02, t_end=0.032,
                                  grid=(17, 900))
        assert abs(a.omega2_fit - b.omega2_fit) <= 1e-3 * a.omega2_fit
        assert abs(a.omega1_fit - b.omega1_fit) <= 1e-3 * a.omega1_fit

    def test_seed_requires_positive_start(self, ss_bvp, ss_sol):
        with pytest.raises(ValueError, match="t0"):
            seed_self_similar(ss_bvp, ss_sol, 0.0, 11, 100, 1.0)


def test_sqrt_fit_recovers_coefficient():
    t = np.linspace(0.5, 2.0, 400)
    w, p = fit_sqrt_front(t, 0.37 * np.sqrt(t))
    assert w == pytest.approx(0.37, rel=1e-10)
    assert p == pytest.approx(0.5, abs=1e-10)
