"""Transformation families, invariance checks, and classification catalogs."""

import math

import numpy as np
import pytest

from stefansym.material import build_transformed_bvp
from stefansym.symmetry import (
    JetContractError,
    LocalValidityError,
    apply,
    apply_equivalence,
    check_boundary_invariance,
    check_infinity_invariance,
    check_pde_invariance,
    classify_rod_bvp,
    classify_stefan_bvp,
    conformal,
    explicit_jets,
    fit_exponential_defect,
    heat_kernel,
    inverse_point,
    rod_far_condition,
    rod_far_sequence,
    rod_flux_condition,
    rod_flux_sampler,
    scaling,
    scaling_with_shift,
    stefan_extended_dilation,
    stefan_far_condition,
    stefan_far_sequence,
    stefan_front_condition,
    stefan_front_sampler,
    stefan_surface_condition,
    stefan_surface_sampler,
    superposition,
    transform_jet,
    translation,
    verify_table2_generators,
)
from stefansym.symmetry.classify import rod_pde, rod_solution_jets
from stefansym.travelling_wave import solve_travelling_wave


def catalog_families():
    return [
        translation("tr", dt=1.0, dx=0.5),
        scaling("sc", at=2.0, ax=1.0,
                field_laws={"u": ("scale", 2.0), "v": ("shift", 1.0)}),
        scaling_with_shift("sws", at=2.0, ax=-1.0, shift_rate=1.3,
                           field_laws={"u": ("scale", -1.5)}),
        conformal("cf", power=3.0, field_names=("u", "v")),
        superposition("sup", "u", heat_kernel(0.7)),
    ]


class TestGroupStructure:
    def test_identity_at_zero(self):
        rng = np.random.default_rng(11)
        pts = {"t": rng.uniform(0.5, 2.0, 100), "x": rng.uniform(0.1, 1.2, 100),
               "u": rng.uniform(0.5, 2.0, 100), "v": rng.uniform(0.5, 2.0, 100)}
        for fam in catalog_families():
            out = transform_jet(fam, 0.0, pts)
            for key in ("t", "x", "u", "v"):
                assert np.max(np.abs(out[key] - pts[key])) <= 1e-12

    def test_composition_adds_parameters(self):
        rng = np.random.default_rng(12)
        pts = {"t": rng.uniform(0.5, 2.0, 100), "x": rng.uniform(0.1, 1.2, 100),
               "u": rng.uniform(0.5, 2.0, 100), "v": rng.uniform(0.5, 2.0, 100)}
        eps_pairs = [(0.2, 0.1), (-0.3, 0.15), (0.25, 0.25), (-0.1, -0.2),
                     (0.05, -0.02)]
        for fam in catalog_families():
            for e1, e2 in eps_pairs:
                two = transform_jet(fam, e1, transform_jet(fam, e2, pts))
                one = transform_jet(fam, e1 + e2, pts)
                for key in ("t", "x", "u", "v"):
                    scale = np.maximum(1.0, np.abs(one[key]))
                    assert np.max(np.abs(two[key] - one[key]) / scale) <= 1e-12

    def test_inverse_is_negated_parameter(self):
        fam = conformal("cf", 3.0, ("u",))
        t, x = inverse_point(fam, 0.3, *(
            fam.t_map(1.0, 0.8, 0.3), fam.x_map(1.0, 0.8, 0.3)))
        assert t == pytest.approx(1.0, rel=1e-14)
        assert x == pytest.approx(0.8, rel=1e-14)


class TestApplyAndProlong:
    def test_gauge_dilation_point_map(self):
        fam = scaling("T4", ax=-2.0, field_laws={"u": ("scale", 2.0)})
        out = apply(fam, 0.5, {"t": 1.5, "x": 0.4, "u": 2.0})
        assert out["t"] == 1.5
        assert out["x"] == pytest.approx(0.4 * math.exp(-1.0))
        assert out["u"] == pytest.approx(2.0 * math.exp(1.0))

    def test_conformal_pole_is_rejected(self):
        fam = conformal("T5", 3.0, ("u",))
        with pytest.raises(LocalValidityError):
            apply(fam, 0.5, {"t": 1.0, "x": 2.0, "u": 1.0})

    def test_surfaces_ride_along_unchanged(self):
        fam = stefan_extended_dilation()
        jet = {"t": 1.0, "x": 0.5, "S1": 0.0, "S1_t": -0.2, "S1_x": 1.0,
               "S2": 0.0, "S2_t": -0.1, "S2_x": 1.0}
        out = transform_jet(fam, 0.4, jet)
        assert out["S1"] == 0.0 and out["S2"] == 0.0

    def test_dilation_first_prolongation_identities(self):
        # slopes and front speeds contract by e^{-eps} under the dilation
        fam = stefan_extended_dilation()
        eps = 0.37
        jet = {"t": 1.2, "x": 0.8, "u": 2.0, "u_t": 0.5, "u_x": -1.3,
               "S1": 0.0, "S1_t": -0.25, "S1_x": 1.0}
        out = transform_jet(fam, eps, jet)
        assert out["u_x"] == pytest.approx(math.exp(-eps) * jet["u_x"], rel=1e-14)
        assert out["V1"] == pytest.approx(math.exp(-eps) * 0.25, rel=1e-14)

    def test_translation_leaves_derivatives(self):
        fam = translation("tr", dt=1.0, dx=1.0)
        jet = {"t": 1.0, "x": 0.5, "u": 2.0, "u_t": 0.3, "u_x": -0.7,
               "u_xx": 0.2}
        out = transform_jet(fam, 0.4, jet)
        for key in ("u", "u_t", "u_x", "u_xx"):
            assert out[key] == jet[key]

    @pytest.mark.parametrize("eps", [0.3, -0.25])
    def test_prolongation_matches_finite_differences(self, eps):
        # independent route: difference the transformed sample field directly
        ufun = lambda t, x: np.sin(1.3 * x + 0.2 * t) + 0.5 * x * x + 0.1 * t
        t0, x0 = 1.1, 0.7
        for fam in catalog_families():
            jet = {"t": t0, "x": x0, "u": ufun(t0, x0),
                   "u_t": (ufun(t0 + 1e-6, x0) - ufun(t0 - 1e-6, x0)) / 2e-6,
                   "u_x": (ufun(t0, x0 + 1e-6) - ufun(t0, x0 - 1e-6)) / 2e-6}
            moved = transform_jet(fam, eps, jet)
            fmap = fam.field_map("u")

            def u_star(ts, xs):
                tb, xb = inverse_point(fam, eps, ts, xs)
                return fmap.map(tb, xb, ufun(tb, xb), eps)

            h = 1e-6
            fd_t = (u_star(moved["t"] + h, moved["x"])
                    - u_star(moved["t"] - h, moved["x"])) / (2 * h)
            fd_x = (u_star(moved["t"], moved["x"] + h)
                    - u_star(moved["t"], moved["x"] - h)) / (2 * h)
            assert abs(fd_t - moved["u_t"]) <= 1e-7 * max(1.0, abs(fd_t))
            assert abs(fd_x - moved["u_x"]) <= 1e-7 * max(1.0, abs(fd_x))


class TestPdeInvariance:
    @pytest.mark.parametrize("k", [1.0, -2.0, -4.0 / 3.0, 2.0])
    def test_power_diffusion_under_both_dilations(self, k):
        jets = rod_solution_jets(k)
        t3 = check_pde_invariance(scaling("T3", at=2.0, ax=1.0),
                                  rod_pde(k), jets)
        t4 = check_pde_invariance(
            scaling("T4", ax=k, field_laws={"u": ("scale", 2.0)}),
            rod_pde(k), jets)
        assert t3.passed and t4.passed

    def test_explicit_space_dependence_breaks_translation(self):
        # u_t = u_xx + x*u admits exp(x*t + t^3/3) as an exact solution
        from stefansym.symmetry.checks import PdeOperator
        pde = PdeOperator(
            name="drifted",
            residual=lambda t, x, w, wt, wx, wxx: wt - wxx - x * w,
            scale=lambda t, x, w, wt, wx, wxx: (
                np.abs(wt) + np.abs(wxx) + np.abs(x * w) + 1e-300))
        sol = lambda t, x: np.exp(x * t + t**3 / 3.0)
        jets = explicit_jets(
            u=sol,
            u_t=lambda t, x: (x + t * t) * sol(t, x),
            u_x=lambda t, x: t * sol(t, x),
            u_xx=lambda t, x: t * t * sol(t, x),
            t_vals=(0.4, 0.9), x_vals=(0.2, 0.7, 1.1))
        res = check_pde_invariance(translation("x-shift", dx=1.0), pde, jets)
        assert not res.passed

    def test_jet_contract_enforced(self):
        jets = rod_solution_jets(1.0)
        broken = {k: v for k, v in jets.items() if k != "u_xx"}
        with pytest.raises(JetContractError, match="u_xx"):
            check_pde_invariance(translation("tr", dt=1.0), rod_pde(1.0),
                                 broken)

    def test_non_solution_samples_rejected(self):
        jets = dict(rod_solution_jets(1.0))
        jets["u_t"] = jets["u_t"] + 1.0
        with pytest.raises(JetContractError, match="violate"):
            check_pde_invariance(translation("tr", dt=1.0), rod_pde(1.0), jets)


class TestBoundaryInvariance:
    def test_flux_fails_under_parabolic_dilation_with_drive(self):
        r = check_boundary_invariance(
            scaling("T3", at=2.0, ax=1.0),
            rod_flux_condition(k=1.0, gamma=0.0, q0=2.0),
            rod_flux_sampler(k=1.0, gamma=0.0, q0=2.0))
        assert not r.passed
        # defect follows C*(exp(-eps) - 1): unit negative rate
        assert fit_exponential_defect(r) == pytest.approx(-1.0, abs=1e-9)

    def test_flux_passes_under_gauge_dilation_at_special_exponent(self):
        r = check_boundary_invariance(
            scaling("T4", ax=-2.0, field_laws={"u": ("scale", 2.0)}),
            rod_flux_condition(k=-2.0, gamma=0.0, q0=2.0),
            rod_flux_sampler(k=-2.0, gamma=0.0, q0=2.0))
        assert r.passed

    def test_flux_defect_rate_tracks_exponent(self):
        r = check_boundary_invariance(
            scaling("T4", ax=1.0, field_laws={"u": ("scale", 2.0)}),
            rod_flux_condition(k=1.0, gamma=0.0, q0=2.0),
            rod_flux_sampler(k=1.0, gamma=0.0, q0=2.0))
        assert fit_exponential_defect(r) == pytest.approx(3.0, abs=1e-9)

    def test_melt_front_invariant_under_dilation(self, al_spec):
        bvp = build_transformed_bvp(al_spec, time_law="inverse_sqrt")
        r = check_boundary_invariance(
            stefan_extended_dilation(), stefan_front_condition(bvp),
            stefan_front_sampler(bvp))
        assert r.passed and r.max_residual <= 1e-12

    def test_surface_pair_needs_matching_time_law(self, al_spec):
        dil = stefan_extended_dilation()
        decaying = build_transformed_bvp(al_spec, time_law="inverse_sqrt")
        steady = build_transformed_bvp(al_spec, time_law="steady")
        assert check_boundary_invariance(
            dil, stefan_surface_condition(decaying),
            stefan_surface_sampler(decaying)).passed
        assert not check_boundary_invariance(
            dil, stefan_surface_condition(steady),
            stefan_surface_sampler(steady)).passed


class TestSamplerContract:
    def test_off_manifold_sampler_rejected(self):
        from stefansym.symmetry import ManifoldSamplingError
        cond = rod_flux_condition(k=1.0, gamma=0.0, q0=2.0)
        good = rod_flux_sampler(k=1.0, gamma=0.0, q0=2.0)

        def bad():
            jets = good()
            jets["u_x"] = jets["u_x"] + 1.0
            return jets

        with pytest.raises(ManifoldSamplingError):
            check_boundary_invariance(translation("tr", dt=1.0), cond, bad)


class TestInfinityInvariance:
    @pytest.mark.parametrize("fam", [
        scaling("T3", at=2.0, ax=1.0),
        scaling("T4", ax=-4.0 / 3.0, field_laws={"u": ("scale", 2.0)}),
    ])
    def test_decay_condition_survives_dilations(self, fam):
        r = check_infinity_invariance(fam, rod_far_condition(),
                                      rod_far_sequence())
        assert r.passed

    def test_conformal_family_bounded_image(self):
        r = check_infinity_invariance(conformal("T5", 3.0, ("u",)),
                                      rod_far_condition(), rod_far_sequence())
        assert not r.passed
        assert "bounded" in r.details or "breaks down" in r.details

    def test_far_value_survives_space_shift(self, al_bvp):
        r = check_infinity_invariance(
            translation("space-shift", dx=1.0),
            stefan_far_condition(al_bvp), stefan_far_sequence(al_bvp))
        assert r.passed


EXPECTED_ROD_ROWS = {
    (1.0, 0.0, 0.0): 1, (-2.0, 0.0, 0.0): 1, (-4.0 / 3.0, 0.0, 0.0): 1,
    (2.0, 1.0, 0.0): 1,
    (1.0, 0.0, 1.0): 2, (-2.0, 0.0, 1.0): 2, (-4.0 / 3.0, 0.0, 1.0): 2,
    (2.0, 0.0, 1.0): 2,
    (1.0, 1.0, 1.0): None, (-2.0, 1.0, 1.0): 3, (-4.0 / 3.0, 1.0, 1.0): None,
    (-2.0, 1.0, 0.0): 1,
}


class TestRodClassification:
    @pytest.mark.parametrize("config,row", sorted(
        EXPECTED_ROD_ROWS.items(), key=str))
    def test_rows(self, config, row):
        c = classify_rod_bvp(*config)
        assert c.row == row

    def test_space_shift_never_passes(self):
        c = classify_rod_bvp(1.0, 0.0, 0.0)
        assert not c.passed("space-shift")

    def test_conformal_rejected_at_special_exponent(self):
        c = classify_rod_bvp(-4.0 / 3.0, 0.0, 1.0)
        assert "conformal" in c.reports
        assert not c.passed("conformal")
        assert not c.reports["conformal"].item("infinity").passed

    def test_parabolic_dilation_needs_zero_flux(self):
        c = classify_rod_bvp(1.0, 0.0, 1.0)
        assert not c.passed("parabolic-dilation")
        assert any("q0 = 0" in f for f in c.findings
                   if f.startswith("parabolic-dilation"))

    def test_gauge_dilation_exponent_discovered(self):
        c = classify_rod_bvp(1.0, 0.0, 1.0)
        assert any("k = -2" in f for f in c.findings
                   if f.startswith("gauge-dilation"))

    def test_zero_exponent_rejected(self):
        with pytest.raises(ValueError):
            classify_rod_bvp(0.0, 0.0, 1.0)


class TestStefanClassification:
    def test_canonical_rows(self):
        q = lambda t, u: 1.0 + 0.3 * u**2
        h = lambda t, u: 0.1 * u
        assert classify_stefan_bvp(q, h).row == 2
        assert classify_stefan_bvp(
            lambda t, u: q(t, u) / np.sqrt(t),
            lambda t, u: h(t, u) / np.sqrt(t)).row == 3
        assert classify_stefan_bvp(q, h).groups == ("time-shift", "space-shift")

    def test_generic_counterexamples(self):
        q = lambda t, u: 1.0 + 0.3 * u**2
        h = lambda t, u: 0.1 * u
        assert classify_stefan_bvp(
            lambda t, u: q(t, u) * t, lambda t, u: h(t, u) * t).row == 1
        assert classify_stefan_bvp(
            lambda t, u: q(t, u) * np.exp(0.2 * t),
            lambda t, u: h(t, u) * (1.0 + t)).row == 1

    def test_mismatched_pair_downgrades(self):
        # q of row-3 form but h steady: neither extension survives
        q = lambda t, u: (1.0 + u) / np.sqrt(t)
        h = lambda t, u: 0.1 * u
        assert classify_stefan_bvp(q, h).row == 1


class TestPairCases:
    @pytest.mark.parametrize("case", range(1, 9))
    def test_all_generators_pass(self, case):
        rep = verify_table2_generators(case)
        assert rep.passed
        for ru, rv in rep.checks.values():
            assert ru.max_residual <= 1e-6
            assert rv.max_residual <= 1e-6

    def test_equal_linear_case_excluded(self):
        with pytest.raises(ValueError):
            verify_table2_generators(9)

    def test_conformal_pair_present_in_contracting_case(self):
        rep = verify_table2_generators(8)
        assert "conformal-pair" in rep.checks


class TestEquivalence:
    def test_remapped_problem_stays_in_class(self, al_bvp):
        mapped = apply_equivalence(al_bvp, e0=0.7, e1=1.2, e2=2.0, e3=0.5,
                                   u0=1e8, v0=-2e8)
        mapped.validate()

    def test_plane_front_maps_consistently(self, al_bvp, al_wave):
        # with matching heat-content scalings the front data transform
        # like speeds and lengths
        mapped = apply_equivalence(al_bvp, e0=2.0, e1=3.0, e2=1.5, e3=1.5,
                                   t0=0.4, x0=-1.0, u0=2e8, v0=3e8)
        mapped.validate()
        sol = solve_travelling_wave(mapped)
        assert sol.mu == pytest.approx(al_wave.mu * 3.0 / 2.0, rel=1e-9)
        assert sol.delta == pytest.approx(al_wave.delta * 3.0, rel=1e-9)

    def test_time_shift_with_decaying_pair_rejected(self, al_spec):
        bvp = build_transformed_bvp(al_spec, time_law="inverse_sqrt")
        with pytest.raises(ValueError, match="time shifts"):
            apply_equivalence(bvp, t0=1.0)
