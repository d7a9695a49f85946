"""Heat-content transform and material plumbing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefansym.material import (
    BvpConstructionError,
    ConstitutiveLawError,
    EnthalpyDomainError,
    MaterialConfigError,
    aluminium_spec,
    build_transformed_bvp,
    enthalpy_from_heat_capacity,
    kirchhoff_forward,
    kirchhoff_inverse,
    load_material,
    material_path,
)


@pytest.fixture(scope="module")
def spec():
    return aluminium_spec()


@pytest.fixture(scope="module")
def bvp(spec):
    return build_transformed_bvp(spec)


class TestKirchhoffForward:
    def test_liquid_linear(self, spec):
        T = 1234.5
        assert kirchhoff_forward(spec, "liquid", T) == spec.rho * spec.c1 * T

    def test_solid_at_melting_point(self, spec):
        # closed-form quadratic antiderivative at Tm
        expected = spec.rho * (spec.c2_a * spec.Tm + 0.5 * spec.c2_b * spec.Tm**2)
        assert kirchhoff_forward(spec, "solid", spec.Tm) == pytest.approx(
            expected, rel=1e-14)

    def test_quadrature_matches_cubic_antiderivative(self, spec):
        # generic c(T) = c0 + c1*T + c2*T^2 against its exact antiderivative
        c0, c1, c2 = 812.0, 0.31, 4.2e-5
        rho = spec.rho
        for T in (50.0, 700.0, 2900.0):
            exact = rho * (c0 * T + 0.5 * c1 * T**2 + c2 * T**3 / 3.0)
            quad = enthalpy_from_heat_capacity(
                lambda x: c0 + c1 * x + c2 * x * x, rho, T)
            assert quad == pytest.approx(exact, rel=1e-12)

    def test_strictly_increasing(self, spec):
        T = np.linspace(0.0, 1.2 * spec.Tv, 2001)
        for phase in ("liquid", "solid"):
            u = kirchhoff_forward(spec, phase, T)
            assert np.all(np.diff(u) > 0.0)

    def test_negative_temperature_rejected(self, spec):
        with pytest.raises(EnthalpyDomainError):
            kirchhoff_forward(spec, "liquid", -1.0)

    def test_nonpositive_heat_capacity_rejected(self, spec):
        with pytest.raises(ConstitutiveLawError):
            enthalpy_from_heat_capacity(lambda T: 100.0 - T, spec.rho, 500.0)


class TestKirchhoffInverse:
    def test_liquid_round_trip_at_melting(self, spec):
        u = spec.rho * spec.c1 * spec.Tm
        assert kirchhoff_inverse(spec, "liquid", u) == pytest.approx(
            spec.Tm, rel=1e-14)

    def test_solid_round_trip_at_melting(self, spec):
        u = spec.rho * (spec.c2_a * spec.Tm + 0.5 * spec.c2_b * spec.Tm**2)
        assert kirchhoff_inverse(spec, "solid", u) == pytest.approx(
            spec.Tm, rel=1e-14)

    @pytest.mark.parametrize("phase", ["liquid", "solid"])
    def test_round_trip_over_range(self, spec, phase):
        rng = np.random.default_rng(20240811)
        u_hi = kirchhoff_forward(spec, phase, 1.2 * spec.Tv)
        u = rng.uniform(0.0, u_hi, size=1000)
        back = kirchhoff_forward(spec, phase, kirchhoff_inverse(spec, phase, u))
        assert np.all(np.abs(back - u) <= 1e-10 * np.maximum(u, 1.0))

    @given(T=st.floats(min_value=1.0, max_value=4000.0))
    @settings(max_examples=200, deadline=None)
    def test_inverse_of_forward_is_identity(self, T):
        spec = aluminium_spec()
        for phase in ("liquid", "solid"):
            u = kirchhoff_forward(spec, phase, T)
            assert kirchhoff_inverse(spec, phase, u) == pytest.approx(T, rel=1e-10)

    def test_out_of_image_rejected(self, spec):
        with pytest.raises(EnthalpyDomainError):
            kirchhoff_inverse(spec, "liquid", -5.0)


class TestTransformedBvp:
    def test_melting_threshold_value(self, bvp):
        # product of the density, liquid heat capacity and melting temperature
        assert bvp.u_m == pytest.approx(2545.0 * 1086.0 * 933.0, rel=0, abs=0)

    def test_latent_heats(self, spec, bvp):
        assert bvp.H1 == spec.rho * spec.Lv
        assert bvp.H2 == spec.rho * spec.Lm

    def test_solid_diffusivity_chain_rule_identity(self, spec, bvp):
        # d2 evaluated at the far-field heat content equals lambda2/(rho*c2(Tinf))
        expected = spec.lambda2 / (spec.rho * spec.c2(spec.Tinf))
        assert bvp.d2(bvp.v_inf) == pytest.approx(expected, rel=1e-15)
        expected_m = spec.lambda2 / (spec.rho * spec.c2(spec.Tm))
        assert bvp.d2(bvp.v_m) == pytest.approx(expected_m, rel=1e-15)

    def test_recession_speed_at_evaporation_temperature(self, spec, bvp):
        # exponential factors cancel at T = Tv, leaving Pa*sqrt(A)/(rho*sqrt(2*pi*R*Tv))
        u_v = kirchhoff_forward(spec, "liquid", spec.Tv)
        expected = spec.Pa * math.sqrt(spec.A) / (
            spec.rho * math.sqrt(2.0 * math.pi * spec.R * spec.Tv))
        assert bvp.h_of_u(u_v) == pytest.approx(expected, rel=1e-14)
        # direct evaluation with the standard constants lands near 1.7e-2 m/s
        assert bvp.h_of_u(u_v) == pytest.approx(1.7e-2, rel=0.02)

    def test_flux_positive_on_working_range(self, bvp):
        u = np.linspace(bvp.u_m, bvp.u_cap, 10_000)
        assert np.all(bvp.q_of_u(u) > 0.0)

    def test_recession_speed_strictly_increasing(self, bvp):
        u = np.linspace(bvp.u_m, bvp.u_cap, 10_000)
        assert np.all(np.diff(bvp.h_of_u(u)) > 0.0)

    def test_time_laws(self, bvp):
        steady = bvp
        assert steady.q_at(7.0, bvp.u_m) == pytest.approx(bvp.q_of_u(bvp.u_m))
        decaying = bvp.with_time_law("inverse_sqrt")
        assert decaying.q_at(4.0, bvp.u_m) == pytest.approx(
            bvp.q_of_u(bvp.u_m) / 2.0)
        assert decaying.h_at(9.0, bvp.u_m) == pytest.approx(
            bvp.h_of_u(bvp.u_m) / 3.0)

    def test_equal_thresholds_rejected(self, bvp):
        from dataclasses import replace
        broken = replace(bvp, v_inf=bvp.v_m)
        with pytest.raises(BvpConstructionError):
            broken.validate()

    def test_non_monotone_recession_rejected(self, bvp):
        from dataclasses import replace
        broken = replace(bvp, h_of_u=lambda u: np.cos(
            np.asarray(u, dtype=float) / bvp.u_m))
        with pytest.raises(BvpConstructionError, match="h_of_u"):
            broken.validate()


class TestMaterialFiles:
    def test_packaged_aluminium_loads(self):
        spec = load_material(material_path("aluminium"))
        assert spec.rho == 2545.0
        assert spec.c2_b == 0.473

    def test_override(self):
        spec = aluminium_spec(q0=5e10)
        assert spec.q0 == 5e10

    def test_missing_file(self, tmp_path):
        with pytest.raises(MaterialConfigError, match="not found"):
            load_material(tmp_path / "nope.txt")

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("bogus = 1.0\n")
        with pytest.raises(MaterialConfigError, match="unknown key"):
            load_material(p)

    def test_missing_keys_reported(self, tmp_path):
        p = tmp_path / "partial.txt"
        p.write_text("rho = 2545.0\n")
        with pytest.raises(MaterialConfigError, match="missing keys"):
            load_material(p)

    def test_temperature_ordering_enforced(self, tmp_path):
        src = material_path("aluminium").read_text()
        p = tmp_path / "hot.txt"
        p.write_text(src.replace("Tinf = 300.0", "Tinf = 1000.0"))
        with pytest.raises(MaterialConfigError, match="Tinf < Tm < Tv"):
            load_material(p)
