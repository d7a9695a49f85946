import numpy as np
import pytest

from stefansym.material import aluminium_spec, build_transformed_bvp, TransformedBVP
from stefansym.travelling_wave import solve_travelling_wave


@pytest.fixture(scope="session")
def al_spec():
    return aluminium_spec()


@pytest.fixture(scope="session")
def al_bvp(al_spec):
    return build_transformed_bvp(al_spec)


@pytest.fixture(scope="session")
def al_wave(al_bvp):
    return solve_travelling_wave(al_bvp)


def constant_coefficient_bvp(c_flux=40.0, u_m=0.5, v_m=2.0, v_inf=1.0,
                             H1=0.0, H2=1.5, u_cap=50.0,
                             time_law="steady") -> TransformedBVP:
    """Unit-diffusivity problem with h(u) = u and a constant absorbed flux.

    The front-speed balance becomes a quadratic in the surface heat content,
    so the solved root has a closed form to test against.
    """
    def const(x, value):
        return np.full_like(np.asarray(x, dtype=float), value) \
            if np.ndim(x) else value

    return TransformedBVP(
        d1=lambda u: const(u, 1.0),
        d2=lambda v: const(v, 1.0),
        q_of_u=lambda u: const(u, c_flux),
        h_of_u=lambda u: np.asarray(u, dtype=float) if np.ndim(u) else float(u),
        time_law=time_law,
        H1=H1, H2=H2, u_m=u_m, v_m=v_m, v_inf=v_inf, u_cap=u_cap,
    )


@pytest.fixture()
def quadratic_bvp():
    return constant_coefficient_bvp()
