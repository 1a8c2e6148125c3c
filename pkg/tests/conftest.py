import pytest

from windline.binary import OrbitalSolution
from windline.sei import RayQuadrature, single_star_profile
from windline.wind import DoubletSpec, WindLawParams


def make_params(**overrides) -> WindLawParams:
    base = dict(w0=0.01, beta=1.0, w_gauss=0.1, w1=0.98, alpha1=0.0,
                alpha2=1.0, t_tot_blue=3.0, t_tot_red=1.5, a_phot_blue=0.25,
                a_phot_red=0.2, w_phot_blue=0.12, w_phot_red=0.12,
                v_inf=2100.0)
    base.update(overrides)
    return WindLawParams(**base)


def fast_quad(params, n_core=20, n_halo=24, z_samples=96) -> RayQuadrature:
    return RayQuadrature.default(params, n_core=n_core, n_halo=n_halo,
                                 z_samples=z_samples)


@pytest.fixture(scope="session")
def doublet():
    return DoubletSpec(1548.195, 1550.772, "CIV")


@pytest.fixture(scope="session")
def thick_params():
    # Extended optically thick O-star wind: full P Cygni morphology.
    return make_params()


@pytest.fixture(scope="session")
def thin_shell_params():
    # Line formation confined to a shell ~0.01 stellar radii thick.
    return make_params(beta=0.5, w_gauss=0.02, w1=0.10, t_tot_blue=0.5,
                       t_tot_red=0.0, a_phot_blue=0.0, a_phot_red=0.0,
                       v_inf=2000.0)


@pytest.fixture(scope="session")
def transparent_params():
    return make_params(t_tot_blue=0.0, t_tot_red=0.0, a_phot_blue=0.0,
                       a_phot_red=0.0)


@pytest.fixture(scope="session")
def circular_orbit():
    return OrbitalSolution(period_days=3.367, t0=2448000.0, eccentricity=0.0,
                           omega_deg=0.0, k1_kms=250.0, k2_kms=260.0,
                           gamma_kms=10.0, l1=0.6, l2=0.4)


@pytest.fixture(scope="session")
def equal_light_orbit():
    return OrbitalSolution(period_days=3.367, t0=2448000.0, eccentricity=0.0,
                           omega_deg=0.0, k1_kms=0.0, k2_kms=0.0,
                           gamma_kms=0.0, l1=0.5, l2=0.5)


@pytest.fixture(scope="session")
def thick_profile(thick_params, doublet):
    return single_star_profile(thick_params, doublet)


@pytest.fixture(scope="session")
def thin_shell_profile(thin_shell_params, doublet):
    return single_star_profile(thin_shell_params, doublet)
