import pytest

from eit_nsim.atom.level_scheme import LevelSchemeConfig, SchemeMode, build_level_scheme
from eit_nsim.field.laser_field import POLARIZATION_X, POLARIZATION_Y, Laser, apply_modulation, make_field
from eit_nsim.solver import density
from eit_nsim.spectrum.doppler import DopplerConfig
from eit_nsim.spectrum.scan import GridSpec, LaserSettings, ScanConfig


@pytest.fixture(scope="session")
def scalar_scheme():
    return build_level_scheme(LevelSchemeConfig(mode=SchemeMode.SCALAR_N4))


@pytest.fixture(scope="session")
def full_scheme():
    return build_level_scheme(LevelSchemeConfig(mode=SchemeMode.FULL_ZEEMAN_24))


@pytest.fixture
def fields():
    """Carrier-only lasers, laser 1 on F=2->F'=2, laser 2 on F=1->F'=1"""
    def make(d1=0.0, d2=0.0, i1=5.0, i2=8.0, pol1=POLARIZATION_X, pol2=POLARIZATION_Y, modulation=None):
        l1 = make_field(Laser.LASER1, d1, i1, pol1)
        if modulation is not None:
            l1 = apply_modulation(l1, *modulation)
        return l1, make_field(Laser.LASER2, d2, i2, pol2)
    return make


@pytest.fixture
def small_doppler():
    return DopplerConfig(n_velocity=32, rule="uniform")


@pytest.fixture
def small_scan():
    def make(values, i1=2.0, i2=3.0, **changes):
        grid = tuple(GridSpec(v, v, 1.0) for v in values)
        cfg = ScanConfig(
            grid=grid,
            laser1=LaserSettings(-78.45, i1, (1.0, 0.0, 0.0)),
            laser2=LaserSettings(0.0, i2, (0.0, 1.0, 0.0)),
            optical_depth_scale=1.0,
        )
        for k, v in changes.items():
            setattr(cfg, k, v)
        return cfg
    return make


@pytest.fixture
def random_density():
    return density.random_density
