import numpy as np
import pytest

from eit_nsim.errors import ConfigError
from eit_nsim.spectrum.doppler import DopplerConfig, doppler_fwhm, velocity_grid


@pytest.mark.parametrize("rule", ["gauss-hermite", "uniform"])
def test_weights_are_normalized(rule):
    nodes, weights = velocity_grid(DopplerConfig(n_velocity=40, rule=rule))
    assert nodes.shape == weights.shape == (40,)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all(weights > 0)
    np.testing.assert_allclose(nodes, -nodes[::-1], atol=1e-9)


@pytest.mark.parametrize("rule", ["gauss-hermite", "uniform"])
def test_second_moment_is_thermal(rule):
    d = DopplerConfig(n_velocity=64, rule=rule)
    nodes, weights = velocity_grid(d)
    assert np.sqrt(weights @ nodes ** 2) == pytest.approx(d.sigma_velocity, rel=1e-3)


def test_room_temperature_width():
    # about 0.5 GHz for Rb-87 on the D2 line
    width = doppler_fwhm(DopplerConfig(temperature_c=26.85))
    assert width == pytest.approx(511.2, rel=0.01)
    assert abs(width - 520.0) / 520.0 < 0.1


def test_width_scales_with_root_temperature():
    cold = doppler_fwhm(DopplerConfig(temperature_c=-173.15))     # 100 K
    hot = doppler_fwhm(DopplerConfig(temperature_c=126.85))       # 400 K
    assert hot / cold == pytest.approx(2.0, rel=1e-9)


@pytest.mark.parametrize("changes, key", [
    ({"temperature_c": -300.0}, "doppler.temperature_c"),
    ({"n_velocity": 4}, "doppler.n_velocity"),
    ({"rule": "simpson"}, "doppler.rule"),
    ({"rule": "uniform", "span_sigma": 0.0}, "doppler.span_sigma"),
])
def test_config_validation(changes, key):
    with pytest.raises(ConfigError) as err:
        DopplerConfig(**changes).validate()
    assert err.value.key == key
