import numpy as np
import pytest
from hypothesis import given, strategies as st

from eit_nsim.units import TWO_PI, celsius_to_kelvin, doppler_shift, to_angular


def test_to_angular_scalar_and_array():
    assert to_angular(1.0) == pytest.approx(2 * np.pi)
    np.testing.assert_allclose(to_angular([0.0, 0.5, -2.0]), TWO_PI * np.array([0.0, 0.5, -2.0]))
    assert isinstance(to_angular(3), float)


@given(v=st.floats(-2000.0, 2000.0, allow_nan=False))
def test_doppler_shift_is_linear_in_velocity(v):
    assert doppler_shift(v) == pytest.approx(v * 1e3 / 780.241, rel=1e-12, abs=1e-12)
    assert doppler_shift(-v) == pytest.approx(-doppler_shift(v), abs=1e-12)


def test_doppler_shift_one_wavelength_per_microsecond():
    # v = lambda / 1 us is exactly 1 MHz
    assert doppler_shift(0.780241, wavelength_nm=780.241) == pytest.approx(1.0)


def test_celsius_to_kelvin():
    assert celsius_to_kelvin(27.0) == pytest.approx(300.15)
