"""
Unit conventions. User-facing frequencies are ordinary frequencies in MHz, generators act
in angular units (rad/us). to_angular() is the only place the 2*pi enters.
"""
import numpy as np
import config

TWO_PI = 2.0 * np.pi


def to_angular(mhz):
    """MHz -> rad/us"""
    return TWO_PI * np.asarray(mhz, dtype=float) if np.ndim(mhz) else TWO_PI * float(mhz)


def doppler_shift(velocity, wavelength_nm: float = config.WAVELENGTH_NM):
    """k.v / 2pi in MHz for a velocity projection in m/s (positive = co-moving with the beams)"""
    return np.asarray(velocity, dtype=float) * 1e3 / wavelength_nm if np.ndim(velocity) \
        else float(velocity) * 1e3 / wavelength_nm


def celsius_to_kelvin(t_c: float) -> float:
    return t_c + 273.15
