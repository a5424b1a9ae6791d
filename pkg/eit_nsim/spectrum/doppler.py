"""
Thermal velocity distribution along the beam axis and its quadrature.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import constants

import config
from eit_nsim.errors import ConfigError
from eit_nsim.units import celsius_to_kelvin, doppler_shift

RULES = ("gauss-hermite", "uniform")


@dataclass
class DopplerConfig:
    temperature_c: float = config.TEMPERATURE_C
    atomic_mass_u: float = config.ATOMIC_MASS_U
    wavelength_nm: float = config.WAVELENGTH_NM
    n_velocity: int = config.N_VELOCITY
    rule: str = config.VELOCITY_RULE
    span_sigma: float = config.VELOCITY_SPAN_SIGMA   # uniform rule only

    @property
    def temperature_k(self) -> float:
        return celsius_to_kelvin(self.temperature_c)

    @property
    def atomic_mass(self) -> float:
        """kg"""
        return self.atomic_mass_u * constants.atomic_mass

    @property
    def sigma_velocity(self) -> float:
        """1-D Maxwell-Boltzmann standard deviation, m/s"""
        return float(np.sqrt(constants.k * self.temperature_k / self.atomic_mass))

    def validate(self) -> "DopplerConfig":
        if self.temperature_k <= 0:
            raise ConfigError(f"temperature below absolute zero: {self.temperature_c} C", key="doppler.temperature_c")
        if self.n_velocity < 16:
            raise ConfigError(f"need at least 16 velocity nodes, got {self.n_velocity}", key="doppler.n_velocity")
        if self.rule not in RULES:
            raise ConfigError(f"unknown quadrature rule {self.rule!r}, expected one of {RULES}", key="doppler.rule")
        if self.atomic_mass_u <= 0 or self.wavelength_nm <= 0:
            raise ConfigError("atomic mass and wavelength must be positive", key="doppler")
        if self.rule == "uniform" and self.span_sigma <= 0:
            raise ConfigError(f"span must be positive, got {self.span_sigma}", key="doppler.span_sigma")
        return self


def velocity_grid(doppler: DopplerConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes (m/s) and weights (summing to 1) for averaging over the axial velocity"""
    doppler.validate()
    sigma = doppler.sigma_velocity
    if doppler.rule == "gauss-hermite":
        x, w = hermgauss(doppler.n_velocity)
        nodes = np.sqrt(2.0) * sigma * x
    else:
        nodes = np.linspace(-doppler.span_sigma * sigma, doppler.span_sigma * sigma, doppler.n_velocity)
        w = np.exp(-0.5 * (nodes / sigma) ** 2)
    return nodes, w / w.sum()


def doppler_fwhm(doppler: DopplerConfig) -> float:
    """FWHM (MHz) of a single Doppler-broadened optical resonance"""
    v = np.sqrt(8.0 * np.log(2.0)) * doppler.sigma_velocity
    return doppler_shift(v, doppler.wavelength_nm)
