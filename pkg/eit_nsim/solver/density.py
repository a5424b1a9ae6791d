from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

import config
from eit_nsim.errors import InvalidDensityMatrixError


@dataclass(eq=False)
class DensityMatrix:
    matrix: np.ndarray
    velocity: Optional[float] = None
    scan_point: Optional[int] = None
    residual: float = 0.0                 # |L rho| of the solve that produced it
    symmetrization_error: float = 0.0     # |rho - rho^dag| before symmetrizing

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def population(self, index: int) -> float:
        return float(self.matrix[index, index].real)

    def validate(self) -> "DensityMatrix":
        """Raise InvalidDensityMatrixError unless Hermitian, unit-trace and positive semidefinite"""
        rho = self.matrix
        where = f" (velocity={self.velocity}, scan point={self.scan_point})" if self.velocity is not None else ""
        if not np.all(np.isfinite(rho)):
            raise InvalidDensityMatrixError(f"non-finite density matrix{where}")
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > config.HERMITICITY_TOL:
            raise InvalidDensityMatrixError(f"density matrix not Hermitian, |rho - rho^dag| = {herm:.3e}{where}")
        tr = self.trace
        if abs(tr - 1.0) > config.TRACE_TOL:
            raise InvalidDensityMatrixError(f"trace = {tr.real:.12g}{tr.imag:+.3e}j{where}")
        low = float(np.linalg.eigvalsh(rho).min())
        if low < -config.POSITIVITY_TOL:
            raise InvalidDensityMatrixError(f"negative eigenvalue {low:.3e}{where}")
        return self


def symmetrize(rho: np.ndarray) -> Tuple[np.ndarray, float]:
    err = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    return 0.5 * (rho + rho.conj().T), err


def trace_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "nuc"))


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    """Full-rank density matrix A A^dag / tr from a complex Gaussian A"""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@dataclass
class AbsorptionSample:
    laser1: float
    laser2: float
    components: Dict[Tuple[str, float], float] = field(default_factory=dict)   # (laser, offset) -> rate, MHz
    time_averaged: bool = False

    def of(self, laser: str) -> float:
        return self.laser1 if laser in ("Laser1", "laser1") else self.laser2


def validate_stack(rhos: np.ndarray, velocities=None, scan_point=None) -> None:
    """DensityMatrix.validate over a stack (k, n, n) in one pass; reports the first offending member"""
    herm = np.max(np.abs(rhos - np.conj(np.swapaxes(rhos, 1, 2))), axis=(1, 2))
    trace = np.trace(rhos, axis1=1, axis2=2)
    finite = np.all(np.isfinite(rhos), axis=(1, 2))
    low = np.full(len(rhos), np.inf)
    low[finite] = np.linalg.eigvalsh(rhos[finite]).min(axis=1)
    bad = (~finite) | (herm > config.HERMITICITY_TOL) | (np.abs(trace - 1.0) > config.TRACE_TOL) \
        | (low < -config.POSITIVITY_TOL)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        v = None if velocities is None else velocities[i]
        DensityMatrix(rhos[i], v, scan_point).validate()
