"""
Lindblad generator assembly.

Density matrices are vectorized row-major (rho.reshape(-1)), so vec(A rho B) = (A kron B^T) vec(rho).
Hamiltonians and rates are assembled in MHz and converted to rad/us once, when the superoperator is built.
"""
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

import config
from eit_nsim.atom.level_scheme import (
    LevelScheme, Manifold, SchemeMode, decay_channels, dipole_couplings, zeeman_diagonal,
)
from eit_nsim.errors import ConfigError, InputValidationError, UnsupportedModeError
from eit_nsim.field.laser_field import (
    FieldComponent, Laser, LaserField, component_rabi, fields_by_parent, polarization_components,
    quantization_axis,
)
from eit_nsim.liouvillian.frames import FrameAssignment, FrameMode, assign_frames, level_diagonal, rotation_tags
from eit_nsim.units import doppler_shift, to_angular


@dataclass
class RelaxationConfig:
    gamma_t: float = config.GAMMA_TRANSIT_MHZ
    gamma_L: float = config.GAMMA_LASER_MHZ
    optical_dephasing: bool = False     # laser noise also damps the optical coherences of laser 2

    def validate(self) -> "RelaxationConfig":
        if not self.gamma_t > 0:
            raise ConfigError(f"transit rate must be > 0 for a unique steady state, got {self.gamma_t}",
                              key="relaxation.gamma_t")
        if self.gamma_L < 0:
            raise ConfigError(f"laser dephasing must be >= 0, got {self.gamma_L}", key="relaxation.gamma_L")
        return self


@dataclass(frozen=True)
class ComponentCoupling:
    component: FieldComponent
    operator: np.ndarray        # MHz, entries at [excited, ground]
    harmonic: int               # harmonic index of the |e><g| term
    rabi: float                 # MHz


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    static: np.ndarray                          # MHz
    harmonics: Mapping[int, np.ndarray]         # n -> H_n with H(t) = sum H_n exp(i n 2 pi f t)
    frequency: Optional[float]                  # f in MHz, None when time-independent
    couplings: Tuple[ComponentCoupling, ...]
    frame: FrameAssignment
    velocity: Optional[float]

    @property
    def n(self) -> int:
        return self.static.shape[0]


@dataclass(frozen=True, eq=False)
class Superoperator:
    static: np.ndarray                                  # rad/us, n^2 x n^2
    harmonics: Mapping[int, np.ndarray] = field(default_factory=dict)
    frequency: Optional[float] = None                   # MHz

    @property
    def dimension(self) -> int:
        return self.static.shape[0]

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.dimension)))

    @property
    def is_time_dependent(self) -> bool:
        return bool(self.harmonics) and self.frequency is not None

    def at(self, t: float) -> np.ndarray:
        """Generator at time t (us)"""
        if not self.is_time_dependent:
            return self.static
        w = to_angular(self.frequency)
        out = self.static.copy()
        for n, mat in self.harmonics.items():
            out += mat * np.exp(1j * n * w * t)
        return out

    def apply(self, rho: np.ndarray, t: float = 0.0) -> np.ndarray:
        n = rho.shape[0]
        return (self.at(t) @ rho.reshape(-1)).reshape(n, n)

    def with_doppler(self, kv: float, excited_mask: np.ndarray) -> "Superoperator":
        """Same generator seen by atoms shifted by kv (MHz) relative to the one it was built for"""
        shift = doppler_superdiagonal(excited_mask) * (-1j * to_angular(kv))
        static = self.static.copy()
        static[np.diag_indices_from(static)] += shift
        return Superoperator(static, self.harmonics, self.frequency)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1)


def commutator_superop(H: np.ndarray) -> np.ndarray:
    """-i[H, .]"""
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def lindblad_superop(C: np.ndarray) -> np.ndarray:
    """C . C^dag - 1/2 {C^dag C, .}"""
    eye = np.eye(C.shape[0])
    cdc = C.conj().T @ C
    return np.kron(C, C.conj()) - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))


def doppler_superdiagonal(excited_mask: np.ndarray) -> np.ndarray:
    """Diagonal of P_e kron I - I kron P_e"""
    p = np.asarray(excited_mask, dtype=float)
    return (p[:, None] - p[None, :]).reshape(-1)


def excited_mask(scheme: LevelScheme) -> np.ndarray:
    return np.array([s.manifold is Manifold.EXCITED for s in scheme.states], dtype=float)


def assemble_hamiltonian(scheme: LevelScheme,
                         fields: Sequence[LaserField],
                         B: Sequence[float],
                         frame: FrameAssignment,
                         velocity: Optional[float] = None,
                         i_sat: float = config.I_SAT_MW_CM2,
                         wavelength_nm: float = config.WAVELENGTH_NM) -> Hamiltonian:
    """Rotating-frame Hamiltonian (MHz). velocity defaults to the one the frame was built for."""
    lasers = fields_by_parent(fields)
    B = np.asarray(B, dtype=float)
    if B.shape != (3,):
        raise InputValidationError(f"magnetic field must be a 3-vector, got shape {B.shape}")
    b_mag = float(np.linalg.norm(B))
    if scheme.mode is SchemeMode.SCALAR_N4 and b_mag > 0.0:
        raise UnsupportedModeError("a magnetic field needs the FullZeeman24 scheme")

    v = frame.velocity if velocity is None else float(velocity)
    kv = doppler_shift(v, wavelength_nm)
    diag = level_diagonal(scheme, fields, frame, kv) + zeeman_diagonal(scheme, b_mag)

    lookup = {(c.ground, c.excited): c for c in dipole_couplings(scheme)}
    axis = quantization_axis(B)
    n = scheme.n
    static = np.diag(diag).astype(complex)
    harmonics: Dict[int, np.ndarray] = {}
    couplings: List[ComponentCoupling] = []

    for comp, pairs in frame.assignments.items():
        laser = lasers[comp.parent]
        rabi = component_rabi(laser, comp, i_sat, scheme.gamma)
        if scheme.mode is SchemeMode.SCALAR_N4:
            pol = {0: 1.0}
        else:
            pol = polarization_components(laser.polarization, axis)
        op = np.zeros((n, n), dtype=complex)
        for g, e in sorted(pairs):
            dc = lookup[(g, e)]
            op[e, g] = 0.5 * rabi * dc.amplitude * pol.get(dc.q, 0.0)
        s = frame.harmonic.get(comp, 0)
        couplings.append(ComponentCoupling(comp, op, -s, rabi))
        if s == 0:
            static += op + op.conj().T
        else:
            harmonics[-s] = harmonics.get(-s, np.zeros((n, n), dtype=complex)) + op
            harmonics[s] = harmonics.get(s, np.zeros((n, n), dtype=complex)) + op.conj().T

    couplings.sort(key=lambda c: (c.component.parent.value, c.component.offset))
    return Hamiltonian(
        static=static,
        harmonics=MappingProxyType(harmonics),
        frequency=frame.residual_frequency if harmonics else None,
        couplings=tuple(couplings),
        frame=frame,
        velocity=v,
    )


def _rotation_mask(order: np.ndarray, offset: np.ndarray) -> np.ndarray:
    """Superoperator entries (ij, kl) that do not oscillate in the rotating frame"""
    d_order = (order[:, None] - order[None, :]).reshape(-1)
    d_off = (offset[:, None] - offset[None, :]).reshape(-1)
    return (d_order[:, None] == d_order[None, :]) & \
        (np.abs(d_off[:, None] - d_off[None, :]) < config.FRAME_MATCH_MHZ)


def unpolarized_ground(scheme: LevelScheme) -> np.ndarray:
    idx = scheme.indices(Manifold.GROUND)
    rho = np.zeros((scheme.n, scheme.n), dtype=complex)
    rho[idx, idx] = 1.0 / len(idx)
    return rho


def assemble_dissipator(scheme: LevelScheme,
                        relax: RelaxationConfig,
                        fields: Sequence[LaserField],
                        frame: Optional[FrameAssignment] = None) -> Superoperator:
    """Radiative decay + transit relaxation + mutual laser dephasing, in rad/us"""
    relax.validate()
    lasers = fields_by_parent(fields)
    if frame is None:
        frame = assign_frames(scheme, fields, 0.0, FrameMode.SECULAR)
    n = scheme.n
    eye = np.eye(n)

    radiative = np.zeros((n * n, n * n), dtype=complex)
    for ch in decay_channels(scheme):
        radiative += lindblad_superop(ch.operator)
    radiative *= _rotation_mask(*rotation_tags(scheme, fields, frame))

    transit = -relax.gamma_t * np.eye(n * n) + relax.gamma_t * np.outer(vec(unpolarized_ground(scheme)), vec(eye))

    dephasing = np.zeros((n * n, n * n), dtype=complex)
    independent = lasers[Laser.LASER1].coherence_class != lasers[Laser.LASER2].coherence_class
    if independent and relax.gamma_L > 0:
        f1 = scheme.indices(Manifold.GROUND, 1)
        if relax.optical_dephasing:
            jump = np.zeros((n, n))
            jump[f1, f1] = np.sqrt(2.0 * relax.gamma_L)
            dephasing = lindblad_superop(jump)
        else:
            for i in f1:
                for j in scheme.indices(Manifold.GROUND, 2):
                    dephasing[i * n + j, i * n + j] -= relax.gamma_L
                    dephasing[j * n + i, j * n + i] -= relax.gamma_L

    return Superoperator(to_angular(1.0) * (radiative + transit + dephasing))


def liouvillian(H: Hamiltonian, D: Superoperator) -> Superoperator:
    """L(rho) = -i[H, rho] + D(rho), in rad/us"""
    n = H.n
    if D.dimension != n * n:
        raise InputValidationError(f"dissipator dimension {D.dimension} does not match Hamiltonian size {n}")
    w = to_angular(1.0)
    static = w * commutator_superop(H.static) + D.static
    harmonics = {k: w * commutator_superop(h) for k, h in H.harmonics.items()}
    return Superoperator(static, MappingProxyType(harmonics), H.frequency)
