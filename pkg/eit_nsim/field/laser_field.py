"""
The two lasers as sets of phase-coherent monochromatic components (carrier plus optional +-f sidebands),
their polarization and the intensity -> Rabi frequency conversion.

Laser 1 addresses ground F=2 and its detuning is counted from the F=2 -> F'=2 line centre;
laser 2 addresses ground F=1 and is counted from F=1 -> F'=1. Beams propagate along lab z.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

import config
from eit_nsim.atom.level_scheme import LevelScheme, Manifold, hyperfine_energy, transition_strength
from eit_nsim.errors import ConfigError, InputValidationError

NORM_TOL = 1e-9
LAB_Z = np.array([0.0, 0.0, 1.0])


class Laser(str, Enum):
    LASER1 = "Laser1"
    LASER2 = "Laser2"


TARGET_GROUND_F = {Laser.LASER1: 2, Laser.LASER2: 1}
REFERENCE_EXCITED_F = {Laser.LASER1: 2, Laser.LASER2: 1}


@dataclass(frozen=True)
class FieldComponent:
    parent: Laser
    offset: float              # MHz from the parent carrier
    amplitude_rel: float       # field amplitude relative to the carrier
    coherence_class: str


@dataclass(frozen=True, eq=False)
class LaserField:
    parent: Laser
    carrier_detuning: float    # MHz from the reference transition
    intensity: float           # mW/cm^2
    polarization: np.ndarray   # unit complex 3-vector, lab frame
    linewidth: float           # MHz
    components: Tuple[FieldComponent, ...]

    @property
    def target_ground_F(self) -> int:
        return TARGET_GROUND_F[self.parent]

    @property
    def reference_transition(self) -> str:
        return f"F={TARGET_GROUND_F[self.parent]}->F'={REFERENCE_EXCITED_F[self.parent]}"

    @property
    def coherence_class(self) -> str:
        return self.components[0].coherence_class

    @property
    def carrier(self) -> FieldComponent:
        return self.components[0]

    @property
    def sidebands(self) -> Tuple[FieldComponent, ...]:
        return self.components[1:]

    @property
    def modulation_frequency(self) -> Optional[float]:
        """Sideband spacing f, or None for an unmodulated laser"""
        return abs(self.components[1].offset) if len(self.components) > 1 else None

    @property
    def is_modulated(self) -> bool:
        return any(c.amplitude_rel != 0.0 for c in self.sidebands)


def _as_polarization(polarization: Sequence[complex]) -> np.ndarray:
    vec = np.asarray(polarization, dtype=complex).reshape(-1)
    if vec.shape != (3,):
        raise InputValidationError(f"polarization must be a 3-vector, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > NORM_TOL:
        raise InputValidationError(f"polarization must have unit norm, got |e|={norm:.12g}")
    vec.setflags(write=False)
    return vec


def fields_by_parent(fields: Sequence[LaserField]) -> Dict[Laser, LaserField]:
    """Both lasers, keyed by parent; each must appear exactly once"""
    out: Dict[Laser, LaserField] = {}
    for fld in fields:
        if fld.parent in out:
            raise ConfigError(f"{fld.parent.value} given twice", key="fields")
        out[fld.parent] = fld
    missing = [p.value for p in Laser if p not in out]
    if missing:
        raise ConfigError(f"missing laser(s): {', '.join(missing)}", key="fields")
    return out


def make_field(parent: Union[Laser, str],
               carrier_detuning: float,
               intensity: float,
               polarization: Sequence[complex],
               linewidth: float = config.LASER_LINEWIDTH_MHZ,
               coherence_class: Optional[str] = None) -> LaserField:
    """Single-carrier laser; every component it later gains shares its coherence class"""
    parent = Laser(parent)
    if intensity < 0:
        raise InputValidationError(f"{parent.value} intensity must be >= 0, got {intensity}")
    if linewidth < 0:
        raise InputValidationError(f"{parent.value} linewidth must be >= 0, got {linewidth}")
    klass = coherence_class or parent.value
    return LaserField(
        parent=parent,
        carrier_detuning=float(carrier_detuning),
        intensity=float(intensity),
        polarization=_as_polarization(polarization),
        linewidth=float(linewidth),
        components=(FieldComponent(parent, 0.0, 1.0, klass),),
    )


def apply_modulation(field: LaserField, f: float, intensity_ratio: float) -> LaserField:
    """Add first-order sidebands at +-f. intensity_ratio is sideband/carrier intensity,
    so the stored amplitude is its square root."""
    if len(field.components) > 1:
        raise InputValidationError(f"{field.parent.value} is already modulated")
    if not f > 0:
        raise InputValidationError(f"modulation frequency must be > 0, got {f}")
    if not 0.0 <= intensity_ratio <= 1.0:
        raise InputValidationError(f"sideband intensity ratio must lie in [0, 1], got {intensity_ratio}")
    amp = float(np.sqrt(intensity_ratio))
    klass = field.coherence_class
    sidebands = (FieldComponent(field.parent, float(f), amp, klass),
                 FieldComponent(field.parent, -float(f), amp, klass))
    return replace(field, components=field.components + sidebands)


def rabi_from_intensity(intensity: float,
                        i_sat: float = config.I_SAT_MW_CM2,
                        gamma: float = config.GAMMA_MHZ) -> float:
    """Peak Rabi frequency (MHz): Omega = gamma * sqrt(I / (2 I_sat))"""
    if not i_sat > 0:
        raise ConfigError(f"saturation intensity must be > 0, got {i_sat}", key="field.i_sat")
    if intensity < 0:
        raise InputValidationError(f"intensity must be >= 0, got {intensity}")
    return gamma * float(np.sqrt(intensity / (2.0 * i_sat)))


def component_rabi(field: LaserField, component: FieldComponent,
                   i_sat: float = config.I_SAT_MW_CM2, gamma: float = config.GAMMA_MHZ) -> float:
    return rabi_from_intensity(field.intensity, i_sat, gamma) * component.amplitude_rel


def quantization_axis(B: Sequence[float]) -> np.ndarray:
    """Unit vector along B, or lab z when the field vanishes"""
    b = np.asarray(B, dtype=float)
    norm = np.linalg.norm(b)
    return LAB_Z.copy() if norm == 0.0 else b / norm


def spherical_basis(quantization: Sequence[float]) -> Dict[int, np.ndarray]:
    axis = np.asarray(quantization, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0.0 or not np.isfinite(norm):
        raise InputValidationError("quantization axis has zero length")
    z = axis / norm
    helper = np.array([1.0, 0.0, 0.0]) if abs(z[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    x = helper - helper.dot(z) * z
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return {
        1: -(x + 1j * y) / np.sqrt(2.0),
        0: z.astype(complex),
        -1: (x - 1j * y) / np.sqrt(2.0),
    }


def polarization_components(polarization: Sequence[complex],
                            quantization: Sequence[float]) -> Dict[int, complex]:
    """c_q with polarization = sum_q c_q e_q about the quantization axis; sum |c_q|^2 = 1"""
    eps = _as_polarization(polarization)
    basis = spherical_basis(quantization)
    return {q: complex(np.vdot(basis[q], eps)) for q in (-1, 0, 1)}


def linear_polarization(angle_deg: float) -> np.ndarray:
    """Linear polarization in the lab xy plane; 0 deg = x, 90 deg = y"""
    a = np.deg2rad(angle_deg)
    return np.array([np.cos(a), np.sin(a), 0.0], dtype=complex)


POLARIZATION_X = linear_polarization(0.0)
POLARIZATION_Y = linear_polarization(90.0)


def group_center(scheme: LevelScheme, parent: Union[Laser, str]) -> float:
    """Line-strength weighted centre of the Doppler group a laser addresses, in that laser's
    detuning coordinate (MHz)."""
    parent = Laser(parent)
    F = TARGET_GROUND_F[parent]
    ref = hyperfine_energy(scheme, Manifold.EXCITED, REFERENCE_EXCITED_F[parent])
    weights, positions = [], []
    for Fe in scheme.levels(Manifold.EXCITED):
        w = transition_strength(scheme, F, Fe)
        if w > 0:
            weights.append(w)
            positions.append(hyperfine_energy(scheme, Manifold.EXCITED, Fe) - ref)
    return float(np.average(positions, weights=weights))
