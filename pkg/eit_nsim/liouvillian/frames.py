"""
Rotating frames for one velocity class.

Ground F=2 is the reference frame. Each excited level F' rotates with the laser-1 component chosen for
it, ground F=1 follows from laser 2 through one anchor level F*. In the secular mode only couplings that
keep the Hamiltonian time-independent survive; the Floquet mode keeps every component in the carrier
frames and moves the sidebands into harmonics of the modulation frequency.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from types import MappingProxyType
from typing import Dict, FrozenSet, List, Mapping, Sequence, Set, Tuple

import numpy as np

import config
from eit_nsim.atom.level_scheme import LevelScheme, Manifold, dipole_couplings, hyperfine_energy
from eit_nsim.errors import ConfigError
from eit_nsim.field.laser_field import (
    REFERENCE_EXCITED_F, FieldComponent, Laser, LaserField, fields_by_parent,
)
from eit_nsim.units import doppler_shift

Pair = Tuple[int, int]     # (ground index, excited index)


class FrameMode(str, Enum):
    SECULAR = "Secular"
    FLOQUET = "Floquet"


@dataclass(frozen=True, eq=False)
class FrameAssignment:
    mode: FrameMode
    assignments: Mapping[FieldComponent, FrozenSet[Pair]]
    residual_frequency: float                  # MHz, 0 unless Floquet
    harmonic: Mapping[FieldComponent, int]     # sideband order s, the |e><g| term sits at harmonic -s
    excited_offset: Mapping[int, float]        # laser-1 offset whose frame each F' follows
    anchor: int                                # F* linking ground F=1 to laser 2
    anchor_offset: float                       # laser-2 offset used at F*
    velocity: float
    doppler: float                             # k.v / 2pi in MHz
    requested_mode: FrameMode = FrameMode.SECULAR
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def pairs(self, component: FieldComponent) -> FrozenSet[Pair]:
        return self.assignments.get(component, frozenset())


@lru_cache(maxsize=16)
def _reachable(scheme: LevelScheme) -> Dict[int, List[int]]:
    """ground F -> excited F' with at least one nonzero dipole element"""
    out: Dict[int, Set[int]] = {1: set(), 2: set()}
    for c in dipole_couplings(scheme):
        out[scheme.states[c.ground].F].add(scheme.states[c.excited].F)
    return {F: sorted(v) for F, v in out.items()}


def optical_detuning(scheme: LevelScheme, laser: LaserField, offset: float, F_exc: int, kv: float) -> float:
    """Detuning (MHz) of one laser component from ground F_target -> F_exc as seen by the moving atom"""
    ref = hyperfine_energy(scheme, Manifold.EXCITED, REFERENCE_EXCITED_F[laser.parent])
    return laser.carrier_detuning + offset + ref - hyperfine_energy(scheme, Manifold.EXCITED, F_exc) - kv


def _nearest(scheme, laser, comps, F_exc, kv) -> FieldComponent:
    # lower offset wins an exact tie
    return min(comps, key=lambda c: (abs(optical_detuning(scheme, laser, c.offset, F_exc, kv)), c.offset))


@lru_cache(maxsize=16)
def _couplings_by_level(scheme: LevelScheme) -> Dict[Tuple[int, int], List[Pair]]:
    out: Dict[Tuple[int, int], List[Pair]] = {}
    for c in dipole_couplings(scheme):
        key = (scheme.states[c.ground].F, scheme.states[c.excited].F)
        out.setdefault(key, []).append((c.ground, c.excited))
    return out


def _modulation(l1: LaserField, l2: LaserField) -> float:
    freqs = [fld.modulation_frequency for fld in (l1, l2) if fld.is_modulated]
    if not freqs:
        return 0.0
    if len(freqs) == 2 and abs(freqs[0] - freqs[1]) > config.FRAME_MATCH_MHZ:
        raise ConfigError(f"both lasers modulated at different frequencies ({freqs[0]} and {freqs[1]} MHz); "
                          "the generator would not be periodic", key="modulation")
    return freqs[0]


def assign_frames(scheme: LevelScheme,
                  fields: Sequence[LaserField],
                  velocity: float,
                  mode: FrameMode = FrameMode.SECULAR,
                  wavelength_nm: float = config.WAVELENGTH_NM) -> FrameAssignment:
    mode = FrameMode(mode)
    lasers = fields_by_parent(fields)
    l1, l2 = lasers[Laser.LASER1], lasers[Laser.LASER2]
    kv = doppler_shift(velocity, wavelength_nm)
    reach = _reachable(scheme)
    by_level = _couplings_by_level(scheme)
    both = [F for F in reach[1] if F in reach[2]]
    warnings: List[str] = []

    f_mod = _modulation(l1, l2) if mode is FrameMode.FLOQUET else 0.0
    if mode is FrameMode.FLOQUET and f_mod == 0.0:
        warnings.append("Floquet mode requested but no laser carries nonzero sidebands; solved in the secular frame")

    assignments: Dict[FieldComponent, Set[Pair]] = {}
    harmonic: Dict[FieldComponent, int] = {}

    if f_mod > 0.0:
        for laser, F_gnd in ((l1, 2), (l2, 1)):
            for comp in laser.components:
                if comp.amplitude_rel == 0.0:
                    continue
                harmonic[comp] = int(round(comp.offset / f_mod))
                for F_exc in reach[F_gnd]:
                    assignments.setdefault(comp, set()).update(by_level[(F_gnd, F_exc)])
        excited_offset = {F: 0.0 for F in scheme.levels(Manifold.EXCITED)}
        anchor, anchor_offset = min(both), 0.0
        effective = FrameMode.FLOQUET
    else:
        comps1 = [c for c in l1.components if c.amplitude_rel != 0.0]
        comps2 = [c for c in l2.components if c.amplitude_rel != 0.0]
        chosen1 = {F: _nearest(scheme, l1, comps1, F, kv) for F in reach[2]}
        chosen2 = {F: _nearest(scheme, l2, comps2, F, kv) for F in reach[1]}

        anchor = min(both, key=lambda F: (abs(optical_detuning(scheme, l2, chosen2[F].offset, F, kv)), F))
        anchor_offset = chosen2[anchor].offset

        excited_offset = {F: 0.0 for F in scheme.levels(Manifold.EXCITED)}
        excited_offset.update({F: c.offset for F, c in chosen1.items()})
        for F in reach[1]:
            if F not in reach[2]:
                # F'=0 has no laser-1 partner; let laser 2 define its frame
                excited_offset[F] = excited_offset[anchor] - anchor_offset + chosen2[F].offset

        for F, comp in chosen1.items():
            assignments.setdefault(comp, set()).update(by_level[(2, F)])
            harmonic[comp] = 0
        for F, comp in chosen2.items():
            residual = (excited_offset[F] - excited_offset[anchor]) - (comp.offset - anchor_offset)
            if abs(residual) < config.FRAME_MATCH_MHZ:
                assignments.setdefault(comp, set()).update(by_level[(1, F)])
                harmonic[comp] = 0
        effective = FrameMode.SECULAR

    return FrameAssignment(
        mode=effective,
        assignments=MappingProxyType({c: frozenset(p) for c, p in assignments.items()}),
        residual_frequency=f_mod,
        harmonic=MappingProxyType(harmonic),
        excited_offset=MappingProxyType(excited_offset),
        anchor=anchor,
        anchor_offset=anchor_offset,
        velocity=float(velocity),
        doppler=kv,
        requested_mode=mode,
        warnings=tuple(warnings),
    )


def level_diagonal(scheme: LevelScheme, fields: Sequence[LaserField], frame: FrameAssignment,
                   kv: float) -> np.ndarray:
    """Rotating-frame energies (MHz) of every basis state, Zeeman shifts excluded"""
    lasers = fields_by_parent(fields)
    l1, l2 = lasers[Laser.LASER1], lasers[Laser.LASER2]
    delta1 = {F: optical_detuning(scheme, l1, off, F, kv) for F, off in frame.excited_offset.items()}
    delta2_anchor = optical_detuning(scheme, l2, frame.anchor_offset, frame.anchor, kv)
    g1 = -delta1[frame.anchor] + delta2_anchor

    diag = np.zeros(scheme.n)
    for s in scheme.states:
        if s.manifold is Manifold.EXCITED:
            diag[s.index] = -delta1[s.F]
        elif s.F == 1:
            diag[s.index] = g1
    return diag


def rotation_tags(scheme: LevelScheme, fields: Sequence[LaserField],
                  frame: FrameAssignment) -> Tuple[np.ndarray, np.ndarray]:
    """(optical order, residual offset in MHz) of each state's frame relative to ground F=2;
    two elements rho_ij and rho_kl rotate together iff both differences match"""
    lasers = fields_by_parent(fields)
    l1, l2 = lasers[Laser.LASER1], lasers[Laser.LASER2]
    e_ref1 = hyperfine_energy(scheme, Manifold.EXCITED, REFERENCE_EXCITED_F[Laser.LASER1])
    e_ref2 = hyperfine_energy(scheme, Manifold.EXCITED, REFERENCE_EXCITED_F[Laser.LASER2])
    hfs = hyperfine_energy(scheme, Manifold.GROUND, 2)
    omega_diff = (l1.carrier_detuning + e_ref1 - hfs) - (l2.carrier_detuning + e_ref2)
    g1 = omega_diff + frame.excited_offset[frame.anchor] - frame.anchor_offset

    order = np.zeros(scheme.n, dtype=int)
    offset = np.zeros(scheme.n)
    for s in scheme.states:
        if s.manifold is Manifold.EXCITED:
            order[s.index] = 1
            offset[s.index] = frame.excited_offset[s.F]
        elif s.F == 1:
            offset[s.index] = g1
    return order, offset


def frame_signatures(scheme: LevelScheme, fields: Sequence[LaserField], kv: np.ndarray,
                     mode: FrameMode = FrameMode.SECULAR) -> np.ndarray:
    """Per Doppler shift, integer codes of the choices assign_frames makes; equal rows share a generator
    up to the Doppler term. Mirrors assign_frames, vectorized over kv."""
    lasers = fields_by_parent(fields)
    l1, l2 = lasers[Laser.LASER1], lasers[Laser.LASER2]
    kv = np.asarray(kv, dtype=float)
    if FrameMode(mode) is FrameMode.FLOQUET and _modulation(l1, l2) > 0.0:
        return np.zeros((kv.size, 1), dtype=int)

    reach = _reachable(scheme)
    both = [F for F in reach[1] if F in reach[2]]
    offs1 = sorted(c.offset for c in l1.components if c.amplitude_rel != 0.0)
    offs2 = sorted(c.offset for c in l2.components if c.amplitude_rel != 0.0)

    def choose(laser, offsets, F):
        d = np.abs(np.array([[optical_detuning(scheme, laser, o, F, 0.0)] for o in offsets]) - kv[None, :])
        return np.argmin(d, axis=0)      # first minimum is the lower offset

    cols = [choose(l1, offs1, F) for F in reach[2]]
    pick2 = {F: choose(l2, offs2, F) for F in reach[1]}
    cols += list(pick2.values())
    anchor_d = np.array([np.abs(optical_detuning(scheme, l2, 0.0, F, 0.0) + np.asarray(offs2)[pick2[F]] - kv)
                         for F in both])
    cols.append(np.argmin(anchor_d, axis=0))
    return np.stack(cols, axis=1)
