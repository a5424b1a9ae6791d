import numpy as np
import pytest

from eit_nsim.atom.level_scheme import Manifold
from eit_nsim.errors import ConfigError
from eit_nsim.field.laser_field import POLARIZATION_X, Laser, apply_modulation, make_field
from eit_nsim.liouvillian.frames import (
    FrameMode, assign_frames, frame_signatures, level_diagonal, optical_detuning, rotation_tags,
)
from eit_nsim.units import doppler_shift


def _excited_F(scheme, pairs):
    return {scheme.states[e].F for _, e in pairs}


def test_carrier_only_secular(scalar_scheme, fields):
    f1, f2 = fields()
    frame = assign_frames(scalar_scheme, (f1, f2), 0.0)
    assert frame.mode is FrameMode.SECULAR
    assert frame.residual_frequency == 0.0
    assert frame.anchor == 1 and frame.anchor_offset == 0.0
    assert _excited_F(scalar_scheme, frame.pairs(f1.carrier)) == {1, 2}
    assert _excited_F(scalar_scheme, frame.pairs(f2.carrier)) == {1, 2}
    assert frame.warnings == ()


def test_secular_keeps_only_matching_laser2_couplings(scalar_scheme, fields):
    # the -f sideband takes F'=1, the carrier F'=2, so laser 2 can only stay static on F'=1
    f1, f2 = fields(modulation=(156.9, 0.1))
    frame = assign_frames(scalar_scheme, (f1, f2), 0.0)
    assert dict(frame.excited_offset) == {1: pytest.approx(-156.9), 2: 0.0}
    minus = next(c for c in f1.components if c.offset < 0)
    assert _excited_F(scalar_scheme, frame.pairs(minus)) == {1}
    assert _excited_F(scalar_scheme, frame.pairs(f1.carrier)) == {2}
    assert _excited_F(scalar_scheme, frame.pairs(f2.carrier)) == {1}


def test_floquet_puts_sidebands_on_harmonics(scalar_scheme, fields):
    f1, f2 = fields(modulation=(156.9, 0.1))
    frame = assign_frames(scalar_scheme, (f1, f2), 0.0, FrameMode.FLOQUET)
    assert frame.mode is FrameMode.FLOQUET
    assert frame.residual_frequency == pytest.approx(156.9)
    assert sorted(frame.harmonic[c] for c in f1.components) == [-1, 0, 1]
    assert frame.harmonic[f2.carrier] == 0


def test_floquet_without_sidebands_falls_back(scalar_scheme, fields):
    f1, f2 = fields(modulation=(156.9, 0.0))
    frame = assign_frames(scalar_scheme, (f1, f2), 0.0, FrameMode.FLOQUET)
    assert frame.mode is FrameMode.SECULAR
    assert frame.requested_mode is FrameMode.FLOQUET
    assert any("secular" in w for w in frame.warnings)


def test_different_modulation_frequencies_rejected(scalar_scheme):
    l1 = apply_modulation(make_field(Laser.LASER1, 0.0, 5.0, POLARIZATION_X), 150.0, 0.1)
    l2 = apply_modulation(make_field(Laser.LASER2, 0.0, 5.0, POLARIZATION_X), 160.0, 0.1)
    with pytest.raises(ConfigError, match="periodic"):
        assign_frames(scalar_scheme, (l1, l2), 0.0, FrameMode.FLOQUET)


def test_f_prime_zero_follows_laser2(full_scheme, fields):
    f1, f2 = fields()
    frame = assign_frames(full_scheme, (f1, f2), 0.0)
    assert 0 in frame.excited_offset
    assert _excited_F(full_scheme, frame.pairs(f1.carrier)) == {1, 2, 3}
    assert _excited_F(full_scheme, frame.pairs(f2.carrier)) == {0, 1, 2}


def test_level_diagonal_on_resonance(scalar_scheme, fields):
    f1, f2 = fields()
    frame = assign_frames(scalar_scheme, (f1, f2), 0.0)
    diag = level_diagonal(scalar_scheme, (f1, f2), frame, 0.0)
    e2 = scalar_scheme.index_of(Manifold.EXCITED, 2)
    e1 = scalar_scheme.index_of(Manifold.EXCITED, 1)
    assert diag[e2] == pytest.approx(0.0)
    assert diag[e1] == pytest.approx(-156.9)       # laser 1 sits 156.9 MHz above F=2->F'=1
    assert diag[scalar_scheme.index_of(Manifold.GROUND, 1)] == pytest.approx(-156.9)


def test_optical_detuning_moves_with_velocity(scalar_scheme, fields):
    f1, _ = fields(d1=5.0)
    kv = doppler_shift(100.0)
    assert optical_detuning(scalar_scheme, f1, 0.0, 2, kv) == pytest.approx(5.0 - kv)


def test_rotation_tags(scalar_scheme, fields):
    f1, f2 = fields()
    frame = assign_frames(scalar_scheme, (f1, f2), 0.0)
    order, offset = rotation_tags(scalar_scheme, (f1, f2), frame)
    assert list(order) == [0, 0, 1, 1]
    assert offset[scalar_scheme.index_of(Manifold.GROUND, 2)] == 0.0


def _frame_identity(frame):
    return (
        frame.mode,
        tuple(sorted(frame.excited_offset.items())),
        frame.anchor,
        frame.anchor_offset,
        tuple(sorted((c.parent.value, c.offset, tuple(sorted(p))) for c, p in frame.assignments.items())),
    )


def test_signatures_match_assign_frames(scalar_scheme, fields):
    f1, f2 = fields(d1=-78.45, modulation=(156.9, 0.1))
    velocities = np.linspace(-400.0, 400.0, 41)
    kv = doppler_shift(velocities)
    sig = frame_signatures(scalar_scheme, (f1, f2), kv)
    keys = [_frame_identity(assign_frames(scalar_scheme, (f1, f2), v)) for v in velocities]
    for i in range(len(velocities)):
        for j in range(len(velocities)):
            if np.array_equal(sig[i], sig[j]):
                assert keys[i] == keys[j]
