import numpy as np
import pytest

from eit_nsim.errors import ConsistencyError
from eit_nsim.field.laser_field import POLARIZATION_X, POLARIZATION_Y, Laser
from eit_nsim.liouvillian.frames import FrameMode, assign_frames
from eit_nsim.liouvillian.generator import (
    RelaxationConfig, assemble_dissipator, assemble_hamiltonian, liouvillian,
)
from eit_nsim.solver.floquet import period_map_steady_state
from eit_nsim.solver.observables import absorption, rabi_weights
from eit_nsim.solver.steady_state import steady_state

RAMAN = 156.9


def _solve(scheme, flds, relax=None, velocity=0.0, mode=FrameMode.SECULAR):
    frame = assign_frames(scheme, flds, velocity, mode)
    H = assemble_hamiltonian(scheme, flds, (0.0, 0.0, 0.0), frame)
    L = liouvillian(H, assemble_dissipator(scheme, relax or RelaxationConfig(), flds, frame))
    return H, L


def test_dark_state_does_not_absorb(scalar_scheme, fields):
    flds = fields(d1=0.0, d2=RAMAN, i1=0.835, i2=0.835)
    H, L = _solve(scalar_scheme, flds, RelaxationConfig(gamma_t=1e-7, gamma_L=0.0))
    dark = absorption(steady_state(L, velocity=0.0), flds, scalar_scheme, H)
    H_ref, L_ref = _solve(scalar_scheme, flds, RelaxationConfig(gamma_t=1e-7, gamma_L=100.0))
    bright = absorption(steady_state(L_ref, velocity=0.0), flds, scalar_scheme, H_ref)
    assert bright.laser1 > 0
    assert abs(dark.laser1) / bright.laser1 < 1e-6


def test_raman_detuning_restores_absorption(scalar_scheme, fields):
    values = []
    for d2 in (RAMAN, RAMAN + 30.0):
        flds = fields(d1=0.0, d2=d2, i1=2.0, i2=3.0)
        H, L = _solve(scalar_scheme, flds)
        values.append(absorption(steady_state(L, velocity=0.0), flds, scalar_scheme, H).laser1)
    assert values[0] < 0.5 * values[1]


def test_switched_off_laser_reads_zero(scalar_scheme, fields):
    flds = fields(i2=0.0)
    H, L = _solve(scalar_scheme, flds)
    sample = absorption(steady_state(L, velocity=0.0), flds, scalar_scheme, H)
    assert sample.laser2 == 0.0
    assert sample.laser1 > 0.0
    assert not sample.time_averaged


def test_rabi_weights_count_sidebands(scalar_scheme, fields):
    plain = rabi_weights(fields(), scalar_scheme)
    modulated = rabi_weights(fields(modulation=(156.9, 0.1)), scalar_scheme)
    assert modulated[Laser.LASER1] == pytest.approx(1.2 * plain[Laser.LASER1])
    assert modulated[Laser.LASER2] == pytest.approx(plain[Laser.LASER2])


def test_periodic_absorption_is_time_averaged(scalar_scheme, fields):
    flds = fields(d1=0.0, d2=RAMAN, i1=5.0, i2=8.0, modulation=(156.9, 0.1))
    H, L = _solve(scalar_scheme, flds, RelaxationConfig(gamma_t=0.5), mode=FrameMode.FLOQUET)
    pss = period_map_steady_state(L, samples=16, velocity=0.0, rtol=1e-11)
    sample = absorption(pss, flds, scalar_scheme, H)
    assert sample.time_averaged
    assert np.isfinite(sample.laser1) and np.isfinite(sample.laser2)
    assert len(sample.components) == 4


def test_consistency_checks(scalar_scheme, full_scheme, fields):
    flds = fields()
    H, L = _solve(scalar_scheme, flds)
    rho = steady_state(L, velocity=0.0)
    H_full, _ = _solve(full_scheme, flds)
    with pytest.raises(ConsistencyError, match="does not match"):
        absorption(rho, flds, full_scheme, H_full)
    H_moving, _ = _solve(scalar_scheme, flds, velocity=50.0)
    with pytest.raises(ConsistencyError, match="velocity"):
        absorption(rho, flds, scalar_scheme, H_moving)

    mod = fields(modulation=(156.9, 0.1))
    H_flo, L_flo = _solve(scalar_scheme, mod, RelaxationConfig(gamma_t=0.5), mode=FrameMode.FLOQUET)
    pss = period_map_steady_state(L_flo, samples=8, velocity=0.0, rtol=1e-11)
    with pytest.raises(ConsistencyError, match="periodic"):
        absorption(pss, mod, scalar_scheme, H)


@pytest.mark.parametrize("phase1, phase2", [(0.7, 0.0), (0.0, -1.3), (2.1, 0.4)])
def test_absorption_ignores_a_global_laser_phase(full_scheme, fields, phase1, phase2):
    plain = fields(d1=0.0, d2=RAMAN + 1.5, i1=5.0, i2=8.0)
    shifted = fields(d1=0.0, d2=RAMAN + 1.5, i1=5.0, i2=8.0,
                     pol1=np.exp(1j * phase1) * POLARIZATION_X, pol2=np.exp(1j * phase2) * POLARIZATION_Y)
    values = []
    for flds in (plain, shifted):
        H, L = _solve(full_scheme, flds, velocity=12.0)
        values.append(absorption(steady_state(L, velocity=12.0), flds, full_scheme, H))
    assert values[1].laser1 == pytest.approx(values[0].laser1, rel=1e-10)
    assert values[1].laser2 == pytest.approx(values[0].laser2, rel=1e-10)
