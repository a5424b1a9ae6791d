import numpy as np
import pytest

from eit_nsim.errors import InputValidationError
from eit_nsim.liouvillian.frames import FrameMode, assign_frames
from eit_nsim.liouvillian.generator import (
    RelaxationConfig, Superoperator, assemble_dissipator, assemble_hamiltonian, commutator_superop,
    lindblad_superop, liouvillian,
)
from eit_nsim.solver.density import trace_norm
from eit_nsim.solver.floquet import monodromy, period_map_steady_state
from eit_nsim.solver.steady_state import steady_state
from eit_nsim.units import to_angular

F_MOD = 10.0


def modulated_two_level(depth):
    """Two-level atom whose drive is Omega (1 + depth cos 2 pi f t)"""
    w = to_angular(1.0)
    omega, delta, gamma = 4.0, 1.0, 6.0
    H0 = np.array([[0.0, omega / 2], [omega / 2, -delta]], dtype=complex)
    V = np.array([[0.0, omega * depth / 4], [omega * depth / 4, 0.0]], dtype=complex)
    jump = np.sqrt(gamma) * np.array([[0.0, 1.0], [0.0, 0.0]])
    static = w * (commutator_superop(H0) + lindblad_superop(jump))
    return Superoperator(static, {1: w * commutator_superop(V), -1: w * commutator_superop(V)}, F_MOD)


def test_vanishing_harmonics_reproduce_static_state():
    L = modulated_two_level(0.0)
    pss = period_map_steady_state(L, rtol=1e-12)
    static = steady_state(Superoperator(L.static))
    assert trace_norm(pss.state.matrix - static.matrix) < 1e-8
    np.testing.assert_allclose(pss.trajectory, np.broadcast_to(static.matrix, pss.trajectory.shape), atol=1e-8)


def test_periodic_state_closes_and_is_valid():
    pss = period_map_steady_state(modulated_two_level(0.8), samples=16, rtol=1e-11)
    assert pss.periodicity_residual < 1e-8
    assert pss.times.shape == (16,) and pss.trajectory.shape == (16, 2, 2)
    assert pss.period == pytest.approx(0.1)
    assert abs(pss.eigenvalues[0] - 1.0) < 1e-8
    for rho in pss.trajectory:
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-9)


def test_modulation_changes_the_state():
    static = period_map_steady_state(modulated_two_level(0.0), rtol=1e-11).state.matrix
    driven = period_map_steady_state(modulated_two_level(0.8), rtol=1e-11).state.matrix
    assert trace_norm(driven - static) > 1e-4


def test_monodromy_is_contractive(scalar_scheme, fields):
    flds = fields(d1=0.0, d2=156.9, i1=10.0, i2=15.0, modulation=(156.9, 0.1))
    frame = assign_frames(scalar_scheme, flds, 0.0, FrameMode.FLOQUET)
    H = assemble_hamiltonian(scalar_scheme, flds, (0.0, 0.0, 0.0), frame)
    L = liouvillian(H, assemble_dissipator(scalar_scheme, RelaxationConfig(), flds, frame))
    mods = np.sort(np.abs(np.linalg.eigvals(monodromy(L))))[::-1]
    assert mods[0] == pytest.approx(1.0, abs=1e-8)
    assert mods[1] < 1.0 - 1e-6
    assert np.all(mods <= 1.0 + 1e-8)


def test_period_map_needs_a_frequency():
    L = modulated_two_level(0.5)
    with pytest.raises(InputValidationError, match="frequency"):
        period_map_steady_state(Superoperator(L.static))
    with pytest.raises(InputValidationError, match="phase samples"):
        period_map_steady_state(L, samples=1)
