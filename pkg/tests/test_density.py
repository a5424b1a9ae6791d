import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eit_nsim.errors import InvalidDensityMatrixError
from eit_nsim.solver.density import AbsorptionSample, DensityMatrix, symmetrize, trace_norm, validate_stack


def _random_state(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 8))
@settings(max_examples=30)
def test_random_states_validate(seed, n):
    rho = DensityMatrix(_random_state(seed, n)).validate()
    assert rho.trace == pytest.approx(1.0)
    assert rho.n == n


def test_rejects_non_hermitian():
    m = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
    with pytest.raises(InvalidDensityMatrixError, match="Hermitian"):
        DensityMatrix(m).validate()


def test_rejects_wrong_trace():
    with pytest.raises(InvalidDensityMatrixError, match="trace"):
        DensityMatrix(np.diag([0.5, 0.6]).astype(complex)).validate()


def test_rejects_negative_eigenvalue():
    m = np.array([[0.5, 0.9], [0.9, 0.5]], dtype=complex)
    with pytest.raises(InvalidDensityMatrixError, match="negative eigenvalue"):
        DensityMatrix(m, velocity=12.0, scan_point=3).validate()


def test_error_names_velocity_and_scan_point():
    with pytest.raises(InvalidDensityMatrixError, match="velocity=12.0, scan point=3"):
        DensityMatrix(np.diag([np.nan, 1.0]).astype(complex), velocity=12.0, scan_point=3).validate()


def test_symmetrize_reports_error():
    m = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
    sym, err = symmetrize(m)
    assert err == pytest.approx(0.1)
    np.testing.assert_allclose(sym, sym.conj().T)


def test_trace_norm_of_difference():
    a = np.diag([1.0, 0.0])
    b = np.diag([0.0, 1.0])
    assert trace_norm(a - b) == pytest.approx(2.0)


def test_validate_stack_reports_offending_member():
    good = _random_state(1, 3)
    bad = good.copy()
    bad[0, 0] += 0.2
    with pytest.raises(InvalidDensityMatrixError, match="velocity=5.0"):
        validate_stack(np.stack([good, bad]), velocities=[1.0, 5.0], scan_point=0)
    validate_stack(np.stack([good, good]))


def test_absorption_sample_lookup():
    s = AbsorptionSample(0.3, 0.7)
    assert s.of("Laser1") == 0.3 and s.of("laser2") == 0.7
