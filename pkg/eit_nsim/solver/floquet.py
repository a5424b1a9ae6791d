"""
Periodic steady state of a time-periodic generator via the one-period propagator (monodromy map).
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

import config
from eit_nsim.errors import AmbiguousFixedPointError, InputValidationError, SolverError
from eit_nsim.liouvillian.generator import Superoperator
from eit_nsim.solver.density import DensityMatrix, symmetrize, trace_norm
from eit_nsim.solver.steady_state import integrate, trajectory


@dataclass(eq=False)
class PeriodicSteadyState:
    state: DensityMatrix           # phase 0
    times: np.ndarray              # us, samples over one period (endpoint excluded)
    trajectory: np.ndarray         # (samples, n, n)
    frequency: float               # MHz
    eigenvalues: np.ndarray        # of the monodromy map, sorted by decreasing modulus
    periodicity_residual: float

    @property
    def period(self) -> float:
        return 1.0 / self.frequency


def monodromy(L: Superoperator, rtol: float = config.PROPAGATION_RTOL) -> np.ndarray:
    """Phi(T) from dPhi/dt = L(t) Phi, Phi(0) = I"""
    N = L.dimension
    period = 1.0 / L.frequency
    sol = integrate(L, np.eye(N, dtype=complex).reshape(-1), period, rtol=rtol)
    return sol.y[:, -1].reshape(N, N)


def period_map_steady_state(L: Superoperator, samples: int = config.PERIOD_SAMPLES,
                            velocity=None, scan_point=None,
                            rtol: float = config.PROPAGATION_RTOL) -> PeriodicSteadyState:
    """Fixed point of the period map; its accuracy degrades as the ODE error over the spectral gap"""
    if L.frequency is None or not L.frequency > 0:
        raise InputValidationError("period map needs a generator with a positive modulation frequency")
    if samples < 2:
        raise InputValidationError(f"need at least 2 phase samples, got {samples}")
    n = L.n
    phi = monodromy(L, rtol)
    vals, vecs = linalg.eig(phi)
    order = np.argsort(-np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    if len(vals) > 1 and abs(vals[0]) - abs(vals[1]) < config.EIGENVALUE_GAP:
        raise AmbiguousFixedPointError(
            f"monodromy eigenvalues {vals[0]:.10f} and {vals[1]:.10f} are not separated "
            f"(velocity={velocity}, scan point={scan_point})")
    fixed = int(np.argmin(np.abs(vals - 1.0)))
    v = vecs[:, fixed]
    tr = v[:: n + 1].sum()
    if abs(tr) < 1e-14:
        raise AmbiguousFixedPointError("fixed point of the period map has zero trace")
    rho0, sym_err = symmetrize((v / tr).reshape(n, n))

    period = 1.0 / L.frequency
    times = np.linspace(0.0, period, samples + 1)
    traj = trajectory(L, rho0, times, rtol)
    periodic = trace_norm(traj[-1] - rho0)
    if periodic > config.PERIODICITY_TOL:
        raise SolverError(f"periodic state does not close after one period, |rho(T) - rho(0)|_1 = {periodic:.3e} "
                          f"(velocity={velocity}, scan point={scan_point})")
    state = DensityMatrix(rho0, velocity, scan_point, residual=periodic, symmetrization_error=sym_err).validate()
    return PeriodicSteadyState(state, times[:-1], traj[:-1], float(L.frequency), vals, periodic)
