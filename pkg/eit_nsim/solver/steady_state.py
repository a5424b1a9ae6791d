"""
Time-independent steady states and direct propagation of the master equation.
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp

import config
from eit_nsim.errors import DegenerateSteadyStateError, InputValidationError, SolverError, StiffnessError
from eit_nsim.liouvillian.generator import Superoperator
from eit_nsim.solver.density import DensityMatrix, symmetrize, validate_stack


def _trace_row(n: int) -> np.ndarray:
    row = np.zeros(n * n, dtype=complex)
    row[:: n + 1] = 1.0
    return row


def steady_state(L: Superoperator, velocity: Optional[float] = None,
                 scan_point: Optional[int] = None) -> DensityMatrix:
    """Null vector of L with unit trace; the first equation is traded for the trace condition"""
    if L.is_time_dependent:
        raise InputValidationError("generator is time-periodic; use period_map_steady_state")
    n = L.n
    A = L.static.copy()
    A[0, :] = _trace_row(n)
    b = np.zeros(n * n, dtype=complex)
    b[0] = 1.0
    try:
        x = linalg.solve(A, b)
    except (linalg.LinAlgError, ValueError) as e:
        raise DegenerateSteadyStateError(
            f"steady state not unique at velocity={velocity}, scan point={scan_point}: {e}") from e
    return _finish(L.static, x, n, velocity, scan_point)


def _finish(L: np.ndarray, x: np.ndarray, n: int, velocity, scan_point) -> DensityMatrix:
    if not np.all(np.isfinite(x)):
        raise DegenerateSteadyStateError(
            f"steady state not finite at velocity={velocity}, scan point={scan_point}")
    residual = float(np.linalg.norm(L @ x))
    scale = float(np.linalg.norm(L))
    if residual > config.STEADY_STATE_RESIDUAL * max(scale, 1.0):
        raise DegenerateSteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {config.STEADY_STATE_RESIDUAL:g}*|L| "
            f"at velocity={velocity}, scan point={scan_point}; the null space is degenerate")
    rho, sym_err = symmetrize(x.reshape(n, n))
    return DensityMatrix(rho, velocity, scan_point, residual, sym_err).validate()


def solve_stack(stack: np.ndarray, velocities: Optional[Sequence[float]] = None,
                scan_point: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Steady states of a stack of generators (k, n^2, n^2) in one LAPACK call.
    Returns validated matrices (k, n, n) and the residuals |L rho|."""
    stack = np.asarray(stack)
    k, N, _ = stack.shape
    n = int(round(np.sqrt(N)))
    velocities = list(velocities) if velocities is not None else [None] * k
    A = stack.copy()
    A[:, 0, :] = _trace_row(n)
    b = np.zeros((k, N, 1), dtype=complex)
    b[:, 0, 0] = 1.0
    try:
        x = np.linalg.solve(A, b)[..., 0]
    except np.linalg.LinAlgError:
        for i in range(k):
            try:
                np.linalg.solve(A[i], b[i])
            except np.linalg.LinAlgError as e:
                raise DegenerateSteadyStateError(
                    f"steady state not unique at velocity={velocities[i]}, scan point={scan_point}: {e}") from e
        raise
    residual = np.linalg.norm(np.einsum("kij,kj->ki", stack, x), axis=1)
    limit = config.STEADY_STATE_RESIDUAL * np.maximum(np.linalg.norm(stack, axis=(1, 2)), 1.0)
    bad = ~np.isfinite(residual) | (residual > limit)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        _finish(stack[i], x[i], n, velocities[i], scan_point)
    rhos = x.reshape(k, n, n)
    rhos = 0.5 * (rhos + np.conj(np.swapaxes(rhos, 1, 2)))
    validate_stack(rhos, velocities, scan_point)
    return rhos, residual


def steady_state_batch(stack: np.ndarray, velocities: Optional[Sequence[float]] = None,
                       scan_point: Optional[int] = None) -> list:
    """steady_state for a stack of generators; one DensityMatrix per member"""
    velocities = list(velocities) if velocities is not None else [None] * len(stack)
    rhos, residual = solve_stack(stack, velocities, scan_point)
    return [DensityMatrix(rhos[i], velocities[i], scan_point, float(residual[i])) for i in range(len(rhos))]


def _rhs(L: Superoperator):
    if not L.is_time_dependent:
        M = L.static
        return lambda t, y: M @ y
    return lambda t, y: L.at(t) @ y


def integrate(L: Superoperator, y0: np.ndarray, t_final: float, t_eval=None,
              rtol: float = config.PROPAGATION_RTOL, atol: float = 1e-12, method: str = "DOP853"):
    """solve_ivp on vec(rho), or on a flattened stack of columns; returns the OdeResult.
    Implicit methods get the constant Jacobian of a static generator."""
    N = L.dimension
    y0 = np.asarray(y0, dtype=complex)
    columns = y0.size // N
    fun = _rhs(L)
    if columns > 1:
        base = fun
        fun = lambda t, y: base(t, y.reshape(N, columns)).reshape(-1)
    options = {}
    if method in ("Radau", "BDF") and columns == 1 and not L.is_time_dependent:
        options["jac"] = L.static
    sol = solve_ivp(fun, (0.0, t_final), y0.reshape(-1), method=method,
                    t_eval=t_eval, rtol=rtol, atol=atol, **options)
    if sol.status < 0:
        t_reached = float(sol.t[-1]) if sol.t.size else 0.0
        raise StiffnessError(f"integration failed at t={t_reached:g} us: {sol.message}", t_reached)
    return sol


def _as_matrix(rho0: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
    m = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    try:
        DensityMatrix(m).validate()
    except SolverError as e:
        raise InputValidationError(f"initial state is not a density matrix: {e}") from e
    return m


def propagate(L: Superoperator, rho0: Union[DensityMatrix, np.ndarray], t_final: float,
              rtol: float = config.PROPAGATION_RTOL) -> DensityMatrix:
    """rho(t_final) for drho/dt = L(t) rho, t in us.

    Adaptive steps throughout: Radau for a constant generator, DOP853 for a periodic one.
    A step-size underflow raises StiffnessError carrying the time reached."""
    m0 = _as_matrix(rho0)
    if t_final < 0:
        raise InputValidationError(f"t_final must be >= 0, got {t_final}")
    if t_final == 0:
        return DensityMatrix(m0.copy())
    n = m0.shape[0]
    method = config.PERIODIC_PROPAGATION_METHOD if L.is_time_dependent else config.STATIC_PROPAGATION_METHOD
    y = integrate(L, m0.reshape(-1), t_final, rtol=rtol, method=method).y[:, -1]
    drift = abs(y[:: n + 1].sum() - np.trace(m0))
    if drift > config.PROPAGATION_TRACE_DRIFT:
        raise SolverError(f"trace drifted by {drift:.3e} over t={t_final:g} us")
    rho, sym_err = symmetrize(y.reshape(n, n))
    return DensityMatrix(rho, symmetrization_error=sym_err).validate()


def trajectory(L: Superoperator, rho0: np.ndarray, times: np.ndarray,
               rtol: float = config.PROPAGATION_RTOL) -> np.ndarray:
    """rho at each requested time, shape (len(times), n, n); times[0] must be 0"""
    n = rho0.shape[0]
    times = np.asarray(times, dtype=float)
    sol = integrate(L, rho0.reshape(-1), float(times[-1]), t_eval=times, rtol=rtol)
    return sol.y.T.reshape(len(times), n, n)
