"""
Absorption of each laser from a steady or periodic state.

The rate a component c pumps into the excited manifold is 2 Im Tr(V_c rho), V_c holding its
couplings at [e, g]. Dividing by sum_c Omega_c^2 / Gamma makes a weak resonant two-level drive read 1.
"""
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from eit_nsim.atom.level_scheme import LevelScheme
from eit_nsim.errors import ConsistencyError
from eit_nsim.field.laser_field import Laser, LaserField, component_rabi, fields_by_parent
from eit_nsim.liouvillian.generator import Hamiltonian
from eit_nsim.solver.density import AbsorptionSample, DensityMatrix
from eit_nsim.solver.floquet import PeriodicSteadyState
from eit_nsim.units import to_angular

State = Union[DensityMatrix, PeriodicSteadyState]


def rabi_weights(fields: Sequence[LaserField], scheme: LevelScheme, i_sat=None) -> Dict[Laser, float]:
    kwargs = {} if i_sat is None else {"i_sat": i_sat}
    return {p: sum(component_rabi(f, c, gamma=scheme.gamma, **kwargs) ** 2 for c in f.components)
            for p, f in fields_by_parent(fields).items()}


def component_rates(rhos: np.ndarray, hamiltonian: Hamiltonian) -> Dict[Tuple[str, float], np.ndarray]:
    """Static couplings: rates for a stack of density matrices (k, n, n)"""
    return {(c.component.parent.value, c.component.offset):
            2.0 * np.einsum("ij,kji->k", c.operator, rhos).imag
            for c in hamiltonian.couplings}


def periodic_rates(state: PeriodicSteadyState, hamiltonian: Hamiltonian) -> Dict[Tuple[str, float], float]:
    w = to_angular(state.frequency)
    out = {}
    for c in hamiltonian.couplings:
        phase = np.exp(1j * c.harmonic * w * state.times)
        tr = np.einsum("ij,kji->k", c.operator, state.trajectory)
        out[(c.component.parent.value, c.component.offset)] = float(np.mean(2.0 * (phase * tr).imag))
    return out


def normalize_rates(rates: Dict[Tuple[str, float], np.ndarray], weights: Dict[Laser, float],
                    gamma: float) -> Dict[Laser, np.ndarray]:
    out = {}
    for laser in Laser:
        total = sum(r for (p, _), r in rates.items() if p == laser.value)
        out[laser] = gamma * total / weights[laser] if weights[laser] > 0 else 0.0 * np.asarray(total)
    return out


def absorption(state: State, fields: Sequence[LaserField], scheme: LevelScheme,
               hamiltonian: Hamiltonian, i_sat=None) -> AbsorptionSample:
    """Per-laser absorption coefficient; negative values (gain) are kept"""
    periodic = isinstance(state, PeriodicSteadyState)
    rho = state.state if periodic else state
    if rho.n != hamiltonian.n or rho.n != scheme.n:
        raise ConsistencyError(f"density matrix of size {rho.n} does not match a {hamiltonian.n}-level generator")
    if periodic != (hamiltonian.frequency is not None):
        raise ConsistencyError("periodic state and time-independent generator (or the reverse) do not match")
    if rho.velocity is not None and hamiltonian.velocity is not None and \
            abs(rho.velocity - hamiltonian.velocity) > 1e-12:
        raise ConsistencyError(f"state solved at velocity {rho.velocity} m/s, generator built for "
                               f"{hamiltonian.velocity} m/s")

    if periodic:
        rates = periodic_rates(state, hamiltonian)
    else:
        rates = {k: float(v[0]) for k, v in component_rates(rho.matrix[None], hamiltonian).items()}
    alpha = normalize_rates(rates, rabi_weights(fields, scheme, i_sat), scheme.gamma)
    return AbsorptionSample(
        laser1=float(alpha[Laser.LASER1]),
        laser2=float(alpha[Laser.LASER2]),
        components=rates,
        time_averaged=periodic,
    )
