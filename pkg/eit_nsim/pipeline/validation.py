"""
Oracle suite behind `validate`.

quick: two-level analytic steady state, Lambda dark state, secular/Floquet equivalence, Doppler width,
       period-map contractivity, steady state against long-time propagation
full:  quick + 24-level checks (dipole sum rule, radiative trace rate, trace preservation with a field,
       covariance under a common rotation of field and polarizations)
"""
import time
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from eit_nsim.atom.level_scheme import (
    LevelSchemeConfig, Manifold, SchemeMode, build_level_scheme, decay_channels, dipole_couplings,
)
from eit_nsim.errors import EitSimError
from eit_nsim.field.laser_field import (
    POLARIZATION_X, POLARIZATION_Y, Laser, LaserField, apply_modulation, make_field,
)
from eit_nsim.liouvillian.frames import FrameMode, assign_frames
from eit_nsim.liouvillian.generator import (
    Hamiltonian, RelaxationConfig, Superoperator, assemble_dissipator, assemble_hamiltonian,
    commutator_superop, lindblad_superop, liouvillian,
)
from eit_nsim.solver.density import random_density, trace_norm
from eit_nsim.solver.floquet import monodromy, period_map_steady_state
from eit_nsim.solver.observables import absorption
from eit_nsim.solver.steady_state import propagate, steady_state
from eit_nsim.spectrum.doppler import DopplerConfig, doppler_fwhm
from eit_nsim.units import celsius_to_kelvin, to_angular

LEVELS = ("quick", "full")


@dataclass(frozen=True)
class ValidationConstants:
    """Reference values the checks compare against; tests swap in wrong ones to see the suite fail"""
    gamma: float = config.GAMMA_MHZ                 # linewidth used by the analytic two-level formula
    doppler_reference_mhz: float = 520.0
    doppler_tolerance: float = 0.10
    doppler_temperature_k: float = 300.0
    analytic_tolerance: float = 1e-8
    dark_ratio_limit: float = 1e-6
    dark_population_limit: float = 1e-6
    dark_gamma_t: float = 1e-7
    dark_intensity: float = 0.835                   # mW/cm^2, about 3 MHz Rabi frequency
    equivalence_tolerance: float = 1e-8
    periodic_tolerance: float = 1e-6
    contraction_slack: float = 1e-8
    propagation_tolerance: float = 1e-6
    propagation_draws: int = 50
    propagation_rtol: float = 1e-7                  # a decade inside propagation_tolerance
    covariance_tolerance: float = 1e-8
    sum_rule_tolerance: float = 1e-12
    modulation_frequency: float = config.GENERATOR_FREQUENCY_MHZ
    modulation_ratio: float = config.SIDEBAND_INTENSITY_RATIO


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""
    seconds: float = 0.0


def _fields(detuning1: float, detuning2: float, intensity1: float, intensity2: float,
            pol1=POLARIZATION_X, pol2=POLARIZATION_Y,
            modulation: Optional[Tuple[float, float]] = None) -> Tuple[LaserField, LaserField]:
    l1 = make_field(Laser.LASER1, detuning1, intensity1, pol1)
    l2 = make_field(Laser.LASER2, detuning2, intensity2, pol2)
    if modulation is not None:
        l1 = apply_modulation(l1, *modulation)
    return l1, l2


def _generator(scheme, fields, relax: RelaxationConfig, B=(0.0, 0.0, 0.0),
               mode: FrameMode = FrameMode.SECULAR) -> Tuple[Hamiltonian, Superoperator]:
    frame = assign_frames(scheme, fields, 0.0, mode)
    H = assemble_hamiltonian(scheme, fields, B, frame)
    return H, liouvillian(H, assemble_dissipator(scheme, relax, fields, frame))


def _raman(scheme) -> float:
    return scheme.level_energy(Manifold.EXCITED, 2) - scheme.level_energy(Manifold.EXCITED, 1)


# quick checks

def check_two_level(c: ValidationConstants) -> CheckResult:
    """Driven two-level atom against rho_ee = (W^2/4) / (D^2 + G^2/4 + W^2/2) on a 5 x 5 grid"""
    gamma = config.GAMMA_MHZ
    worst = 0.0
    for delta in (-10.0, -3.0, 0.0, 2.0, 8.0):
        for omega in (0.5, 2.0, 6.0, 12.0, 20.0):
            H = np.array([[0.0, omega / 2], [omega / 2, -delta]], dtype=complex)
            jump = np.sqrt(gamma) * np.array([[0.0, 1.0], [0.0, 0.0]])
            L = Superoperator(to_angular(1.0) * (commutator_superop(H) + lindblad_superop(jump)))
            rho = steady_state(L).matrix
            expected = (omega ** 2 / 4) / (delta ** 2 + c.gamma ** 2 / 4 + omega ** 2 / 2)
            worst = max(worst, abs(rho[1, 1].real - expected))
    return CheckResult("two_level_analytic", worst <= c.analytic_tolerance, worst, c.analytic_tolerance)


def check_dark_state(c: ValidationConstants) -> CheckResult:
    """Raman-resonant Lambda drive without laser dephasing: absorption vanishes against a dephased reference"""
    scheme = build_level_scheme(LevelSchemeConfig(mode=SchemeMode.SCALAR_N4))
    fields = _fields(0.0, _raman(scheme), c.dark_intensity, c.dark_intensity)
    dark_relax = RelaxationConfig(gamma_t=c.dark_gamma_t, gamma_L=0.0)
    H, L = _generator(scheme, fields, dark_relax)
    rho = steady_state(L, velocity=0.0)
    dark = absorption(rho, fields, scheme, H).laser1
    excited = float(sum(rho.population(i) for i in scheme.indices(Manifold.EXCITED)))

    ref_relax = RelaxationConfig(gamma_t=c.dark_gamma_t, gamma_L=100.0)
    H_ref, L_ref = _generator(scheme, fields, ref_relax)
    bright = absorption(steady_state(L_ref, velocity=0.0), fields, scheme, H_ref).laser1
    ratio = abs(dark) / bright if bright > 0 else float("inf")
    ok = ratio < c.dark_ratio_limit and excited < c.dark_population_limit
    return CheckResult("lambda_dark_state", ok, ratio, c.dark_ratio_limit,
                       f"excited population {excited:.2e}, reference absorption {bright:.3e}")


def check_secular_floquet(c: ValidationConstants, seed: int = 0) -> CheckResult:
    """Floquet treatment against the secular one and against direct time stepping.

    Zero sidebands: the Floquet request builds the secular generator, and a period map over vanishing
    harmonics reproduces the time-independent steady state. With sidebands: the period-map fixed point
    is where a random initial state ends up after a whole number of periods. The value is the worst
    error in units of its own tolerance."""
    scheme = build_level_scheme(LevelSchemeConfig(mode=SchemeMode.SCALAR_N4))
    detunings = (-30.0, _raman(scheme) - 30.0 + 2.0, 5.0, 8.0)
    relax = RelaxationConfig(gamma_t=0.5)    # gap of the period map well above the ODE error
    fields = _fields(*detunings, modulation=(c.modulation_frequency, 0.0))
    _, L_sec = _generator(scheme, fields, relax, mode=FrameMode.SECULAR)
    _, L_flo = _generator(scheme, fields, relax, mode=FrameMode.FLOQUET)
    gen_diff = float(np.max(np.abs(L_sec.static - L_flo.static))) + float(L_flo.is_time_dependent)

    zero = np.zeros_like(L_sec.static)
    periodic = Superoperator(L_sec.static, {1: zero, -1: zero}, c.modulation_frequency)
    pss = period_map_steady_state(periodic, velocity=0.0, rtol=1e-12)
    state_diff = trace_norm(pss.state.matrix - steady_state(L_sec, velocity=0.0).matrix)

    modulated = _fields(*detunings, modulation=(c.modulation_frequency, c.modulation_ratio))
    _, L_mod = _generator(scheme, modulated, relax, mode=FrameMode.FLOQUET)
    if not L_mod.is_time_dependent:
        return CheckResult("secular_floquet_equivalence", False, float("inf"), 1.0,
                           f"sideband ratio {c.modulation_ratio:g} left the Floquet generator static")
    driven = period_map_steady_state(L_mod, velocity=0.0, rtol=1e-12)
    periods = int(np.ceil(3.0 / (relax.gamma_t * driven.period)))
    rho0 = random_density(np.random.default_rng(seed), scheme.n)
    late = propagate(L_mod, rho0, periods * driven.period, rtol=1e-10).matrix
    drive_diff = trace_norm(late - driven.state.matrix)

    worst = max(gen_diff / c.equivalence_tolerance, state_diff / c.equivalence_tolerance,
                drive_diff / c.periodic_tolerance)
    return CheckResult("secular_floquet_equivalence", worst <= 1.0, worst, 1.0,
                       f"generator {gen_diff:.1e}, state {state_diff:.1e}, "
                       f"harmonics {sorted(L_mod.harmonics)} over {periods} periods {drive_diff:.1e}")


def check_doppler_width(c: ValidationConstants) -> CheckResult:
    doppler = DopplerConfig(temperature_c=c.doppler_temperature_k - celsius_to_kelvin(0.0))
    width = doppler_fwhm(doppler)
    rel = abs(width - c.doppler_reference_mhz) / c.doppler_reference_mhz
    return CheckResult("doppler_fwhm", rel <= c.doppler_tolerance, rel, c.doppler_tolerance,
                       f"{width:.1f} MHz at {c.doppler_temperature_k:g} K")


def check_contractivity(c: ValidationConstants) -> CheckResult:
    """Monodromy spectrum inside the unit disc with a single eigenvalue on the circle"""
    scheme = build_level_scheme(LevelSchemeConfig(mode=SchemeMode.SCALAR_N4))
    fields = _fields(0.0, _raman(scheme), 10.0, 15.0,
                     modulation=(c.modulation_frequency, c.modulation_ratio))
    _, L = _generator(scheme, fields, RelaxationConfig(), mode=FrameMode.FLOQUET)
    mods = np.sort(np.abs(np.linalg.eigvals(monodromy(L))))[::-1]
    excess = float(mods[0] - 1.0)
    unique = mods[1] < 1.0 - config.EIGENVALUE_GAP and abs(excess) <= c.contraction_slack
    ok = bool(np.all(mods <= 1.0 + c.contraction_slack)) and unique
    return CheckResult("period_map_contractivity", ok, excess, c.contraction_slack,
                       f"|lambda_1|={mods[0]:.12f}, |lambda_2|={mods[1]:.8f}")


def check_propagation(c: ValidationConstants, seed: int = 0) -> CheckResult:
    """steady_state against propagation to t = 10 / gamma_t, each draw from its own random initial state"""
    scheme = build_level_scheme(LevelSchemeConfig(mode=SchemeMode.SCALAR_N4))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(c.propagation_draws):
        relax = RelaxationConfig(gamma_t=float(rng.uniform(0.05, 0.5)), gamma_L=float(rng.uniform(0.5, 2.0)))
        fields = _fields(float(rng.uniform(-50.0, 50.0)), float(rng.uniform(-200.0, 400.0)),
                         float(rng.uniform(1.0, 30.0)), float(rng.uniform(1.0, 30.0)))
        _, L = _generator(scheme, fields, relax)
        rho0 = random_density(rng, scheme.n)
        ss = steady_state(L).matrix
        late = propagate(L, rho0, 10.0 / relax.gamma_t, rtol=c.propagation_rtol).matrix
        worst = max(worst, trace_norm(ss - late))
    return CheckResult("steady_state_vs_propagation", worst <= c.propagation_tolerance, worst,
                       c.propagation_tolerance, f"{c.propagation_draws} draws, seed {seed}")


# full-level checks

def _full_scheme():
    return build_level_scheme(LevelSchemeConfig(mode=SchemeMode.FULL_ZEEMAN_24))


def check_sum_rule(c: ValidationConstants) -> CheckResult:
    """Every excited sublevel carries total squared amplitude 1"""
    scheme = _full_scheme()
    totals: Dict[int, float] = {e: 0.0 for e in scheme.indices(Manifold.EXCITED)}
    for d in dipole_couplings(scheme):
        totals[d.excited] += d.amplitude ** 2
    worst = max(abs(v - 1.0) for v in totals.values())
    return CheckResult("dipole_sum_rule", worst <= c.sum_rule_tolerance, worst, c.sum_rule_tolerance)


def check_trace_rate(c: ValidationConstants) -> CheckResult:
    """sum_q L_q^dag L_q = Gamma on the excited manifold"""
    scheme = _full_scheme()
    total = sum(ch.operator.conj().T @ ch.operator for ch in decay_channels(scheme))
    worst = float(np.max(np.abs(total - scheme.gamma * scheme.projector(Manifold.EXCITED))))
    return CheckResult("radiative_trace_rate", worst <= c.sum_rule_tolerance, worst, c.sum_rule_tolerance)


def check_trace_annihilation(c: ValidationConstants) -> CheckResult:
    """vec(I)^T L = 0 for the full 24-level generator in an oblique field"""
    scheme = _full_scheme()
    fields = _fields(10.0, 160.0, 5.0, 8.0)
    _, L = _generator(scheme, fields, RelaxationConfig(), B=(0.3, -0.2, 0.6))
    n = scheme.n
    row = np.eye(n).reshape(-1) @ L.static
    worst = float(np.max(np.abs(row)) / max(np.max(np.abs(L.static)), 1.0))
    return CheckResult("trace_annihilation", worst <= c.sum_rule_tolerance * 1e3, worst,
                       c.sum_rule_tolerance * 1e3)


def check_axis_covariance(c: ValidationConstants) -> CheckResult:
    """Rotating the field and both polarizations together leaves the absorption unchanged"""
    scheme = _full_scheme()
    relax = RelaxationConfig()
    rot = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])   # z -> x about y
    B = np.array([0.0, 0.0, 1.5])
    values = []
    for R in (np.eye(3), rot):
        fields = _fields(0.0, _raman(scheme) + 1.0, 5.0, 8.0, pol1=R @ POLARIZATION_X, pol2=R @ POLARIZATION_Y)
        H, L = _generator(scheme, fields, relax, B=R @ B)
        values.append(absorption(steady_state(L, velocity=0.0), fields, scheme, H))
    worst = max(abs(values[0].laser1 - values[1].laser1), abs(values[0].laser2 - values[1].laser2))
    return CheckResult("axis_covariance", worst <= c.covariance_tolerance, worst, c.covariance_tolerance)


QUICK: Sequence[Callable[..., CheckResult]] = (
    check_two_level, check_dark_state, check_secular_floquet, check_doppler_width, check_contractivity,
    check_propagation,
)
FULL: Sequence[Callable[..., CheckResult]] = (
    check_sum_rule, check_trace_rate, check_trace_annihilation, check_axis_covariance,
)
SEEDED = (check_secular_floquet, check_propagation)


def run_checks(level: str = "quick", constants: Optional[ValidationConstants] = None, seed: int = 0,
               verbose: bool = config.VERBOSE) -> List[CheckResult]:
    """Run every check of a level; a check that raises counts as failed"""
    if level not in LEVELS:
        raise ValueError(f"unknown validation level {level!r}, expected one of {LEVELS}")
    c = constants or ValidationConstants()
    checks = list(QUICK) + (list(FULL) if level == "full" else [])
    results = []
    for check in checks:
        t0 = time.perf_counter()
        try:
            res = check(c, seed) if check in SEEDED else check(c)
        except EitSimError as e:
            res = CheckResult(check.__name__.replace("check_", ""), False, float("nan"), float("nan"),
                              f"{type(e).__name__}: {e}")
        res = replace(res, seconds=time.perf_counter() - t0)
        if verbose:
            print(f"[validate] {res.name} {'PASS' if res.passed else 'FAIL'} value={res.value:.3e} "
                  f"limit={res.limit:.1e} ({res.seconds:.2f}s)")
        results.append(res)
    return results
