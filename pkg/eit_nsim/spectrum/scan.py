"""
Doppler-averaged absorption scans.

Each grid point: group the velocity nodes by frame, build one generator per group, add the Doppler term
per node, solve (stacked for secular frames, one period map per node for Floquet frames) and reduce with
the Maxwell-Boltzmann weights in node order. Grid points run on a thread pool; results are collected by
index so the output does not depend on the thread count.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from eit_nsim.atom.level_scheme import LevelScheme
from eit_nsim.errors import ConfigError, ScanError, SolverError
from eit_nsim.field.laser_field import (
    POLARIZATION_X, POLARIZATION_Y, Laser, LaserField, apply_modulation, make_field,
)
from eit_nsim.liouvillian.frames import FrameMode, assign_frames, frame_signatures
from eit_nsim.liouvillian.generator import (
    RelaxationConfig, Superoperator, assemble_dissipator, assemble_hamiltonian, doppler_superdiagonal,
    excited_mask, liouvillian,
)
from eit_nsim.solver.floquet import period_map_steady_state
from eit_nsim.solver.observables import component_rates, normalize_rates, periodic_rates, rabi_weights
from eit_nsim.solver.steady_state import solve_stack, steady_state
from eit_nsim.spectrum.doppler import DopplerConfig, velocity_grid
from eit_nsim.units import doppler_shift, to_angular


class ScanAxis(str, Enum):
    LASER2_DETUNING = "Laser2Detuning"
    GENERATOR_FREQUENCY = "GeneratorFrequency"
    MAGNETIC_FIELD = "MagneticField"

    @property
    def unit(self) -> str:
        return "G" if self is ScanAxis.MAGNETIC_FIELD else "MHz"


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    step: float

    def values(self) -> np.ndarray:
        if not self.step > 0:
            raise ConfigError(f"grid step must be > 0, got {self.step}", key="scan.grid.step")
        if self.stop < self.start:
            raise ConfigError(f"grid stop {self.stop} is below start {self.start}", key="scan.grid")
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


@dataclass
class LaserSettings:
    carrier_detuning: float = 0.0
    intensity: float = config.INTENSITY_LASER1
    polarization: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    linewidth: float = config.LASER_LINEWIDTH_MHZ
    modulation_frequency: Optional[float] = None
    modulation_ratio: float = 0.0

    def build(self, parent: Laser) -> LaserField:
        fld = make_field(parent, self.carrier_detuning, self.intensity, self.polarization, self.linewidth)
        if self.modulation_frequency is not None:
            fld = apply_modulation(fld, self.modulation_frequency, self.modulation_ratio)
        return fld


def _laser2_defaults() -> LaserSettings:
    return LaserSettings(0.0, config.INTENSITY_LASER2, tuple(POLARIZATION_Y.real))


@dataclass(frozen=True)
class OuterLoop:
    axis: ScanAxis
    values: Tuple[float, ...]


@dataclass
class ScanConfig:
    axis: ScanAxis = ScanAxis.LASER2_DETUNING
    grid: Tuple[GridSpec, ...] = (GridSpec(-600.0, 900.0, 0.5),)
    laser1: LaserSettings = field(default_factory=lambda: LaserSettings(polarization=tuple(POLARIZATION_X.real)))
    laser2: LaserSettings = field(default_factory=_laser2_defaults)
    magnetic_field: Tuple[float, float, float] = (0.0, 0.0, 0.0)     # G
    field_direction: Tuple[float, float, float] = (0.0, 0.0, 1.0)    # used by the MagneticField axis
    relaxation: RelaxationConfig = field(default_factory=RelaxationConfig)
    solver_mode: FrameMode = FrameMode.SECULAR
    optical_depth_scale: Optional[float] = None
    baseline_fraction: float = config.BASELINE_ABSORBED_FRACTION
    i_sat: float = config.I_SAT_MW_CM2
    outer: Optional[OuterLoop] = None
    threads: int = config.THREADS
    verbose: bool = config.VERBOSE

    def values(self) -> np.ndarray:
        if not self.grid:
            raise ConfigError("scan grid is empty", key="scan.grid")
        return np.concatenate([g.values() for g in self.grid])

    def validate(self) -> "ScanConfig":
        self.values()
        self.relaxation.validate()
        if self.optical_depth_scale is not None and not self.optical_depth_scale > 0:
            raise ConfigError(f"optical depth scale must be > 0, got {self.optical_depth_scale}",
                              key="scan.optical_depth_scale")
        if not 0.0 < self.baseline_fraction < 1.0:
            raise ConfigError(f"baseline fraction must lie in (0, 1), got {self.baseline_fraction}",
                              key="scan.baseline_fraction")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}", key="threads")
        return self


@dataclass(eq=False)
class SpectrumResult:
    axis: ScanAxis
    values: np.ndarray
    absorption_laser1: np.ndarray      # absorbed fraction 1 - exp(-s alpha)
    absorption_laser2: np.ndarray
    alpha_laser1: np.ndarray           # Doppler-averaged absorption coefficients
    alpha_laser2: np.ndarray
    optical_depth_scale: float
    residuals: np.ndarray              # worst solver residual per point
    warnings: Tuple[str, ...] = ()
    config_hash: str = ""
    metadata: Dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)


def apply_axis(cfg: ScanConfig, axis: ScanAxis, value: float) -> ScanConfig:
    """Copy of cfg with the quantity an axis controls set to value"""
    axis = ScanAxis(axis)
    if axis is ScanAxis.LASER2_DETUNING:
        return replace(cfg, laser2=replace(cfg.laser2, carrier_detuning=float(value)))
    if axis is ScanAxis.GENERATOR_FREQUENCY:
        if cfg.laser1.modulation_frequency is not None:
            return replace(cfg, laser1=replace(cfg.laser1, modulation_frequency=float(value)))
        if cfg.laser2.modulation_frequency is not None:
            return replace(cfg, laser2=replace(cfg.laser2, modulation_frequency=float(value)))
        raise ConfigError("generator-frequency axis needs a modulated laser", key="modulation")
    direction = np.asarray(cfg.field_direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise ConfigError("magnetic field direction has zero length", key="scan.field_direction")
    return replace(cfg, magnetic_field=tuple(float(value) * direction / norm))


def build_fields(cfg: ScanConfig) -> Tuple[LaserField, LaserField]:
    return cfg.laser1.build(Laser.LASER1), cfg.laser2.build(Laser.LASER2)


@dataclass
class _Point:
    alpha1: float
    alpha2: float
    residual: float
    warnings: Tuple[str, ...]


def _batch_size(N: int) -> int:
    return max(1, int(config.VELOCITY_BATCH_MB * 2 ** 20 // (16 * N * N)))


def _solve_point(cfg: ScanConfig, scheme: LevelScheme, doppler: DopplerConfig,
                 nodes: np.ndarray, weights: np.ndarray, index: int, value: float) -> _Point:
    pcfg = apply_axis(cfg, cfg.axis, value)
    fields = build_fields(pcfg)
    B = np.asarray(pcfg.magnetic_field, dtype=float)
    kv_all = doppler_shift(nodes, doppler.wavelength_nm)
    rate_weights = rabi_weights(fields, scheme, pcfg.i_sat)
    mask = excited_mask(scheme)
    kdiag = -1j * to_angular(1.0) * doppler_superdiagonal(mask)

    sig = frame_signatures(scheme, fields, kv_all, pcfg.solver_mode)
    _, group_of = np.unique(sig, axis=0, return_inverse=True)
    group_of = np.asarray(group_of).reshape(-1)

    alpha1 = np.zeros(len(nodes))
    alpha2 = np.zeros(len(nodes))
    residual = 0.0
    warnings: List[str] = []

    for g in np.unique(group_of):
        members = np.flatnonzero(group_of == g)
        frame = assign_frames(scheme, fields, nodes[members[0]], pcfg.solver_mode, doppler.wavelength_nm)
        warnings.extend(frame.warnings)
        H = assemble_hamiltonian(scheme, fields, B, frame, velocity=0.0, i_sat=pcfg.i_sat,
                                 wavelength_nm=doppler.wavelength_nm)
        L = liouvillian(H, assemble_dissipator(scheme, pcfg.relaxation, fields, frame))

        if L.is_time_dependent:
            for k in members:
                try:
                    pss = period_map_steady_state(L.with_doppler(kv_all[k], mask),
                                                  velocity=float(nodes[k]), scan_point=index)
                except SolverError as e:
                    raise ScanError(e, index, value, int(k)) from e
                alpha = normalize_rates(periodic_rates(pss, H), rate_weights, scheme.gamma)
                alpha1[k], alpha2[k] = alpha[Laser.LASER1], alpha[Laser.LASER2]
                residual = max(residual, pss.periodicity_residual)
            continue

        step = _batch_size(L.dimension)
        for start in range(0, len(members), step):
            chunk = members[start:start + step]
            stack = np.repeat(L.static[None], len(chunk), axis=0)
            diag = np.arange(L.dimension)
            stack[:, diag, diag] += kv_all[chunk, None] * kdiag[None, :]
            try:
                rhos, res = solve_stack(stack, nodes[chunk], scan_point=index)
            except SolverError:
                # find the first failing node for the report
                for k, m in zip(chunk, stack):
                    try:
                        steady_state(Superoperator(m), velocity=float(nodes[k]), scan_point=index)
                    except SolverError as e:
                        raise ScanError(e, index, value, int(k)) from e
                raise
            alpha = normalize_rates(component_rates(rhos, H), rate_weights, scheme.gamma)
            alpha1[chunk] = alpha[Laser.LASER1]
            alpha2[chunk] = alpha[Laser.LASER2]
            residual = max(residual, float(res.max()))

    return _Point(float(weights @ alpha1), float(weights @ alpha2), residual, tuple(dict.fromkeys(warnings)))


def _run_points(cfg: ScanConfig, scheme: LevelScheme, doppler: DopplerConfig,
                values: np.ndarray) -> List[_Point]:
    nodes, weights = velocity_grid(doppler)

    def task(i: int) -> _Point:
        point = _solve_point(cfg, scheme, doppler, nodes, weights, i, float(values[i]))
        if cfg.verbose:
            print(f"[scan] point={i + 1}/{len(values)} value={values[i]:.6g} "
                  f"alpha1={point.alpha1:.6e} alpha2={point.alpha2:.6e}")
        return point

    if cfg.threads == 1 or len(values) == 1:
        return [task(i) for i in range(len(values))]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(task, range(len(values))))


def calibrate_optical_depth(cfg: ScanConfig, scheme: LevelScheme, doppler: DopplerConfig,
                            target: Optional[float] = None) -> float:
    """Scale s with 1 - exp(-s alpha_0) = target, alpha_0 being laser-1 absorption with laser 2 off"""
    target = cfg.baseline_fraction if target is None else target
    if not 0.0 < target < 1.0:
        raise ConfigError(f"baseline fraction must lie in (0, 1), got {target}", key="scan.baseline_fraction")
    dark = replace(cfg, laser2=replace(cfg.laser2, intensity=0.0), threads=1, verbose=False)
    alpha0 = _run_points(dark, scheme, doppler, dark.values()[:1])[0].alpha1
    if not alpha0 > 0:
        raise ConfigError(f"laser 1 alone does not absorb (alpha={alpha0:.3e}); cannot calibrate the optical depth",
                          key="scan.optical_depth_scale")
    return float(-np.log1p(-target) / alpha0)


def scan(cfg: ScanConfig, scheme: LevelScheme, doppler: DopplerConfig) -> SpectrumResult:
    """One spectrum over cfg.grid; an outer loop, if configured, is handled by sweep()"""
    cfg.validate()
    doppler.validate()
    values = cfg.values()
    scale = cfg.optical_depth_scale or calibrate_optical_depth(cfg, scheme, doppler)
    points = _run_points(cfg, scheme, doppler, values)

    alpha1 = np.array([p.alpha1 for p in points])
    alpha2 = np.array([p.alpha2 for p in points])
    warnings = tuple(dict.fromkeys(w for p in points for w in p.warnings))
    f1, f2 = build_fields(cfg)
    return SpectrumResult(
        axis=cfg.axis,
        values=values,
        absorption_laser1=-np.expm1(-scale * alpha1),
        absorption_laser2=-np.expm1(-scale * alpha2),
        alpha_laser1=alpha1,
        alpha_laser2=alpha2,
        optical_depth_scale=scale,
        residuals=np.array([p.residual for p in points]),
        warnings=warnings,
        metadata={
            "scheme": scheme.mode.value,
            "solver_mode": FrameMode(cfg.solver_mode).value,
            "n_velocity": doppler.n_velocity,
            "velocity_rule": doppler.rule,
            "laser1_reference": f1.reference_transition,
            "laser2_reference": f2.reference_transition,
            "modulation_frequency": f1.modulation_frequency or f2.modulation_frequency,
            "carrier_detuning_laser1": f1.carrier_detuning,
        },
    )


def sweep(cfg: ScanConfig, scheme: LevelScheme, doppler: DopplerConfig) -> List[Tuple[float, SpectrumResult]]:
    """Repeat scan() over the outer loop; every spectrum shares one optical-depth scale"""
    if cfg.outer is None:
        raise ConfigError("sweep needs an outer loop", key="outer")
    if not cfg.outer.values:
        raise ConfigError("outer loop has no values", key="outer.values")
    first = apply_axis(cfg, cfg.outer.axis, cfg.outer.values[0])
    scale = cfg.optical_depth_scale or calibrate_optical_depth(first, scheme, doppler)
    out = []
    for k, value in enumerate(cfg.outer.values):
        sub = replace(apply_axis(cfg, cfg.outer.axis, value), outer=None, optical_depth_scale=scale)
        if cfg.verbose:
            print(f"[sweep] {k + 1}/{len(cfg.outer.values)} {cfg.outer.axis.value}={value:g}")
        result = scan(sub, scheme, doppler)
        result.metadata["outer_axis"] = cfg.outer.axis.value
        result.metadata["outer_value"] = float(value)
        out.append((float(value), result))
    return out
