"""
Run files: strict parsing, presets, overrides and the config hash.

A run is assembled from up to three layers, later ones winning key by key:
    1. a named preset (--scenario, or a `scenario:` key in the file)
    2. the YAML run file (--config)
    3. dotted overrides (--override laser1.intensity=10), values parsed as YAML scalars
The merged tree is validated by pydantic models that reject unknown keys, then turned into the
dataclass configs the library works with.
"""
import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

import config
from eit_nsim.atom.level_scheme import (
    LevelSchemeConfig, Manifold, SchemeMode, build_level_scheme, hyperfine_energy,
)
from eit_nsim.errors import ConfigError
from eit_nsim.field.laser_field import REFERENCE_EXCITED_F, Laser, group_center
from eit_nsim.liouvillian.frames import FrameMode
from eit_nsim.liouvillian.generator import RelaxationConfig
from eit_nsim.spectrum.doppler import DopplerConfig
from eit_nsim.spectrum.scan import GridSpec, LaserSettings, OuterLoop, ScanAxis, ScanConfig
from eit_nsim.spectrum.scenarios import scenario_tree

Vector = Tuple[float, float, float]
POLARIZATIONS = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0)}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HyperfineModel(_Strict):
    ground_1_2: float = config.GROUND_HFS_MHZ
    excited_0_1: float = config.EXCITED_0_1_MHZ
    excited_1_2: float = config.EXCITED_1_2_MHZ
    excited_2_3: float = config.EXCITED_2_3_MHZ


class GFactorModel(_Strict):
    ground_1: float = config.G_GROUND_F1
    ground_2: float = config.G_GROUND_F2
    excited_0: float = 0.0
    excited_1: float = config.G_EXCITED
    excited_2: float = config.G_EXCITED
    excited_3: float = config.G_EXCITED


class SchemeModel(_Strict):
    mode: Literal["ScalarN4", "FullZeeman24"] = "ScalarN4"
    gamma: float = Field(config.GAMMA_MHZ, gt=0)
    hyperfine: HyperfineModel = Field(default_factory=HyperfineModel)
    g_factors: GFactorModel = Field(default_factory=GFactorModel)
    branching: Dict[int, Tuple[float, float]] = Field(default_factory=lambda: {1: (0.5, 0.5), 2: (0.5, 0.5)})


class LaserModel(_Strict):
    carrier_detuning: Union[float, Literal["group_center"]] = 0.0
    intensity: float = Field(config.INTENSITY_LASER1, ge=0)
    polarization: Union[Literal["x", "y"], Vector] = "x"
    linewidth: float = Field(config.LASER_LINEWIDTH_MHZ, ge=0)


class Laser2Model(LaserModel):
    intensity: float = Field(config.INTENSITY_LASER2, ge=0)
    polarization: Union[Literal["x", "y"], Vector] = "y"


class ModulationModel(_Strict):
    laser: Literal["laser1", "laser2"] = "laser1"
    frequency: float = Field(config.GENERATOR_FREQUENCY_MHZ, gt=0)
    ratio: float = Field(0.0, ge=0)


class MagneticFieldModel(_Strict):
    vector: Vector = (0.0, 0.0, 0.0)       # G
    direction: Vector = (0.0, 0.0, 1.0)    # used when the field is scanned


class RelaxationModel(_Strict):
    gamma_t: float = config.GAMMA_TRANSIT_MHZ
    gamma_L: float = config.GAMMA_LASER_MHZ
    optical_dephasing: bool = False


class DopplerModel(_Strict):
    temperature_c: float = config.TEMPERATURE_C
    atomic_mass_u: float = config.ATOMIC_MASS_U
    wavelength_nm: float = config.WAVELENGTH_NM
    n_velocity: int = config.N_VELOCITY
    rule: Literal["gauss-hermite", "uniform"] = config.VELOCITY_RULE
    span_sigma: float = config.VELOCITY_SPAN_SIGMA


class WindowModel(_Strict):
    start: float
    stop: float
    step: float
    relative_to: Literal["absolute", "raman"] = "absolute"


AxisName = Literal["Laser2Detuning", "GeneratorFrequency", "MagneticField"]


class ScanModel(_Strict):
    axis: AxisName = "Laser2Detuning"
    windows: List[WindowModel] = Field(default_factory=lambda: [WindowModel(start=-600.0, stop=900.0, step=0.5)])
    solver_mode: Literal["Secular", "Floquet"] = "Secular"
    optical_depth_scale: Optional[float] = None
    baseline_fraction: float = config.BASELINE_ABSORBED_FRACTION
    i_sat: float = Field(config.I_SAT_MW_CM2, gt=0)


class OuterModel(_Strict):
    axis: AxisName
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    step: Optional[float] = None

    def resolved(self) -> Tuple[float, ...]:
        if self.values is not None:
            return tuple(float(v) for v in self.values)
        if None in (self.start, self.stop, self.step):
            raise ConfigError("outer loop needs either values or start/stop/step", key="outer")
        return tuple(float(v) for v in GridSpec(self.start, self.stop, self.step).values())


class OutputModel(_Strict):
    csv: Optional[str] = None
    plot: Optional[str] = None


class RunConfig(_Strict):
    scheme: SchemeModel = Field(default_factory=SchemeModel)
    laser1: LaserModel = Field(default_factory=LaserModel)
    laser2: Laser2Model = Field(default_factory=Laser2Model)
    modulation: Optional[ModulationModel] = None
    magnetic_field: MagneticFieldModel = Field(default_factory=MagneticFieldModel)
    relaxation: RelaxationModel = Field(default_factory=RelaxationModel)
    doppler: DopplerModel = Field(default_factory=DopplerModel)
    scan: ScanModel = Field(default_factory=ScanModel)
    outer: Optional[OuterModel] = None
    output: OutputModel = Field(default_factory=OutputModel)
    scenario: Optional[str] = None
    seed: int = 0


@dataclass
class Run:
    model: RunConfig
    scheme: LevelSchemeConfig
    doppler: DopplerConfig
    scan: ScanConfig
    config_hash: str


# tree handling

def deep_merge(base: Dict[str, Any], top: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(text: str) -> Tuple[List[str], Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value", key=text)
    key, raw = text.split("=", 1)
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ConfigError(f"override {text!r} has an empty key", key=text)
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as e:
        raise ConfigError(f"override value {raw!r} is not valid YAML: {e}", key=key) from e
    return path, value


def apply_override(tree: Dict[str, Any], text: str) -> Dict[str, Any]:
    path, value = parse_override(text)
    out = copy.deepcopy(tree)
    node: Any = out
    for i, part in enumerate(path):
        last = i == len(path) - 1
        if isinstance(node, list):
            # scan.windows.0.start addresses a list element
            if not part.isdigit() or int(part) >= len(node):
                raise ConfigError(f"cannot override {'.'.join(path)}: no element {part} in "
                                  f"{'.'.join(path[:i])}", key=".".join(path))
            part = int(part)
        elif not isinstance(node, dict):
            raise ConfigError(f"cannot override {'.'.join(path)}: {'.'.join(path[:i])} is not a section",
                              key=".".join(path))
        if last:
            node[part] = value
        else:
            if isinstance(node, dict) and node.get(part) is None:
                node[part] = {}
            node = node[part]
    return out


def read_tree(path: Union[str, Path]) -> Dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}", key="config")
    try:
        data = yaml.safe_load(p.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config file {p}: {e}", key="config") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {p} must hold a mapping at the top level", key="config")
    return data


def parse_tree(tree: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(tree)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(x) for x in first["loc"]) or "<root>"
        raise ConfigError(f"invalid config at {key}: {first['msg']}", key=key) from e


def config_hash(model: RunConfig) -> str:
    """sha256 prefix of everything that determines the numbers; output paths and labels excluded"""
    payload = model.model_dump(mode="json", exclude={"output", "scenario", "seed"})
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


# builders

def scheme_config(model: RunConfig) -> LevelSchemeConfig:
    s, hf, g = model.scheme, model.scheme.hyperfine, model.scheme.g_factors
    return LevelSchemeConfig(
        mode=SchemeMode(s.mode),
        gamma=s.gamma,
        hyperfine_intervals={
            (Manifold.GROUND, 1, 2): hf.ground_1_2,
            (Manifold.EXCITED, 0, 1): hf.excited_0_1,
            (Manifold.EXCITED, 1, 2): hf.excited_1_2,
            (Manifold.EXCITED, 2, 3): hf.excited_2_3,
        },
        g_factors={
            (Manifold.GROUND, 1): g.ground_1,
            (Manifold.GROUND, 2): g.ground_2,
            (Manifold.EXCITED, 0): g.excited_0,
            (Manifold.EXCITED, 1): g.excited_1,
            (Manifold.EXCITED, 2): g.excited_2,
            (Manifold.EXCITED, 3): g.excited_3,
        },
        branching={int(k): tuple(v) for k, v in s.branching.items()},
    )


def doppler_config(model: RunConfig) -> DopplerConfig:
    d = model.doppler
    return DopplerConfig(d.temperature_c, d.atomic_mass_u, d.wavelength_nm, d.n_velocity, d.rule, d.span_sigma)


def _laser_settings(m: LaserModel, detuning: float, modulation: Optional[ModulationModel],
                    name: str) -> LaserSettings:
    pol = POLARIZATIONS[m.polarization] if isinstance(m.polarization, str) else tuple(m.polarization)
    mod = modulation if modulation is not None and modulation.laser == name else None
    return LaserSettings(
        carrier_detuning=detuning,
        intensity=m.intensity,
        polarization=pol,
        linewidth=m.linewidth,
        modulation_frequency=mod.frequency if mod else None,
        modulation_ratio=mod.ratio if mod else 0.0,
    )


def raman_position(scheme, laser1_detuning: float) -> float:
    """Laser-2 detuning of the two-photon Raman resonance F=1 <-> F=2"""
    return (laser1_detuning
            + hyperfine_energy(scheme, Manifold.EXCITED, REFERENCE_EXCITED_F[Laser.LASER1])
            - hyperfine_energy(scheme, Manifold.EXCITED, REFERENCE_EXCITED_F[Laser.LASER2]))


def scan_config(model: RunConfig, scheme_cfg: LevelSchemeConfig, threads: int = config.THREADS,
                verbose: bool = config.VERBOSE) -> ScanConfig:
    scheme = build_level_scheme(scheme_cfg)
    detunings = {}
    for name, parent in (("laser1", Laser.LASER1), ("laser2", Laser.LASER2)):
        value = getattr(model, name).carrier_detuning
        detunings[name] = group_center(scheme, parent) if value == "group_center" else float(value)

    axis = ScanAxis(model.scan.axis)
    grid = []
    for i, w in enumerate(model.scan.windows):
        shift = 0.0
        if w.relative_to == "raman":
            if axis is not ScanAxis.LASER2_DETUNING:
                raise ConfigError("Raman-relative windows need the Laser2Detuning axis",
                                  key=f"scan.windows.{i}.relative_to")
            shift = raman_position(scheme, detunings["laser1"])
        grid.append(GridSpec(w.start + shift, w.stop + shift, w.step))

    outer = None
    if model.outer is not None:
        outer = OuterLoop(ScanAxis(model.outer.axis), model.outer.resolved())

    cfg = ScanConfig(
        axis=axis,
        grid=tuple(grid),
        laser1=_laser_settings(model.laser1, detunings["laser1"], model.modulation, "laser1"),
        laser2=_laser_settings(model.laser2, detunings["laser2"], model.modulation, "laser2"),
        magnetic_field=tuple(float(x) for x in model.magnetic_field.vector),
        field_direction=tuple(float(x) for x in model.magnetic_field.direction),
        relaxation=RelaxationConfig(model.relaxation.gamma_t, model.relaxation.gamma_L,
                                    model.relaxation.optical_dephasing),
        solver_mode=FrameMode(model.scan.solver_mode),
        optical_depth_scale=model.scan.optical_depth_scale,
        baseline_fraction=model.scan.baseline_fraction,
        i_sat=model.scan.i_sat,
        outer=outer,
        threads=threads,
        verbose=verbose,
    )
    cfg.validate()
    if np.any(np.diff(cfg.values()) <= 0):
        raise ConfigError("scan windows overlap or are not in ascending order", key="scan.windows")
    return cfg


def load_tree(path: Optional[Union[str, Path]] = None, scenario: Optional[str] = None,
              overrides: Sequence[str] = ()) -> Dict[str, Any]:
    file_tree = read_tree(path) if path is not None else {}
    name = scenario or file_tree.get("scenario")
    tree = scenario_tree(name) if name else {}
    tree = deep_merge(tree, file_tree)
    if name:
        tree["scenario"] = name
    for text in overrides:
        tree = apply_override(tree, text)
    return tree


def load_run(path: Optional[Union[str, Path]] = None, scenario: Optional[str] = None,
             overrides: Sequence[str] = (), threads: Optional[int] = None,
             verbose: Optional[bool] = None) -> Run:
    """Merge, validate and build every config a run needs"""
    model = parse_tree(load_tree(path, scenario, overrides))
    scheme_cfg = scheme_config(model)
    doppler = doppler_config(model).validate()
    scan_cfg = scan_config(
        model, scheme_cfg,
        threads=config.THREADS if threads is None else threads,
        verbose=config.VERBOSE if verbose is None else verbose,
    )
    return Run(model=model, scheme=scheme_cfg, doppler=doppler, scan=scan_cfg, config_hash=config_hash(model))
