"""
Named presets for the recorded spectra.

Each preset is a run-file tree, the same shape a YAML run file has, so a preset can be dumped, edited
and fed back with --config, and every key can be overridden with --override.
Zoom windows are given relative to the two-photon Raman condition (relative_to: raman), which moves
with the laser-1 carrier.
"""
import copy
from typing import Any, Dict

import config
from eit_nsim.errors import ConfigError
from eit_nsim.spectrum.scan import ScanConfig

Tree = Dict[str, Any]

F_GEN = config.GENERATOR_FREQUENCY_MHZ


def _window(start: float, stop: float, step: float, relative_to: str = "absolute") -> Dict[str, Any]:
    return {"start": start, "stop": stop, "step": step, "relative_to": relative_to}


def _side_windows(half_width: float, step: float):
    return [_window(-F_GEN - half_width, -F_GEN + half_width, step, "raman"),
            _window(F_GEN - half_width, F_GEN + half_width, step, "raman")]


_FIG2A: Tree = {
    "scheme": {"mode": "ScalarN4"},
    "laser1": {"carrier_detuning": "group_center", "intensity": config.INTENSITY_LASER1, "polarization": "x"},
    "laser2": {"carrier_detuning": 0.0, "intensity": config.INTENSITY_LASER2, "polarization": "y"},
    "modulation": {"laser": "laser1", "frequency": F_GEN, "ratio": 0.0},
    "magnetic_field": {"vector": [0.0, 0.0, 0.0]},
    "doppler": {"rule": "uniform", "n_velocity": config.SCENARIO_N_VELOCITY},
    "scan": {"axis": "Laser2Detuning", "windows": [_window(-600.0, 900.0, 0.5)], "solver_mode": "Secular"},
}


def _derive(base: Tree, **changes: Any) -> Tree:
    """Copy of base with top-level sections merged key by key"""
    out = copy.deepcopy(base)
    for section, value in changes.items():
        if isinstance(value, dict) and isinstance(out.get(section), dict):
            out[section].update(copy.deepcopy(value))
        else:
            out[section] = copy.deepcopy(value)
    return out


_FIG2B = _derive(_FIG2A, modulation={"ratio": config.SIDEBAND_INTENSITY_RATIO})

_ZOOM = {"rule": "uniform", "n_velocity": config.ZOOM_N_VELOCITY}

PRESETS: Dict[str, Tree] = {
    "fig2a": _FIG2A,
    "fig2b": _FIG2B,
    # side dips follow f over 156.9 +- 15 MHz
    "fig2c": _derive(
        _FIG2B,
        scan={"windows": [_window(-250.0, 250.0, 0.5, "raman")]},
        outer={"axis": "GeneratorFrequency", "start": F_GEN - 15.0, "stop": F_GEN + 15.0, "step": 5.0},
    ),
    # transverse 10 G along the laser-1 polarization, left and right side resonance; the sidebands stay
    # time-dependent harmonics there
    "fig2d": _derive(
        _FIG2B,
        scheme={"mode": "FullZeeman24"},
        magnetic_field={"vector": [10.0, 0.0, 0.0]},
        doppler=_ZOOM,
        scan={"windows": [_window(-F_GEN - 35.0, -F_GEN + 35.0, 0.5, "raman")], "solver_mode": "Floquet"},
    ),
    "fig2e": _derive(
        _FIG2B,
        scheme={"mode": "FullZeeman24"},
        magnetic_field={"vector": [10.0, 0.0, 0.0]},
        doppler=_ZOOM,
        scan={"windows": [_window(F_GEN - 35.0, F_GEN + 35.0, 0.5, "raman")], "solver_mode": "Floquet"},
    ),
    # side-dip contrast against a longitudinal field; the main dip is recorded alongside
    "longitudinalB": _derive(
        _FIG2B,
        scheme={"mode": "FullZeeman24"},
        magnetic_field={"vector": [0.0, 0.0, 0.0], "direction": [0.0, 0.0, 1.0]},
        doppler=_ZOOM,
        scan={"windows": [_side_windows(10.0, 0.5)[0], _window(-10.0, 10.0, 0.5, "raman"),
                          _side_windows(10.0, 0.5)[1]]},
        outer={"axis": "MagneticField", "start": 0.0, "stop": 3.0, "step": 0.5},
    ),
    # uncompensated laboratory field
    "labField": _derive(
        _FIG2A,
        scheme={"mode": "FullZeeman24"},
        magnetic_field={"vector": [config.LAB_FIELD_G, 0.0, 0.0]},
        doppler=_ZOOM,
        scan={"windows": [_window(-20.0, 20.0, 0.25, "raman")]},
    ),
    "parallelPolarization": _derive(
        _FIG2A,
        scheme={"mode": "FullZeeman24"},
        laser2={"polarization": "x"},
        doppler=_ZOOM,
        scan={"windows": [_window(-20.0, 20.0, 0.25, "raman")]},
    ),
    "lowIntensity": _derive(
        _FIG2A,
        laser1={"intensity": config.INTENSITY_LASER1 / 10.0},
        laser2={"intensity": config.INTENSITY_LASER2 / 10.0},
    ),
}


def scenario_tree(name: str) -> Tree:
    if name not in PRESETS:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(sorted(PRESETS))}", key="scenario")
    return copy.deepcopy(PRESETS[name])


def scenario(name: str) -> ScanConfig:
    """ScanConfig of a named preset, with the laser-1 carrier and Raman-relative windows resolved"""
    from eit_nsim.pipeline.run_config import load_run   # run_config builds on the presets above

    return load_run(scenario=name).scan
