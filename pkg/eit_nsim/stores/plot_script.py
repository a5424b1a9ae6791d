"""
gnuplot script for a spectrum CSV, with the detected peaks and dips labelled.

The script only reads the CSV it was made for; running `gnuplot <script>` next to it renders a PNG.
"""
import math
import os
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

import config
from eit_nsim.spectrum.features import Feature, find_features
from eit_nsim.spectrum.scan import ScanAxis
from eit_nsim.stores.results_store import read_spectrum

XLABELS = {
    ScanAxis.LASER2_DETUNING: "laser-2 detuning (MHz)",
    ScanAxis.GENERATOR_FREQUENCY: "generator frequency (MHz)",
    ScanAxis.MAGNETIC_FIELD: "magnetic field (G)",
}


def _label(f: Feature) -> str:
    width = "unres." if math.isnan(f.fwhm) else f"{f.fwhm:.2f}"
    return f"{f.kind} {f.position:.2f} ({width})"


def _annotations(features: List[Feature], x: np.ndarray, y: np.ndarray) -> List[str]:
    lines = []
    span = float(np.ptp(y)) or max(abs(float(y.max())), 1.0) * 0.1
    for k, f in enumerate(features, start=1):
        i = int(np.argmin(np.abs(x - f.position)))
        tip = float(y[i])
        # dips are labelled below the curve, peaks above
        offset = -0.08 * span if f.kind == "dip" else 0.08 * span
        lines.append(f'set arrow {k} from {f.position:.6g},{tip + offset:.6g} to {f.position:.6g},{tip:.6g} '
                     f'head size screen 0.008,30 lc rgb "#555555"')
        lines.append(f'set label {k} "{_label(f)}" at {f.position:.6g},{tip + 1.3 * offset:.6g} '
                     f'center rotate by 90 font ",7"')
    return lines


def emit_plot_script(csv_path: Union[str, Path], out: Optional[Union[str, Path]] = None,
                     gamma: float = config.GAMMA_MHZ, with_laser2: bool = False) -> Path:
    """Write <stem>.gp next to the CSV (or to `out`) and return its path"""
    csv_path = Path(csv_path)
    stored = read_spectrum(csv_path)
    out = Path(out) if out is not None else csv_path.with_suffix(".gp")
    features = find_features(stored.values, stored.absorption_laser1, gamma)

    rel = Path(os.path.relpath(csv_path.resolve(), out.resolve().parent)).as_posix()
    png = Path(rel).with_suffix(".png").as_posix()
    xlabel = XLABELS[stored.axis]

    lines = [
        f"# {config.CSV_FORMAT_TAG} config={stored.config_hash}",
        'set datafile separator ","',
        "set terminal pngcairo size 1200,700 enhanced",
        f'set output "{png}"',
        f'set xlabel "{xlabel}"',
        'set ylabel "absorbed fraction"',
        "set key top right",
        "set grid",
        *_annotations(features, stored.values, stored.absorption_laser1),
    ]
    # line 1 is the format header, line 2 the column names
    plot = f'plot "{rel}" using 1:2 skip 2 with lines lw 1.5 title "laser 1"'
    if with_laser2:
        plot += f', "{rel}" using 1:3 skip 2 with lines lw 1 title "laser 2"'
    lines.append(plot)

    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    return out
