"""
Spectrum CSV files.

    # eit-nsim v1 config=<hash>
    axis_MHz,absorption_laser1,absorption_laser2
    -6.00000000e+02,9.87654321e-02,...

The first column is always named axis_MHz. A scan over anything other than the laser-2 detuning names its
axis after the hash on the first line (`# eit-nsim v1 config=<hash> axis=MagneticField`); the column then
holds values in that axis' unit. Values are written with nine significant digits in a fixed format, so
one config always gives the same bytes.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

import config
from eit_nsim.errors import ResultsFileError
from eit_nsim.spectrum.scan import ScanAxis, SpectrumResult

HEADER_PREFIX = f"# {config.CSV_FORMAT_TAG} config="
AXIS_TOKEN = "axis="
FLOAT_FORMAT = "%.8e"
AXIS_COLUMN = "axis_MHz"
SIGNAL_COLUMNS = ["absorption_laser1", "absorption_laser2"]


def header_line(config_hash: str, axis: Union[ScanAxis, str] = ScanAxis.LASER2_DETUNING) -> str:
    axis = ScanAxis(axis)
    if axis is ScanAxis.LASER2_DETUNING:
        return f"{HEADER_PREFIX}{config_hash}"
    return f"{HEADER_PREFIX}{config_hash} {AXIS_TOKEN}{axis.value}"


@dataclass
class StoredSpectrum:
    path: Path
    config_hash: str
    axis: ScanAxis
    values: np.ndarray
    absorption_laser1: np.ndarray
    absorption_laser2: np.ndarray

    @property
    def axis_unit(self) -> str:
        return self.axis.unit

    def __len__(self) -> int:
        return len(self.values)


def write_spectrum(result: SpectrumResult, path: Union[str, Path], config_hash: str = "") -> Path:
    path = Path(path)
    frame = pd.DataFrame({
        AXIS_COLUMN: np.asarray(result.values, dtype=float),
        SIGNAL_COLUMNS[0]: np.asarray(result.absorption_laser1, dtype=float),
        SIGNAL_COLUMNS[1]: np.asarray(result.absorption_laser2, dtype=float),
    })
    if not np.all(np.isfinite(frame.to_numpy())):
        raise ResultsFileError(f"refusing to write non-finite values to {path}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(header_line(config_hash or result.config_hash, result.axis) + "\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def _parse_header(first: str, path: Path):
    tokens = first[len(HEADER_PREFIX):].split(" ")
    config_hash, axis = tokens[0], ScanAxis.LASER2_DETUNING
    for token in tokens[1:]:
        if not token.startswith(AXIS_TOKEN):
            raise ResultsFileError(f"{path}: unexpected header token {token!r}")
        try:
            axis = ScanAxis(token[len(AXIS_TOKEN):])
        except ValueError as e:
            raise ResultsFileError(f"{path}: unknown scan axis in header {token!r}") from e
    return config_hash, axis


def read_spectrum(path: Union[str, Path]) -> StoredSpectrum:
    path = Path(path)
    if not path.is_file():
        raise ResultsFileError(f"results file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            first = f.readline().rstrip("\n")
            if not first:
                raise ResultsFileError(f"results file is empty: {path}")
            if not first.startswith(HEADER_PREFIX):
                raise ResultsFileError(f"{path} does not start with '{HEADER_PREFIX}<hash>'")
            frame = pd.read_csv(f)
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ResultsFileError(f"cannot read {path}: {e}") from e
    config_hash, axis = _parse_header(first, path)

    expected = [AXIS_COLUMN] + SIGNAL_COLUMNS
    if list(frame.columns) != expected:
        raise ResultsFileError(f"{path} has columns {list(frame.columns)}, expected {','.join(expected)}")
    if frame.empty:
        raise ResultsFileError(f"results file has no data rows: {path}")
    try:
        data = frame.to_numpy(dtype=float)
    except (TypeError, ValueError) as e:
        raise ResultsFileError(f"{path} contains non-numeric values: {e}") from e
    if not np.all(np.isfinite(data)):
        raise ResultsFileError(f"{path} contains non-finite values")
    return StoredSpectrum(
        path=path,
        config_hash=config_hash,
        axis=axis,
        values=data[:, 0],
        absorption_laser1=data[:, 1],
        absorption_laser2=data[:, 2],
    )


def sweep_path(path: Union[str, Path], k: int) -> Path:
    """<stem>.<k>.csv next to path"""
    path = Path(path)
    return path.with_name(f"{path.stem}.{k}{path.suffix or '.csv'}")
