from pathlib import Path
from typing import Union

import numpy as np

from qbirdpe.gwsignal.psd import PsdModel
from qbirdpe.models.signal import FrequencySeries

PathLike = Union[str, Path]

SERIES_HEADER = "f_hz,re,im"
PSD_HEADER = "f_hz,psd"


def write_series_csv(series: FrequencySeries, path: PathLike) -> Path:
    """
    Writes a frequency series as CSV with header f_hz,re,im.
    """
    path = Path(path)
    table = np.column_stack([series.frequencies, series.values.real, series.values.imag])
    np.savetxt(path, table, fmt="%.17g", delimiter=",", header=SERIES_HEADER, comments="")
    return path


def read_series_csv(path: PathLike, delta_f: float = 1.0) -> FrequencySeries:
    """
    Reads a f_hz,re,im CSV; the nodes must be evenly spaced.

    delta_f is only used when the file holds a single node.
    """
    path = Path(path)
    with open(path) as handle:
        header = handle.readline().strip()
    if header != SERIES_HEADER:
        raise ValueError(f"{path}: expected header {SERIES_HEADER!r}, got {header!r}.")
    table = np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))
    freqs = table[:, 0]
    if len(freqs) > 1:
        steps = np.diff(freqs)
        delta_f = float(steps.mean())
        if not np.allclose(steps, delta_f, rtol=1e-9, atol=1e-9):
            raise ValueError(f"{path}: frequency nodes are not evenly spaced.")
    return FrequencySeries(float(freqs[0]), delta_f, table[:, 1] + 1j * table[:, 2])


def write_psd_csv(frequencies: np.ndarray, values: np.ndarray, path: PathLike) -> Path:
    path = Path(path)
    table = np.column_stack([frequencies, values])
    np.savetxt(path, table, fmt="%.17g", delimiter=",", header=PSD_HEADER, comments="")
    return path


def read_psd_csv(path: PathLike) -> PsdModel:
    """
    Reads a f_hz,psd CSV into a tabulated PSD model.
    """
    path = Path(path)
    with open(path) as handle:
        header = handle.readline().strip()
    if header != PSD_HEADER:
        raise ValueError(f"{path}: expected header {PSD_HEADER!r}, got {header!r}.")
    table = np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))
    return PsdModel(kind="tabulated", table_frequencies=table[:, 0], table_values=table[:, 1])
