from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

PsdKind = Literal["flat", "analytic", "tabulated"]

ANALYTIC_SCALE = 1e-49  # 1/Hz
ANALYTIC_KNEE = 215.0  # Hz


def analytic_detector_psd(
    frequencies: np.ndarray, scale: float = ANALYTIC_SCALE, knee: float = ANALYTIC_KNEE
) -> np.ndarray:
    """
    Fit to the zero-detuned high-power advanced-detector noise curve.

    Parameters:
    - frequencies (np.ndarray): Frequencies (Hz), positive.
    - scale (float): Overall level S0 (1/Hz).
    - knee (float): Reference frequency f0 (Hz).

    Returns:
    - np.ndarray: S0 * [x^-4.14 - 5 x^-2 + 111 (1 - x^2 + x^4 / 2) / (1 + x^2 / 2)], x = f / f0.
    """
    x = np.asarray(frequencies, dtype=float) / knee
    return scale * (
        x**-4.14 - 5 * x**-2 + 111 * (1 - x**2 + x**4 / 2) / (1 + x**2 / 2)
    )


@dataclass(eq=False)
class PsdModel:
    """
    One-sided noise power spectral density S_n(f) in strain^2 / Hz.
    """

    kind: PsdKind = "flat"
    level: float = 1.0  # flat
    scale: float = ANALYTIC_SCALE  # analytic
    knee: float = ANALYTIC_KNEE  # analytic
    table_frequencies: Optional[np.ndarray] = field(default=None)  # tabulated
    table_values: Optional[np.ndarray] = field(default=None)  # tabulated

    def __post_init__(self):
        if self.kind == "flat" and self.level <= 0:
            raise ValueError(f"Flat PSD level must be positive, got {self.level}.")
        if self.kind == "tabulated":
            if self.table_frequencies is None or self.table_values is None:
                raise ValueError("Tabulated PSD needs frequencies and values.")
            self.table_frequencies = np.asarray(self.table_frequencies, dtype=float)
            self.table_values = np.asarray(self.table_values, dtype=float)
            if np.any(np.diff(self.table_frequencies) <= 0):
                raise ValueError("Tabulated PSD frequencies must be strictly increasing.")

    def evaluate(self, frequencies: np.ndarray) -> np.ndarray:
        """
        Evaluates S_n at the given nodes; every value must be positive.
        """
        frequencies = np.asarray(frequencies, dtype=float)
        if self.kind == "flat":
            values = np.full(frequencies.shape, self.level)
        elif self.kind == "analytic":
            if np.any(frequencies <= 0):
                raise ValueError("Analytic PSD is only defined at positive frequencies.")
            values = analytic_detector_psd(frequencies, self.scale, self.knee)
        elif self.kind == "tabulated":
            lo, hi = self.table_frequencies[0], self.table_frequencies[-1]
            if frequencies.min() < lo or frequencies.max() > hi:
                raise ValueError(
                    f"Frequencies [{frequencies.min()}, {frequencies.max()}] fall outside "
                    f"the tabulated PSD range [{lo}, {hi}]."
                )
            values = np.interp(frequencies, self.table_frequencies, self.table_values)
        else:
            raise ValueError(f"Unknown PSD kind {self.kind!r}.")

        if np.any(~np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("PSD must be finite and positive at every frequency node.")
        return values
