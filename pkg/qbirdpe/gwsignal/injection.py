import logging
from typing import Literal, Optional

import numpy as np

from qbirdpe.gwsignal.psd import PsdModel
from qbirdpe.gwsignal.waveform import WaveformModel, isco_frequency, toy_model
from qbirdpe.models.signal import FrequencySeries, SourceParams

logger = logging.getLogger(__name__)


def frequency_nodes(f_start: float, delta_f: float, n_nodes: int) -> np.ndarray:
    return f_start + delta_f * np.arange(n_nodes)


def gaussian_noise(
    psd: PsdModel, f_start: float, delta_f: float, n_nodes: int, seed: int
) -> np.ndarray:
    """
    Complex Gaussian noise with real and imaginary variance S_n(f) / (4 delta_f).
    """
    freqs = frequency_nodes(f_start, delta_f, n_nodes)
    sigma = np.sqrt(psd.evaluate(freqs) / (4 * delta_f))
    rng = np.random.default_rng(seed)
    return sigma * (rng.standard_normal(n_nodes) + 1j * rng.standard_normal(n_nodes))


def generate_injection(
    true_params: SourceParams,
    psd: PsdModel,
    f_start: float,
    delta_f: float,
    n_nodes: int,
    noise: Literal["zero", "gaussian"] = "zero",
    seed: Optional[int] = None,
    model: WaveformModel = toy_model,
) -> FrequencySeries:
    """
    Builds synthetic data d = h(true_params) + n.

    Parameters:
    - true_params (SourceParams): Injected source properties.
    - psd (PsdModel): Noise spectrum, checked positive at every node.
    - f_start, delta_f, n_nodes: Frequency grid.
    - noise (str): "zero" or "gaussian".
    - seed (int): Noise seed, required for Gaussian noise.
    - model (WaveformModel): Waveform generator.

    Returns:
    - FrequencySeries: The injected data.
    """
    freqs = frequency_nodes(f_start, delta_f, n_nodes)
    psd.evaluate(freqs)

    f_isco = isco_frequency(true_params)
    if freqs[-1] > f_isco:
        logger.warning(
            "Injection grid reaches %.1f Hz, above the ISCO frequency %.1f Hz of the source",
            freqs[-1],
            f_isco,
        )

    signal = model.strain(true_params, freqs)
    if noise == "zero":
        return FrequencySeries(f_start, delta_f, signal)
    if noise == "gaussian":
        if seed is None:
            raise ValueError("Gaussian noise needs an explicit seed.")
        return FrequencySeries(
            f_start, delta_f, signal + gaussian_noise(psd, f_start, delta_f, n_nodes, seed)
        )
    raise ValueError(f"Unknown noise kind {noise!r}.")
