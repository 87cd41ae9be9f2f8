"""
Closed-form frequency-domain inspiral used in place of a full IMR model.

Conventions (all quantities in seconds internally):

    Mc_s = Mc * T_SUN,  d_s = d_L * MPC_S,  eta = q / (1 + q)^2,
    M_s = Mc_s * eta^(-3/5),  v = (pi * M_s * f)^(1/3)

    A(f)   = sqrt(5/24) * pi^(-2/3) * Mc_s^(5/6) * f^(-7/6) / d_s * (1 + cos^2 theta_jn) / 2
    Psi(f) = -pi/4 + 3 / (128 * eta * v^5) * (1 + (3715/756 + 55 * eta / 9) * v^2)
    h(f)   = A(f) * exp(-i * Psi(f))

The leading term of Psi reduces to 3/128 * (pi * Mc_s * f)^(-5/3) and depends on
the chirp mass only; the first post-Newtonian correction carries the mass-ratio
dependence. Coalescence time and phase are fixed to zero. The model is
evaluated at every positive frequency; truncation above the Schwarzschild ISCO
of the total mass is optional.
"""

import math
from abc import ABC, abstractmethod
from typing import Annotated

import numpy as np
from pydantic import Field, validate_call

from qbirdpe.models.signal import FrequencySeries, SourceParams

T_SUN = 4.925490947641267e-6  # G * M_sun / c^3 (s)
MPC_S = 1.0292712503507357e14  # 1 Mpc / c (s)


def inclination_factor(inclination: float) -> float:
    return (1 + math.cos(inclination) ** 2) / 2


def isco_frequency(params: SourceParams) -> float:
    """
    Gravitational-wave frequency at the Schwarzschild ISCO of the total mass (Hz).
    """
    total_mass_s = params.total_mass * T_SUN
    return 1 / (6**1.5 * math.pi * total_mass_s)


class WaveformModel(ABC):
    """
    Frequency-domain waveform interface; a faithful model plugs in here.
    """

    @abstractmethod
    def strain(self, params: SourceParams, frequencies: np.ndarray) -> np.ndarray:
        """
        Returns the complex strain h(f) at the given frequencies.
        """


class ToyInspiral(WaveformModel):
    def __init__(self, truncate_at_isco: bool = False):
        self.truncate_at_isco = truncate_at_isco

    def amplitude(self, params: SourceParams, frequencies: np.ndarray) -> np.ndarray:
        mc_s = params.chirp_mass * T_SUN
        d_s = params.luminosity_distance * MPC_S
        prefactor = math.sqrt(5 / 24) * math.pi ** (-2 / 3) * mc_s ** (5 / 6) / d_s
        return prefactor * frequencies ** (-7 / 6) * inclination_factor(params.inclination)

    def phase(self, params: SourceParams, frequencies: np.ndarray) -> np.ndarray:
        eta = params.symmetric_mass_ratio
        total_mass_s = params.total_mass * T_SUN
        v = (math.pi * total_mass_s * frequencies) ** (1 / 3)
        pn1 = 3715 / 756 + 55 * eta / 9
        return -math.pi / 4 + 3 / (128 * eta * v**5) * (1 + pn1 * v**2)

    def strain(self, params: SourceParams, frequencies: np.ndarray) -> np.ndarray:
        frequencies = np.asarray(frequencies, dtype=float)
        if np.any(frequencies <= 0):
            raise ValueError("Waveform frequencies must be positive.")
        h = self.amplitude(params, frequencies) * np.exp(-1j * self.phase(params, frequencies))
        if self.truncate_at_isco:
            h[frequencies > isco_frequency(params)] = 0
        return h


toy_model = ToyInspiral()


@validate_call
def toy_waveform(
    params: SourceParams,
    f_start: Annotated[float, Field(gt=0)],
    delta_f: Annotated[float, Field(gt=0)],
    n_nodes: Annotated[int, Field(ge=1)],
) -> FrequencySeries:
    """
    Evaluates the toy inspiral on a regular frequency grid.

    Parameters:
        params (SourceParams): Source properties.
        f_start (float): First frequency node (Hz).
        delta_f (float): Node spacing (Hz).
        n_nodes (int): Number of nodes.

    Returns:
        FrequencySeries: h(f_start + i * delta_f).
    """
    freqs = f_start + delta_f * np.arange(n_nodes)
    return FrequencySeries(f_start, delta_f, toy_model.strain(params, freqs))
