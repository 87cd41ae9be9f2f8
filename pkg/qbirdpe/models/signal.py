import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class SourceParams(BaseModel):
    "Pydantic model for the source properties of a compact binary"

    model_config = ConfigDict(frozen=True)

    chirp_mass: float = Field(..., gt=0, description="Chirp mass (solar masses)")
    mass_ratio: float = Field(..., gt=0, description="Mass ratio of the components")
    luminosity_distance: float = Field(
        400.0, gt=0, description="Luminosity distance (Mpc)"
    )
    inclination: float = Field(
        0.0, ge=0, le=math.pi, description="Angle between line of sight and total angular momentum (rad)"
    )

    @property
    def symmetric_mass_ratio(self) -> float:
        return self.mass_ratio / (1 + self.mass_ratio) ** 2

    @property
    def total_mass(self) -> float:
        return self.chirp_mass * self.symmetric_mass_ratio ** (-3 / 5)


@dataclass(eq=False)
class FrequencySeries:
    """
    Complex frequency-domain strain sampled on f_start + i * delta_f, i = 0..N-1.
    """

    f_start: float  # Hz
    delta_f: float  # Hz
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.validate()

    def validate(self) -> None:
        if self.delta_f <= 0:
            raise ValueError(f"delta_f must be positive, got {self.delta_f}.")
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValueError("Frequency series must hold at least one value.")

    @property
    def n_nodes(self) -> int:
        return len(self.values)

    @property
    def frequencies(self) -> np.ndarray:
        return self.f_start + self.delta_f * np.arange(self.n_nodes)

    def is_compatible(self, other: "FrequencySeries") -> bool:
        return (
            self.n_nodes == other.n_nodes
            and math.isclose(self.f_start, other.f_start, rel_tol=0, abs_tol=1e-9)
            and math.isclose(self.delta_f, other.delta_f, rel_tol=1e-12)
        )

    def check_compatible(self, other: "FrequencySeries") -> None:
        if not self.is_compatible(other):
            raise ValueError(
                f"Frequency grids differ: ({self.f_start}, {self.delta_f}, {self.n_nodes}) "
                f"vs ({other.f_start}, {other.delta_f}, {other.n_nodes})."
            )

    def band(self, f_low: float, f_high: float) -> "FrequencySeries":
        """
        Returns the nodes with f_low <= f < f_high as a new series.
        """
        freqs = self.frequencies
        mask = (freqs >= f_low) & (freqs < f_high)
        if not mask.any():
            raise ValueError(f"No frequency nodes in [{f_low}, {f_high}).")
        first = int(np.argmax(mask))
        return FrequencySeries(
            f_start=float(freqs[first]), delta_f=self.delta_f, values=self.values[mask]
        )

    def copy(self) -> "FrequencySeries":
        return FrequencySeries(self.f_start, self.delta_f, self.values.copy())
