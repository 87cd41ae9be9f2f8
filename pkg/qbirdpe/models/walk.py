import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qbirdpe.models.lattice import LatticeGrid


class RegisterLayout(BaseModel):
    """
    Qubit allocation of the walk: state (S), direction (D), shift sign (E),
    acceptance ancilla (A) and coin (C) registers.
    """

    model_config = ConfigDict(frozen=True)

    qubits_per_param: Tuple[int, ...] = Field(..., min_length=1)
    ancilla_qubits: int = Field(3, ge=1, description="Qubits of the acceptance register")

    @property
    def n_params(self) -> int:
        return len(self.qubits_per_param)

    @property
    def state_qubits(self) -> int:
        return sum(self.qubits_per_param)

    @property
    def direction_qubits(self) -> int:
        return math.ceil(math.log2(self.n_params)) if self.n_params > 1 else 0

    @property
    def shift_qubits(self) -> int:
        return 1

    @property
    def coin_qubits(self) -> int:
        return 1

    @property
    def total(self) -> int:
        return (
            self.state_qubits
            + self.direction_qubits
            + self.shift_qubits
            + self.ancilla_qubits
            + self.coin_qubits
        )

    @property
    def n_directions(self) -> int:
        return 2**self.direction_qubits

    @property
    def tensor_shape(self) -> Tuple[int, ...]:
        # (S_0, ..., S_{P-1}, D, E, C); the A register stays |0> and is not stored
        return tuple(2**q for q in self.qubits_per_param) + (self.n_directions, 2, 2)


@dataclass(eq=False)
class WalkState:
    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != self.layout.tensor_shape:
            raise ValueError(
                f"Amplitude array shape {self.amplitudes.shape} does not match "
                f"layout {self.layout.tensor_shape}."
            )

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def copy(self) -> "WalkState":
        return WalkState(self.layout, self.amplitudes.copy())


def quantize_acceptance(values, ancilla_qubits: int):
    """
    Rounds acceptance values to the 2^a - 1 levels an a-qubit register holds.
    """
    levels = 2**ancilla_qubits - 1
    return np.round(np.asarray(values, dtype=float) * levels) / levels


@dataclass(eq=False)
class AcceptanceTable:
    """
    Metropolis acceptance for every (lattice point, direction, sign) of a grid.

    values has shape grid.shape + (2^d, 2); the last axis is the sign register
    (0 -> +1 step, 1 -> -1 step). Direction patterns >= P hold zero.
    """

    grid: LatticeGrid
    ancilla_qubits: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise ValueError("Acceptance values must lie in [0, 1].")

    @property
    def levels(self) -> int:
        return 2**self.ancilla_qubits - 1

    @property
    def quantized(self) -> np.ndarray:
        return quantize_acceptance(self.values, self.ancilla_qubits)

    @property
    def angles(self) -> np.ndarray:
        return np.arcsin(np.sqrt(np.clip(self.quantized, 0.0, 1.0)))
