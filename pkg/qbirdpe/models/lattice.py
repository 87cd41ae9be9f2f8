from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ParameterSpec(BaseModel):
    "Pydantic model for one inferred parameter and its uniform prior"

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, description="Identifier of the parameter")
    lower: float = Field(..., description="Lower bound of the prior interval")
    upper: float = Field(..., description="Upper bound of the prior interval")
    unit_label: str = Field("", description="Unit of the parameter, for reports")

    @model_validator(mode="after")
    def check_bounds(self) -> "ParameterSpec":
        if not self.lower < self.upper:
            raise ValueError(
                f"Parameter {self.name!r}: lower ({self.lower}) must be below upper ({self.upper})."
            )
        return self

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def with_bounds(self, lower: float, upper: float) -> "ParameterSpec":
        """
        Returns a copy with a new interval.
        """
        return ParameterSpec(
            name=self.name, lower=lower, upper=upper, unit_label=self.unit_label
        )


@dataclass(frozen=True)
class LatticePoint:
    indices: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(k) for k in self.indices))


@dataclass(frozen=True, eq=False)
class LatticeGrid:
    """
    Periodic product lattice over the parameter space.

    Each parameter p carries 2^Q_p strictly increasing values. Grids made by
    build_lattice are uniform and endpoint inclusive; renormalization survivor
    grids carry arbitrary increasing value lists.
    """

    params: Tuple[ParameterSpec, ...]
    qubits: Tuple[int, ...]
    values: Tuple[np.ndarray, ...]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.params:
            raise ValueError("Lattice must contain at least one parameter.")
        if len(self.params) != len(self.qubits) or len(self.params) != len(self.values):
            raise ValueError(
                f"Got {len(self.params)} parameters, {len(self.qubits)} qubit counts "
                f"and {len(self.values)} value lists."
            )
        names = [spec.name for spec in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"Parameter names must be unique, got {names}.")
        for spec, q, vals in zip(self.params, self.qubits, self.values):
            if q < 1:
                raise ValueError(f"Parameter {spec.name!r} needs at least one qubit, got {q}.")
            if len(vals) != 2**q:
                raise ValueError(
                    f"Parameter {spec.name!r}: expected {2**q} values, got {len(vals)}."
                )
            if np.any(np.diff(vals) <= 0):
                raise ValueError(f"Parameter {spec.name!r}: values must be strictly increasing.")

    @property
    def n_params(self) -> int:
        return len(self.params)

    @property
    def names(self) -> List[str]:
        return [spec.name for spec in self.params]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(2**q for q in self.qubits)

    @property
    def points_per_param(self) -> List[int]:
        return list(self.shape)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))

    @property
    def state_qubits(self) -> int:
        return sum(self.qubits)

    def point_values(self, point: LatticePoint) -> Tuple[float, ...]:
        return tuple(float(self.values[p][k]) for p, k in enumerate(point.indices))

    def mesh(self) -> List[np.ndarray]:
        """
        Returns one array per parameter, shaped like the grid, holding the values.
        """
        return np.meshgrid(*self.values, indexing="ij")


@dataclass(eq=False)
class ProbabilityTable:
    """
    Probabilities over every joint point of a lattice, stored with the grid's shape.
    """

    grid: LatticeGrid
    probabilities: np.ndarray

    def __post_init__(self):
        self.probabilities = np.asarray(self.probabilities, dtype=float).reshape(
            self.grid.shape
        )

    def total(self) -> float:
        return float(self.probabilities.sum())

    def marginal(self, p: int) -> np.ndarray:
        axes = tuple(i for i in range(self.grid.n_params) if i != p)
        return self.probabilities.sum(axis=axes)

    def argmax(self) -> LatticePoint:
        flat = int(np.argmax(self.probabilities))
        return LatticePoint(np.unravel_index(flat, self.grid.shape))

    def probability(self, point: LatticePoint) -> float:
        return float(self.probabilities[point.indices])
