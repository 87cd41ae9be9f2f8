from typing import Annotated, List, Optional, Sequence

import numpy as np
from pydantic import Field, validate_call

from qbirdpe.models.lattice import LatticeGrid, LatticePoint, ParameterSpec


@validate_call
def uniform_values(
    lower: float, upper: float, qubits: Annotated[int, Field(ge=1)]
) -> np.ndarray:
    """
    Endpoint-inclusive uniform grid of 2^qubits values over [lower, upper].

    Parameters:
        lower (float): Lower bound.
        upper (float): Upper bound, strictly above lower.
        qubits (int): Number of discretization qubits.

    Returns:
        np.ndarray: lower + k * (upper - lower) / (2^qubits - 1), k = 0..2^qubits-1.
    """
    if not lower < upper:
        raise ValueError(f"lower ({lower}) must be below upper ({upper}).")
    n = 2**qubits
    step = (upper - lower) / (n - 1)
    values = lower + step * np.arange(n)
    values[-1] = upper
    return values


@validate_call
def build_lattice(
    specs: List[ParameterSpec], qubits: List[Annotated[int, Field(ge=1)]]
) -> LatticeGrid:
    """
    Discretizes the prior hypercube into a periodic lattice.

    Parameters:
        specs (List[ParameterSpec]): Ordered parameter specs.
        qubits (List[int]): Discretization qubits Q_p per parameter.

    Returns:
        LatticeGrid: Grid with 2^Q_p endpoint-inclusive values per parameter.
    """
    if len(specs) != len(qubits):
        raise ValueError(f"Got {len(specs)} parameter specs but {len(qubits)} qubit counts.")
    values = tuple(uniform_values(s.lower, s.upper, q) for s, q in zip(specs, qubits))
    return LatticeGrid(params=tuple(specs), qubits=tuple(qubits), values=values)


def draw_lattice(
    specs: Sequence[ParameterSpec],
    qubits: Sequence[int],
    rng: np.random.Generator,
) -> LatticeGrid:
    """
    Random Step 0 variant: 2^Q_p sorted uniform draws inside each interval.
    """
    if len(specs) != len(qubits):
        raise ValueError(f"Got {len(specs)} parameter specs but {len(qubits)} qubit counts.")
    values = []
    for spec, q in zip(specs, qubits):
        if q < 1:
            raise ValueError(f"Parameter {spec.name!r} needs at least one qubit, got {q}.")
        draws = np.sort(rng.uniform(spec.lower, spec.upper, size=2**q))
        # Draws are continuous, a repeat only happens through underflow of the width
        if np.any(np.diff(draws) <= 0):
            draws = uniform_values(spec.lower, spec.upper, q)
        values.append(draws)
    return LatticeGrid(params=tuple(specs), qubits=tuple(qubits), values=tuple(values))


def lattice_from_values(
    specs: Sequence[ParameterSpec], values: Sequence[Sequence[float]]
) -> LatticeGrid:
    """
    Product grid over explicit per-parameter value lists (power-of-two lengths).
    """
    qubits = []
    arrays = []
    for spec, vals in zip(specs, values):
        arr = np.asarray(vals, dtype=float)
        q = int(np.log2(len(arr))) if len(arr) > 0 else 0
        if len(arr) < 2 or 2**q != len(arr):
            raise ValueError(
                f"Parameter {spec.name!r}: value count {len(arr)} is not a power of two >= 2."
            )
        qubits.append(q)
        arrays.append(arr)
    if len(specs) != len(values):
        raise ValueError(f"Got {len(specs)} parameter specs but {len(values)} value lists.")
    return LatticeGrid(params=tuple(specs), qubits=tuple(qubits), values=tuple(arrays))


def check_point(grid: LatticeGrid, point: LatticePoint) -> None:
    if len(point.indices) != grid.n_params:
        raise ValueError(
            f"Point has {len(point.indices)} coordinates, grid has {grid.n_params} parameters."
        )
    for p, (k, n) in enumerate(zip(point.indices, grid.shape)):
        if not 0 <= k < n:
            raise ValueError(f"Index {k} of parameter {p} is outside [0, {n - 1}].")


def index_to_value(grid: LatticeGrid, p: int, k: int) -> float:
    """
    Returns the value of parameter p at lattice index k.

    Parameters:
        grid (LatticeGrid): The lattice.
        p (int): Parameter index.
        k (int): Lattice index, 0 <= k < 2^Q_p.

    Returns:
        float: For uniform grids, lower_p + k * (upper_p - lower_p) / (2^Q_p - 1).
    """
    if not 0 <= p < grid.n_params:
        raise ValueError(f"Parameter index {p} is outside [0, {grid.n_params - 1}].")
    n = grid.shape[p]
    if not 0 <= k < n:
        raise ValueError(f"Index {k} of parameter {p} is outside [0, {n - 1}].")
    return float(grid.values[p][k])


def neighbor(grid: LatticeGrid, point: LatticePoint, p: int, sign: int) -> LatticePoint:
    """
    Moves one lattice step along parameter p with periodic wrap.
    """
    check_point(grid, point)
    if not 0 <= p < grid.n_params:
        raise ValueError(f"Parameter index {p} is outside [0, {grid.n_params - 1}].")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}.")
    indices = list(point.indices)
    indices[p] = (indices[p] + sign) % grid.shape[p]
    return LatticePoint(tuple(indices))


def prior_density(grid: LatticeGrid, point: Optional[LatticePoint] = None) -> float:
    """
    Product of the uniform densities 1 / (upper_p - lower_p).

    The density is constant over the lattice, so point is only checked.
    """
    if point is not None:
        check_point(grid, point)
    return float(np.prod([1.0 / spec.width for spec in grid.params]))


def all_points(grid: LatticeGrid) -> List[LatticePoint]:
    return [LatticePoint(idx) for idx in np.ndindex(*grid.shape)]
