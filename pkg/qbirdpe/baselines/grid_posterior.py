import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from qbirdpe.gwsignal.likelihood import LatticeOracle
from qbirdpe.lattice.grid import lattice_from_values
from qbirdpe.models.lattice import LatticeGrid, ParameterSpec, ProbabilityTable

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 2**20


class EnumerationCapExceeded(ValueError):
    "Raised when a grid has more points than a full enumeration may visit"

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"Grid has {required} points, enumeration is capped at {available}."
        )


class GridPosterior(ProbabilityTable):
    """
    Exact discrete posterior over every joint point of a lattice.
    """

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.probabilities < 0):
            raise ValueError("Posterior probabilities must be non-negative.")
        if abs(self.total() - 1) > 1e-9:
            raise ValueError(f"Posterior probabilities sum to {self.total()}, not 1.")


def posterior_from_log_likelihood(
    grid: LatticeGrid, log_likelihood: np.ndarray, beta: float = 1.0
) -> GridPosterior:
    """
    Normalizes exp(beta * logL) over the grid with the maximum subtracted first.

    The uniform prior is the same at every point and cancels.
    """
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}.")
    log_likelihood = np.asarray(log_likelihood, dtype=float)
    if log_likelihood.shape != grid.shape:
        raise ValueError(
            f"Log-likelihood shape {log_likelihood.shape} does not match grid {grid.shape}."
        )
    weights = beta * log_likelihood
    weights = np.exp(weights - weights.max())
    return GridPosterior(grid, weights / weights.sum())


def brute_force_posterior(
    grid: LatticeGrid,
    oracle: LatticeOracle,
    beta: float = 1.0,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> GridPosterior:
    """
    Exact posterior by evaluating the likelihood at every lattice point.

    Parameters:
    - grid (LatticeGrid): Lattice to enumerate.
    - oracle (LatticeOracle): Log-likelihood source.
    - beta (float): Annealing exponent applied to the likelihood.
    - enumeration_cap (int): Largest number of points allowed.

    Returns:
    - GridPosterior: p(x) proportional to exp(beta * logL(x)).
    """
    if grid.n_points > enumeration_cap:
        raise EnumerationCapExceeded(grid.n_points, enumeration_cap)
    logger.debug("Enumerating %d lattice points", grid.n_points)
    return posterior_from_log_likelihood(grid, oracle.grid_log_likelihood(grid), beta)


def write_posterior_csv(posterior: ProbabilityTable, path: Union[str, Path]) -> Path:
    """
    Writes idx_1..idx_P, value_1..value_P, prob with one row per joint point.
    """
    path = Path(path)
    grid = posterior.grid
    n_params = grid.n_params
    indices = np.array(list(np.ndindex(*grid.shape)), dtype=int).reshape(-1, n_params)
    values = np.column_stack([grid.values[p][indices[:, p]] for p in range(n_params)])
    probs = posterior.probabilities.ravel()
    header = ",".join(
        [f"idx_{p + 1}" for p in range(n_params)]
        + [f"value_{p + 1}" for p in range(n_params)]
        + ["prob"]
    )
    table = np.column_stack([indices, values, probs])
    fmt = ["%d"] * n_params + ["%.17g"] * (n_params + 1)
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt=fmt)
    return path


def read_posterior_csv(path: Union[str, Path], specs: List[ParameterSpec]) -> GridPosterior:
    """
    Reads a file written by write_posterior_csv back onto a lattice.
    """
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n_params = len(specs)
    if table.shape[1] != 2 * n_params + 1:
        raise ValueError(
            f"{path}: expected {2 * n_params + 1} columns for {n_params} parameters, "
            f"got {table.shape[1]}."
        )
    indices = table[:, :n_params].astype(int)
    values = []
    for p in range(n_params):
        size = indices[:, p].max() + 1
        column = np.empty(size)
        column[indices[:, p]] = table[:, n_params + p]
        values.append(column)
    grid = lattice_from_values(specs, values)
    probs = np.zeros(grid.shape)
    probs[tuple(indices.T)] = table[:, -1]
    return GridPosterior(grid, probs)
