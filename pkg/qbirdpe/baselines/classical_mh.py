import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from qbirdpe.gwsignal.likelihood import LatticeOracle
from qbirdpe.models.lattice import LatticeGrid, LatticePoint, ProbabilityTable
from qbirdpe.models.walk import quantize_acceptance

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class ChainSamples:
    """
    Lattice points of a single-site Metropolis-Hastings chain.

    points has n_steps + 1 rows (the start, then the state after each step) and
    one column of lattice indices per parameter.
    """

    grid: LatticeGrid
    points: np.ndarray
    accepted: int
    seed: int

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.n_steps if self.n_steps else 0.0

    def values(self, burn_in: int = 0) -> np.ndarray:
        """
        Parameter values of the chain after burn_in steps, one column per parameter.
        """
        kept = self.points[burn_in:]
        return np.column_stack(
            [self.grid.values[p][kept[:, p]] for p in range(self.grid.n_params)]
        )

    def empirical(self, burn_in: int = 0) -> ProbabilityTable:
        """
        Visit frequencies of every lattice point after burn_in steps.
        """
        kept = self.points[burn_in:]
        flat = np.ravel_multi_index(tuple(kept.T), self.grid.shape)
        counts = np.bincount(flat, minlength=self.grid.n_points)
        return ProbabilityTable(self.grid, counts / counts.sum())


def classical_mh(
    grid: LatticeGrid,
    oracle: LatticeOracle,
    beta: float,
    n_steps: int,
    seed: int = 0,
    ancilla_qubits: Optional[int] = None,
) -> ChainSamples:
    """
    Single-site lattice Metropolis-Hastings with periodic moves.

    Each step picks one parameter and a sign uniformly and accepts the +/-1 move
    with probability min[1, (L_to / L_from)^beta].

    Parameters:
    - grid (LatticeGrid): Lattice to walk on.
    - oracle (LatticeOracle): Log-likelihood source, evaluated only at visited points.
    - beta (float): Annealing exponent.
    - n_steps (int): Number of proposals.
    - seed (int): Seed of the chain's generator.
    - ancilla_qubits (int): When given, acceptance is rounded to the levels of an
      a-qubit register.

    Returns:
    - ChainSamples: The chain, start included.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}.")
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}.")
    rng = np.random.default_rng(seed)
    shape = np.array(grid.shape)
    n_params = grid.n_params

    current = np.array([rng.integers(0, n) for n in shape])
    params = rng.integers(0, n_params, size=n_steps)
    signs = rng.choice((1, -1), size=n_steps)
    draws = rng.random(n_steps)

    points = np.empty((n_steps + 1, n_params), dtype=int)
    points[0] = current
    current_log_l = oracle.log_likelihood_at(grid, LatticePoint(tuple(current)))
    accepted = 0
    for step in range(n_steps):
        proposal = current.copy()
        p = params[step]
        proposal[p] = (proposal[p] + signs[step]) % shape[p]
        proposal_log_l = oracle.log_likelihood_at(grid, LatticePoint(tuple(proposal)))
        prob = math.exp(min(0.0, beta * (proposal_log_l - current_log_l)))
        if ancilla_qubits is not None:
            prob = float(quantize_acceptance(prob, ancilla_qubits))
        if draws[step] < prob:
            current = proposal
            current_log_l = proposal_log_l
            accepted += 1
        points[step + 1] = current

    logger.debug("MH chain: %d steps, acceptance rate %.3f", n_steps, accepted / n_steps)
    return ChainSamples(grid=grid, points=points, accepted=accepted, seed=seed)


def write_samples_csv(
    names: List[str],
    samples: np.ndarray,
    iterations: np.ndarray,
    path: Union[str, Path],
) -> Path:
    """
    Writes iteration, theta_1..theta_P with parameter values (not indices).

    Shared by the qBIRD and MH samplers.
    """
    path = Path(path)
    samples = np.asarray(samples, dtype=float).reshape(len(iterations), len(names))
    table = np.column_stack([np.asarray(iterations, dtype=float), samples])
    fmt = ["%d"] + ["%.17g"] * len(names)
    np.savetxt(
        path, table, delimiter=",", header=",".join(["iteration"] + names), comments="", fmt=fmt
    )
    return path


def read_samples_csv(path: Union[str, Path]):
    """
    Reads a samples file; returns (names, iterations, samples).
    """
    path = Path(path)
    with open(path) as handle:
        header = handle.readline().strip().split(",")
    if not header or header[0] != "iteration":
        raise ValueError(f"{path}: missing 'iteration' header.")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if table.shape[0] and table.shape[1] != len(header):
        raise ValueError(f"{path}: {table.shape[1]} columns for header {header}.")
    return header[1:], table[:, 0].astype(int), table[:, 1:]
