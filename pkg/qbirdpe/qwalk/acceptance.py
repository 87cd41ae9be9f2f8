import numpy as np

from qbirdpe.gwsignal.likelihood import LatticeOracle, acceptance_array
from qbirdpe.models.lattice import LatticeGrid
from qbirdpe.models.walk import AcceptanceTable

SIGNS = (1, -1)  # E register pattern 0 -> +1 step, 1 -> -1 step


def acceptance_from_log_likelihood(
    grid: LatticeGrid, log_likelihood: np.ndarray, beta: float, ancilla_qubits: int = 3
) -> AcceptanceTable:
    """
    Acceptance of every single-parameter move from a log-likelihood array.

    Parameters:
    - grid (LatticeGrid): The lattice; log_likelihood has its shape.
    - log_likelihood (np.ndarray): logL at every point.
    - beta (float): Annealing exponent.
    - ancilla_qubits (int): Size a of the register the values are quantized to.

    Returns:
    - AcceptanceTable: Values for directions >= P are zero (never accepted).
    """
    log_likelihood = np.asarray(log_likelihood, dtype=float)
    if log_likelihood.shape != grid.shape:
        raise ValueError(
            f"Log-likelihood shape {log_likelihood.shape} does not match grid {grid.shape}."
        )
    n_params = grid.n_params
    n_directions = 2 ** (int(np.ceil(np.log2(n_params))) if n_params > 1 else 0)
    values = np.zeros(grid.shape + (n_directions, 2))
    for p in range(n_params):
        for e, sign in enumerate(SIGNS):
            # target of the move x -> x + sign * e_p sits at index x + sign
            target = np.roll(log_likelihood, -sign, axis=p)
            values[..., p, e] = acceptance_array(target - log_likelihood, beta)
    return AcceptanceTable(grid=grid, ancilla_qubits=ancilla_qubits, values=values)


def build_acceptance_table(
    grid: LatticeGrid, oracle: LatticeOracle, beta: float, ancilla_qubits: int = 3
) -> AcceptanceTable:
    """
    Evaluates the oracle on the whole grid and builds the acceptance table.

    The uniform prior ratio is one for every move and drops out.
    """
    return acceptance_from_log_likelihood(
        grid, oracle.grid_log_likelihood(grid), beta, ancilla_qubits
    )
