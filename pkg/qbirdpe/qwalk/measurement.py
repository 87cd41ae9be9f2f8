import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from qbirdpe.models.lattice import LatticeGrid, ProbabilityTable
from qbirdpe.models.walk import RegisterLayout, WalkState

logger = logging.getLogger(__name__)

DUMP_MAGIC = b"QBSV"
DUMP_VERSION = 1
# magic, then uint32 version, s, d, a, iteration
_HEADER_DTYPE = np.dtype("<u4")


def s_marginal(state: WalkState, grid: LatticeGrid) -> ProbabilityTable:
    """
    Exact probability of every state-register label, summed over D, E and C.
    """
    if state.layout.tensor_shape[: grid.n_params] != grid.shape:
        raise ValueError(
            f"Walk state register {state.layout.tensor_shape[:-3]} does not match grid {grid.shape}."
        )
    probs = np.sum(np.abs(state.amplitudes) ** 2, axis=(-3, -2, -1))
    return ProbabilityTable(grid, probs)


def sample_marginal(
    table: ProbabilityTable, n_shots: int, rng: np.random.Generator
) -> ProbabilityTable:
    """
    Empirical distribution of n_shots measurements of the state register.
    """
    if n_shots < 1:
        raise ValueError(f"n_shots must be positive, got {n_shots}.")
    probs = np.clip(table.probabilities.ravel(), 0, None)
    counts = rng.multinomial(n_shots, probs / probs.sum())
    return ProbabilityTable(table.grid, counts / n_shots)


def dump_state(state: WalkState, path: Union[str, Path], iteration: int = 0) -> Path:
    """
    Writes the statevector as little-endian float64 (re, im) pairs after a fixed header.
    """
    path = Path(path)
    layout = state.layout
    header = np.array(
        [
            DUMP_VERSION,
            layout.state_qubits,
            layout.direction_qubits,
            layout.ancilla_qubits,
            iteration,
        ],
        dtype=_HEADER_DTYPE,
    )
    pairs = np.empty(state.amplitudes.size * 2, dtype="<f8")
    flat = state.amplitudes.ravel()
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    with open(path, "wb") as handle:
        handle.write(DUMP_MAGIC)
        handle.write(header.tobytes())
        handle.write(pairs.tobytes())
    logger.debug("Wrote statevector dump %s", path)
    return path


def load_state(
    path: Union[str, Path], qubits_per_param: Tuple[int, ...]
) -> Tuple[WalkState, int]:
    """
    Reads a dump written by dump_state; returns the state and its iteration.
    """
    raw = Path(path).read_bytes()
    if raw[:4] != DUMP_MAGIC:
        raise ValueError(f"{path}: not a statevector dump.")
    header = np.frombuffer(raw[4:24], dtype=_HEADER_DTYPE)
    version, s, d, a, iteration = (int(v) for v in header)
    if version != DUMP_VERSION:
        raise ValueError(f"{path}: unsupported dump version {version}.")
    layout = RegisterLayout(qubits_per_param=tuple(qubits_per_param), ancilla_qubits=a)
    if layout.state_qubits != s or layout.direction_qubits != d:
        raise ValueError(f"{path}: dump layout (s={s}, d={d}) does not match {qubits_per_param}.")
    pairs = np.frombuffer(raw[24:], dtype="<f8")
    amplitudes = (pairs[0::2] + 1j * pairs[1::2]).reshape(layout.tensor_shape)
    return WalkState(layout, amplitudes), iteration
