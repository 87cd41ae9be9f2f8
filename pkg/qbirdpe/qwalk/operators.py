"""
Statevector form of the walk operator W = R V^+ B^+ S F B V.

Amplitudes are held as a tensor with axes (S_0, ..., S_{P-1}, D, E, C). Every
operator is a pure function returning a new state; all of them act on whole
slices of the tensor, so updates never overlap.
"""

from functools import lru_cache

import numpy as np

from qbirdpe.models.walk import AcceptanceTable, RegisterLayout, WalkState
from qbirdpe.qwalk.acceptance import SIGNS
from qbirdpe.qwalk.layout import DEFAULT_QUBIT_CAP, check_qubit_cap

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=float) / np.sqrt(2)


@lru_cache(maxsize=None)
def walsh_hadamard(n_qubits: int) -> np.ndarray:
    """
    Hadamard gates on n_qubits qubits as one 2^n x 2^n matrix.
    """
    matrix = np.ones((1, 1))
    for _ in range(n_qubits):
        matrix = np.kron(matrix, _HADAMARD)
    return matrix


def _apply_on_axis(amplitudes: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(matrix, amplitudes, axes=([1], [axis])), 0, axis)


def init_state(layout: RegisterLayout, qubit_cap: int = DEFAULT_QUBIT_CAP) -> WalkState:
    """
    Uniform superposition over the state register, all other registers in |0>.
    """
    check_qubit_cap(layout, qubit_cap)
    amplitudes = np.zeros(layout.tensor_shape, dtype=complex)
    amplitudes[..., 0, 0, 0] = 1 / np.sqrt(2**layout.state_qubits)
    return WalkState(layout, amplitudes)


def apply_V(state: WalkState) -> WalkState:
    """
    Hadamard on every direction and shift-sign qubit; V is its own inverse.
    """
    n_params = state.layout.n_params
    amplitudes = _apply_on_axis(
        state.amplitudes, walsh_hadamard(state.layout.direction_qubits), n_params
    )
    amplitudes = _apply_on_axis(amplitudes, _HADAMARD, n_params + 1)
    return WalkState(state.layout, amplitudes)


def _check_table(state: WalkState, table: AcceptanceTable) -> None:
    expected = state.layout.tensor_shape[:-1]
    if table.values.shape != expected:
        raise ValueError(
            f"Acceptance table shape {table.values.shape} does not cover the walk "
            f"registers {expected}."
        )


def apply_B(state: WalkState, table: AcceptanceTable, inverse: bool = False) -> WalkState:
    """
    Rotates the coin by theta = arcsin(sqrt(A)) for every (S, D, E) pattern.

    The a-bit quantization of A is applied before the angle is taken.
    """
    _check_table(state, table)
    angles = table.angles
    cos, sin = np.cos(angles), np.sin(angles)
    if inverse:
        sin = -sin
    coin0 = state.amplitudes[..., 0]
    coin1 = state.amplitudes[..., 1]
    amplitudes = np.empty_like(state.amplitudes)
    amplitudes[..., 0] = cos * coin0 - sin * coin1
    amplitudes[..., 1] = sin * coin0 + cos * coin1
    return WalkState(state.layout, amplitudes)


def apply_B_inverse(state: WalkState, table: AcceptanceTable) -> WalkState:
    return apply_B(state, table, inverse=True)


def apply_F(state: WalkState) -> WalkState:
    """
    Shifts parameter D of the state register by the sign in E when the coin is |1>.

    Direction patterns >= P leave the state register untouched.
    """
    n_params = state.layout.n_params
    amplitudes = state.amplitudes.copy()
    lead = (slice(None),) * n_params
    for p in range(n_params):
        for e, sign in enumerate(SIGNS):
            block = lead + (p, e, 1)
            amplitudes[block] = np.roll(state.amplitudes[block], sign, axis=p)
    return WalkState(state.layout, amplitudes)


def apply_Sflip(state: WalkState) -> WalkState:
    """
    Negates the shift sign when the coin is |1>.
    """
    amplitudes = state.amplitudes.copy()
    amplitudes[..., 1] = state.amplitudes[..., ::-1, 1]
    return WalkState(state.layout, amplitudes)


def apply_R(state: WalkState) -> WalkState:
    """
    Phase flip of every component with D, E and C all in |0>.
    """
    amplitudes = state.amplitudes.copy()
    amplitudes[..., 0, 0, 0] *= -1
    return WalkState(state.layout, amplitudes)


def apply_W(state: WalkState, table: AcceptanceTable) -> WalkState:
    """
    One walk step, factors applied right to left: V, B, F, S, B^+, V^+, R.
    """
    state = apply_V(state)
    state = apply_B(state, table)
    state = apply_F(state)
    state = apply_Sflip(state)
    state = apply_B_inverse(state, table)
    state = apply_V(state)
    return apply_R(state)
