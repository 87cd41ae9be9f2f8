from typing import Annotated, List

from pydantic import Field, validate_call

from qbirdpe.models.lattice import LatticeGrid
from qbirdpe.models.walk import RegisterLayout

DEFAULT_QUBIT_CAP = 26


class QubitCapExceeded(ValueError):
    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"Walk needs {required} qubits but the simulation cap is {available}."
        )


@validate_call
def register_layout(
    qubits_per_param: List[Annotated[int, Field(ge=1)]],
    ancilla_qubits: Annotated[int, Field(ge=1)] = 3,
) -> RegisterLayout:
    """
    Builds the register layout for the given discretization.

    Parameters:
        qubits_per_param (List[int]): Q_p for every parameter.
        ancilla_qubits (int): Size a of the acceptance register.

    Returns:
        RegisterLayout: Layout with total = sum(Q_p) + ceil(log2 P) + a + 2 qubits.
    """
    return RegisterLayout(
        qubits_per_param=tuple(qubits_per_param), ancilla_qubits=ancilla_qubits
    )


def layout_for_grid(grid: LatticeGrid, ancilla_qubits: int = 3) -> RegisterLayout:
    return register_layout(list(grid.qubits), ancilla_qubits)


def check_qubit_cap(layout: RegisterLayout, qubit_cap: int = DEFAULT_QUBIT_CAP) -> None:
    if layout.total > qubit_cap:
        raise QubitCapExceeded(layout.total, qubit_cap)
