import numpy as np
import pytest
from pydantic import ValidationError

from qbirdpe.baselines.metrics import tv_distance
from qbirdpe.qwalk.acceptance import build_acceptance_table
from qbirdpe.qwalk.layout import QubitCapExceeded, check_qubit_cap, layout_for_grid, register_layout
from qbirdpe.qwalk.measurement import dump_state, load_state, s_marginal, sample_marginal
from qbirdpe.qwalk.operators import apply_W, init_state
from qbirdpe.tests.test_data.lattices import grid_2x2, grid_3x3
from qbirdpe.tests.test_data.oracles import peaked_oracle

"""Test register_layout"""


@pytest.mark.parametrize(
    "qubits, ancilla, expected",
    [([6, 6], 3, 18), ([3, 3, 3, 3], 3, 19), ([5, 5], 3, 16), ([2, 2], 1, 8)],
)
def test_register_layout_totals(qubits, ancilla, expected):
    assert register_layout(qubits, ancilla).total == expected


@pytest.mark.parametrize("qubits, ancilla", [([0, 2], 3), ([2, 2], 0)])
def test_register_layout_invalid(qubits, ancilla):
    with pytest.raises(ValidationError):
        register_layout(qubits, ancilla)


def test_check_qubit_cap():
    layout = register_layout([6, 6], 3)
    check_qubit_cap(layout, 18)
    with pytest.raises(QubitCapExceeded, match="18 qubits"):
        check_qubit_cap(layout, 16)


"""Test measurement"""


def _evolved(grid, steps=2):
    table = build_acceptance_table(grid, peaked_oracle, beta=1.0)
    state = init_state(layout_for_grid(grid))
    for _ in range(steps):
        state = apply_W(state, table)
    return state


def test_s_marginal_sums_to_one():
    marginal = s_marginal(_evolved(grid_3x3), grid_3x3)
    assert marginal.total() == pytest.approx(1.0, abs=1e-9)
    assert np.all(marginal.probabilities >= 0)


def test_s_marginal_grid_mismatch():
    with pytest.raises(ValueError):
        s_marginal(_evolved(grid_2x2, 1), grid_3x3)


def test_shot_marginal_close_to_exact():
    exact = s_marginal(_evolved(grid_2x2, 4), grid_2x2)
    shots = sample_marginal(exact, 100000, np.random.default_rng(9))
    assert shots.total() == pytest.approx(1.0)
    assert tv_distance(shots, exact) < 0.02


def test_shot_marginal_deterministic():
    exact = s_marginal(_evolved(grid_2x2), grid_2x2)
    a = sample_marginal(exact, 1000, np.random.default_rng(4))
    b = sample_marginal(exact, 1000, np.random.default_rng(4))
    assert np.array_equal(a.probabilities, b.probabilities)
    with pytest.raises(ValueError):
        sample_marginal(exact, 0, np.random.default_rng(4))


"""Test statevector dumps"""


def test_dump_and_load(tmp_path):
    state = _evolved(grid_2x2)
    path = dump_state(state, tmp_path / "state.qbsv", iteration=12)
    raw = path.read_bytes()
    assert raw[:4] == b"QBSV"
    # header, then one (re, im) float64 pair per amplitude
    assert len(raw) == 24 + 16 * state.amplitudes.size
    loaded, iteration = load_state(path, (2, 2))
    assert iteration == 12
    assert np.array_equal(loaded.amplitudes, state.amplitudes)


def test_load_rejects_other_files(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(ValueError):
        load_state(path, (2, 2))


def test_load_rejects_other_layout(tmp_path):
    path = dump_state(_evolved(grid_2x2, 1), tmp_path / "state.qbsv")
    with pytest.raises(ValueError):
        load_state(path, (3, 3))
