import numpy as np
import pytest
from pydantic import ValidationError

from qbirdpe.baselines.grid_posterior import brute_force_posterior
from qbirdpe.baselines.metrics import tv_distance
from qbirdpe.lattice.grid import build_lattice, lattice_from_values
from qbirdpe.models.lattice import LatticePoint, ProbabilityTable
from qbirdpe.models.run import RenormStage
from qbirdpe.qbird.renormalization import (
    convergence_trace,
    likelihood_peak,
    quantum_metropolis,
    rank_indices,
    reduce_qubits,
    reduction_size,
    sieve,
    stable_argmax,
)
from qbirdpe.qbird.summary import summarize
from qbirdpe.qwalk.layout import QubitCapExceeded
from qbirdpe.qwalk.measurement import load_state
from qbirdpe.tests.test_data.lattices import grid_2x2, grid_3x3, spec_x, spec_y
from qbirdpe.tests.test_data.oracles import flat_oracle, peaked_oracle, sharp_oracle

grid_4 = lattice_from_values([spec_x], [[0.0, 1.0, 2.0, 3.0]])


def stage_of(grid):
    return RenormStage(s=grid.state_qubits, grid=grid)


"""Test reduction_size"""


@pytest.mark.parametrize(
    "s, n_params, n_survivors, expected",
    [
        (12, 2, 9, (4, 4)),
        (4, 2, 1, (2, 2)),
        (12, 4, 300, (8, 8)),
        (12, 4, 33, (6, 8)),
        (6, 2, 5, (3, 4)),
    ],
)
def test_reduction_size(s, n_params, n_survivors, expected):
    assert reduction_size(s, n_params, n_survivors) == expected


def test_reduction_size_invalid():
    with pytest.raises(ValidationError):
        reduction_size(4, 2, 0)


"""Test sieve"""


@pytest.mark.parametrize(
    "alpha, expected",
    [(0.5, [True, True, False, False]), (0.0, [True] * 4), (1.0, [True, False, False, False])],
)
def test_sieve(alpha, expected):
    result = sieve(ProbabilityTable(grid_4, [0.5, 0.3, 0.15, 0.05]), alpha)
    assert result.mask.tolist() == expected
    assert result.max_probability == 0.5
    assert result.count == sum(expected)


def test_sieve_keeps_ties():
    result = sieve(ProbabilityTable(grid_4, [0.4, 0.4, 0.1, 0.1]), 1.0)
    assert result.count == 2
    assert result.survivors == [LatticePoint((0,)), LatticePoint((1,))]


def test_sieve_invalid_alpha():
    with pytest.raises(ValueError):
        sieve(ProbabilityTable(grid_4, [0.25] * 4), 1.5)


"""Test tie-breaking"""


def test_rank_indices_centre_first_on_ties():
    assert rank_indices(np.full(4, 0.25)) == [1, 2, 0, 3]
    assert rank_indices(np.full(4, 0.25), first=3) == [3, 1, 2, 0]
    assert rank_indices(np.array([0.1, 0.2, 0.6, 0.1])) == [2, 1, 0, 3]
    assert rank_indices(np.full(4, 0.25), first=[2, 0, 2]) == [2, 0, 1, 3]


def test_stable_argmax_flat_table():
    assert stable_argmax(ProbabilityTable(grid_2x2, np.full(16, 1 / 16))) == LatticePoint((1, 1))


def test_likelihood_peak():
    assert likelihood_peak(np.zeros((4, 4))) == LatticePoint((1, 1))
    log_l = peaked_oracle.grid_log_likelihood(grid_3x3)
    assert likelihood_peak(log_l) == LatticePoint((3, 4))
    # equal maxima resolve towards the centre
    log_l = np.zeros((4, 4))
    log_l[0, 0] = log_l[2, 1] = 1.0
    assert likelihood_peak(log_l) == LatticePoint((2, 1))


"""Test reduce_qubits"""


@pytest.mark.parametrize("selection", ["marginal", "joint"])
def test_reduce_qubits_keeps_the_peak(selection):
    probs = brute_force_posterior(grid_3x3, peaked_oracle)
    stage = stage_of(grid_3x3)
    sieved = sieve(probs, 0.5)
    # the peak and its four nearest neighbours
    assert sieved.count == 5
    reduced = reduce_qubits(stage, sieved, probs, selection)
    assert reduced.s == 4
    assert reduced.grid.values[0].tolist() == [2.0, 3.0, 4.0, 5.0]
    assert reduced.grid.values[1].tolist() == [2.0, 3.0, 4.0, 5.0]


def test_reduce_qubits_single_qubit_floor():
    probs = brute_force_posterior(grid_2x2, sharp_oracle)
    sieved = sieve(probs, 1.0)
    reduced = reduce_qubits(stage_of(grid_2x2), sieved, probs)
    assert reduced.grid.qubits == (1, 1)
    best = probs.grid.point_values(probs.argmax())
    for p in range(2):
        assert best[p] in reduced.grid.values[p]
        assert set(reduced.grid.values[p]) <= set(grid_2x2.values[p])


def test_reduce_qubits_keeps_the_likelihood_peak():
    # probability mass favours the corner while the likelihood peaks at the far corner
    probs = ProbabilityTable(grid_2x2, np.r_[0.2, np.full(15, 0.8 / 15)])
    log_l = np.zeros((4, 4))
    log_l[3, 3] = 1.0
    sieved = sieve(probs, 1.0)
    assert sieved.count == 1
    without = reduce_qubits(stage_of(grid_2x2), sieved, probs)
    assert without.grid.values[0].tolist() == pytest.approx([0.0, 7 / 3])
    reduced = reduce_qubits(stage_of(grid_2x2), sieved, probs, log_likelihood=log_l)
    for p in range(2):
        assert reduced.grid.values[p].tolist() == pytest.approx([0.0, 7.0])
    joint = reduce_qubits(stage_of(grid_2x2), sieved, probs, "joint", log_likelihood=log_l)
    for p in range(2):
        assert joint.grid.values[p][-1] == pytest.approx(7.0)


def test_reduce_qubits_log_likelihood_shape_checked():
    probs = brute_force_posterior(grid_2x2, peaked_oracle)
    with pytest.raises(ValueError):
        reduce_qubits(stage_of(grid_2x2), sieve(probs, 0.5), probs, log_likelihood=np.zeros((8, 8)))


def test_reduce_qubits_at_floor():
    grid = build_lattice([spec_x, spec_y], [1, 1])
    probs = ProbabilityTable(grid, np.full(4, 0.25))
    with pytest.raises(ValueError):
        reduce_qubits(stage_of(grid), sieve(probs, 0.5), probs)


def test_reduce_qubits_unknown_selection():
    probs = brute_force_posterior(grid_3x3, peaked_oracle)
    with pytest.raises(ValueError):
        reduce_qubits(stage_of(grid_3x3), sieve(probs, 0.5), probs, "best")


def test_renorm_stage_size_checked():
    with pytest.raises(ValueError):
        RenormStage(s=5, grid=grid_3x3)


"""Test quantum_metropolis"""


def test_zero_steps_is_uniform():
    probs = quantum_metropolis(stage_of(grid_3x3), peaked_oracle, 0, 0.5)
    assert np.allclose(probs.probabilities, 1 / 64)


def test_flat_likelihood_is_uniform():
    probs = quantum_metropolis(stage_of(grid_2x2), flat_oracle, 4, 0.5)
    assert np.allclose(probs.probabilities, 1 / 16, atol=1e-12)


def test_per_step_beta():
    probs = quantum_metropolis(stage_of(grid_2x2), peaked_oracle, 2, [1.0, 0.5])
    assert probs.total() == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        quantum_metropolis(stage_of(grid_2x2), peaked_oracle, 3, [1.0, 0.5])


def test_shots_need_generator():
    with pytest.raises(ValueError):
        quantum_metropolis(stage_of(grid_2x2), peaked_oracle, 1, 0.5, shots=100)


def test_qubit_cap_propagates():
    with pytest.raises(QubitCapExceeded):
        quantum_metropolis(stage_of(grid_3x3), peaked_oracle, 1, 0.5, qubit_cap=10)


def test_dump_written(tmp_path):
    path = tmp_path / "stage.qbsv"
    quantum_metropolis(stage_of(grid_2x2), peaked_oracle, 1, 0.5, dump_path=path, iteration=4)
    state, iteration = load_state(path, (2, 2))
    assert iteration == 4
    assert state.norm() == pytest.approx(1.0)


def test_renormalization_loop_keeps_grid_argmax():
    stage = stage_of(grid_3x3)
    while True:
        probs = quantum_metropolis(stage, sharp_oracle, 1, 0.5)
        assert stage.grid.point_values(probs.argmax()) == (3.0, 4.0)
        if stage.s == 2:
            break
        stage = reduce_qubits(stage, sieve(probs, 0.5), probs)
    (mean_x, _), (mean_y, _) = summarize(probs)
    # final grid {3, 4} x {3, 4}, joint mass 1/2 on the peak and 0 on (4, 3)
    assert mean_x == pytest.approx(3.25)
    assert mean_y == pytest.approx(3.75)


"""Test convergence_trace"""


def test_convergence_trace_shape():
    reference = brute_force_posterior(grid_2x2, peaked_oracle, beta=1.0)
    trace = convergence_trace(grid_2x2, peaked_oracle, 1.0, [2, 0, 1], reference)
    assert [steps for steps, _, _ in trace] == [0, 1, 2]
    uniform = ProbabilityTable(grid_2x2, np.full(16, 1 / 16))
    assert trace[0][1] == pytest.approx(tv_distance(uniform, reference))
    assert all(0 <= tv <= 1 for _, tv, _ in trace)


def test_convergence_trace_sharp_argmax():
    reference = brute_force_posterior(grid_3x3, sharp_oracle, beta=0.5)
    trace = convergence_trace(grid_3x3, sharp_oracle, 0.5, [1], reference)
    assert trace[0][2] == reference.argmax()


def test_convergence_trace_approaches_grid_posterior():
    # small beta keeps the walk in its mixing regime on this lattice
    reference = brute_force_posterior(grid_2x2, peaked_oracle, beta=0.05)
    trace = convergence_trace(grid_2x2, peaked_oracle, 0.05, [1, 2, 4, 8], reference)
    distances = [tv for _, tv, _ in trace]
    for before, after in zip(distances, distances[1:]):
        assert after <= before + 0.02
    assert distances[-1] < distances[0]
    assert trace[-1][2] == reference.argmax() == LatticePoint((1, 2))


def test_walk_argmax_matches_grid_posterior():
    reference = brute_force_posterior(grid_2x2, peaked_oracle, beta=0.05)
    probs = quantum_metropolis(stage_of(grid_2x2), peaked_oracle, 4, 0.05)
    assert probs.argmax() == reference.argmax()
