import logging
from pathlib import Path
from typing import Annotated, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import Field, validate_call

from qbirdpe.baselines.metrics import tv_distance
from qbirdpe.gwsignal.likelihood import LatticeOracle
from qbirdpe.lattice.grid import lattice_from_values
from qbirdpe.models.lattice import LatticeGrid, LatticePoint, ProbabilityTable
from qbirdpe.models.run import RenormStage, SieveResult
from qbirdpe.qwalk.acceptance import acceptance_from_log_likelihood
from qbirdpe.qwalk.layout import DEFAULT_QUBIT_CAP, layout_for_grid
from qbirdpe.qwalk.measurement import dump_state, s_marginal, sample_marginal
from qbirdpe.qwalk.operators import apply_W, init_state

logger = logging.getLogger(__name__)

# probabilities closer than this (relative to the maximum) count as ties
TIE_DECIMALS = 12


def _as_step_betas(beta: Union[float, Sequence[float]], walk_steps: int) -> List[float]:
    if isinstance(beta, (int, float)):
        return [float(beta)] * walk_steps
    betas = [float(b) for b in beta]
    if len(betas) != walk_steps:
        raise ValueError(f"Got {len(betas)} beta values for {walk_steps} walk steps.")
    return betas


def quantum_metropolis(
    stage: RenormStage,
    oracle: LatticeOracle,
    walk_steps: int,
    beta: Union[float, Sequence[float]],
    ancilla_qubits: int = 3,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
    shots: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    dump_path: Optional[Path] = None,
    iteration: int = 0,
) -> ProbabilityTable:
    """
    Applies W walk_steps times to the uniform state of the stage grid.

    Parameters:
    - stage (RenormStage): Current renormalization stage.
    - oracle (LatticeOracle): Log-likelihood source.
    - walk_steps (int): Number L of walk operator applications.
    - beta (float or sequence): Shared beta, or one value per step.
    - ancilla_qubits (int): Acceptance register size a.
    - qubit_cap (int): Largest layout the simulation accepts.
    - shots (int): When given, the exact marginal is replaced by a shot estimate.
    - rng (np.random.Generator): Source of shot randomness.
    - dump_path (Path): Optional statevector dump of the final state.
    - iteration (int): Outer iteration written into the dump header.

    Returns:
    - ProbabilityTable: State-register distribution over the stage grid.
    """
    if walk_steps < 0:
        raise ValueError(f"walk_steps must be non-negative, got {walk_steps}.")
    grid = stage.grid
    state = init_state(layout_for_grid(grid, ancilla_qubits), qubit_cap)
    betas = _as_step_betas(beta, walk_steps)

    log_l = oracle.grid_log_likelihood(grid) if walk_steps else None
    tables = {}
    for b in betas:
        if b not in tables:
            tables[b] = acceptance_from_log_likelihood(grid, log_l, b, ancilla_qubits)
        state = apply_W(state, tables[b])

    if dump_path is not None:
        dump_state(state, dump_path, iteration)

    probs = s_marginal(state, grid)
    if abs(probs.total() - 1) > 1e-9:
        raise RuntimeError(f"Walk lost probability mass: total {probs.total()}.")
    if shots is not None:
        if rng is None:
            raise ValueError("Shot sampling needs a random generator.")
        probs = sample_marginal(probs, shots, rng)
    return probs


def sieve(probs: ProbabilityTable, alpha: float) -> SieveResult:
    """
    Keeps every point with probability >= alpha * max probability (ties included).
    """
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}.")
    values = probs.probabilities
    if values.size == 0:
        raise ValueError("Cannot sieve an empty probability table.")
    p_max = float(values.max())
    threshold = alpha * p_max
    mask = values >= threshold - 10.0**-TIE_DECIMALS * p_max
    return SieveResult(alpha=alpha, mask=mask, max_probability=p_max)


@validate_call
def reduction_size(
    s: Annotated[int, Field(ge=1)],
    n_params: Annotated[int, Field(ge=1)],
    n_survivors: Annotated[int, Field(ge=1)],
) -> Tuple[int, int]:
    """
    Next state-register size after a sieve.

    Parameters:
        s (int): Current state qubits.
        n_params (int): Number of parameters P.
        n_survivors (int): Size of the sieve set |S_h(s)|.

    Returns:
        Tuple[int, int]: (s' = max[P, min(ceil(log2 |S_h|), s - P)], s' rounded up to a multiple of P).
    """
    ceil_log2 = (n_survivors - 1).bit_length()
    raw = max(n_params, min(ceil_log2, s - n_params))
    rounded = -(-raw // n_params) * n_params
    return raw, rounded


def _tie_rounded(values: np.ndarray) -> np.ndarray:
    peak = values.max()
    if peak <= 0:
        return np.zeros_like(values)
    return np.round(values / peak, TIE_DECIMALS)


def _closest_to_centre(candidates: np.ndarray, shape: Tuple[int, ...]) -> LatticePoint:
    centre = (np.asarray(shape) - 1) / 2
    distances = np.abs(candidates - centre).sum(axis=1)
    best = candidates[np.lexsort(candidates.T[::-1].tolist() + [distances])[0]]
    return LatticePoint(tuple(int(k) for k in best))


def stable_argmax(probs: ProbabilityTable) -> LatticePoint:
    """
    Joint argmax; ties go to the point closest to the centre of the index box.
    """
    rounded = _tie_rounded(probs.probabilities)
    return _closest_to_centre(np.argwhere(rounded == rounded.max()), probs.grid.shape)


def likelihood_peak(log_likelihood: np.ndarray) -> LatticePoint:
    """
    Lattice point of the largest log-likelihood, with the same centre tie rule.
    """
    log_likelihood = np.asarray(log_likelihood, dtype=float)
    top = log_likelihood.max()
    tolerance = 10.0**-TIE_DECIMALS * max(1.0, abs(top))
    return _closest_to_centre(np.argwhere(log_likelihood >= top - tolerance), log_likelihood.shape)


def rank_indices(
    marginal: np.ndarray, first: Union[int, Sequence[int], None] = None
) -> List[int]:
    """
    Indices ordered by decreasing probability, ties broken toward the centre.

    first, when given, is moved to the front; a sequence of indices keeps its order.
    """
    n = len(marginal)
    idx = np.arange(n)
    order = np.lexsort((idx, np.abs(idx - (n - 1) / 2), -_tie_rounded(marginal)))
    ranked = [int(k) for k in order]
    if first is None:
        return ranked
    pinned = [first] if isinstance(first, (int, np.integer)) else list(first)
    pinned = list(dict.fromkeys(int(k) for k in pinned))
    return pinned + [k for k in ranked if k not in pinned]


def _marginal_survivors(
    probs: ProbabilityTable, qubits: Sequence[int], anchors: Sequence[LatticePoint]
) -> List[List[int]]:
    kept = []
    for p, q in enumerate(qubits):
        ranked = rank_indices(probs.marginal(p), first=[a.indices[p] for a in anchors])
        kept.append(sorted(ranked[: 2**q]))
    return kept


def _joint_survivors(
    probs: ProbabilityTable, raw: int, caps: Sequence[int], anchors: Sequence[LatticePoint]
) -> List[List[int]]:
    grid = probs.grid
    flat = _tie_rounded(probs.probabilities).ravel()
    order = np.lexsort((np.arange(flat.size), -flat))[: 2**raw]
    top = np.array(np.unravel_index(order, grid.shape))
    kept = []
    for p, cap in enumerate(caps):
        pinned = [a.indices[p] for a in anchors]
        ranked = rank_indices(probs.marginal(p), first=pinned)
        present = set(int(k) for k in top[p]) | set(pinned)
        chosen = [k for k in ranked if k in present]
        size = 2 ** min(cap, max(1, int(np.ceil(np.log2(max(len(chosen), 2))))))
        padding = [k for k in ranked if k not in present]
        kept.append(sorted((chosen + padding)[:size]))
    return kept


def reduce_qubits(
    stage: RenormStage,
    sieve_result: SieveResult,
    probs: ProbabilityTable,
    selection: str = "marginal",
    log_likelihood: Optional[np.ndarray] = None,
) -> RenormStage:
    """
    Downsamples the stage grid after a sieve.

    In "marginal" selection every parameter keeps its 2^Q' most probable values
    (Q' = rounded s' / P), in value order. In "joint" selection the 2^s' most
    probable joint points are embedded in the smallest covering product grid,
    padded to powers of two. The coordinates of the joint argmax always survive,
    and so do those of the likelihood peak when the stage log-likelihood is given.

    Returns:
    - RenormStage: The next stage; its s never exceeds the rounded s'.
    """
    grid = stage.grid
    n_params = grid.n_params
    if stage.s <= n_params:
        raise ValueError(f"Stage already has one qubit per parameter (s = {stage.s}).")
    if sieve_result.count < 1:
        raise RuntimeError("Sieve left no survivors; the argmax must always survive.")
    raw, rounded = reduction_size(stage.s, n_params, sieve_result.count)
    anchors = [stable_argmax(probs)]
    if log_likelihood is not None:
        if np.shape(log_likelihood) != grid.shape:
            raise ValueError(
                f"Log-likelihood shape {np.shape(log_likelihood)} does not match grid {grid.shape}."
            )
        anchors.append(likelihood_peak(log_likelihood))

    if selection == "marginal":
        qubits = [min(rounded // n_params, q) for q in grid.qubits]
        kept = _marginal_survivors(probs, qubits, anchors)
    elif selection == "joint":
        caps = [max(1, q - 1) for q in grid.qubits]
        kept = _joint_survivors(probs, raw, caps, anchors)
    else:
        raise ValueError(f"Unknown survivor selection {selection!r}.")

    values = [grid.values[p][k] for p, k in enumerate(kept)]
    new_grid = lattice_from_values(grid.params, values)
    return RenormStage(s=new_grid.state_qubits, grid=new_grid)


def convergence_trace(
    grid: LatticeGrid,
    oracle: LatticeOracle,
    beta: float,
    checkpoints: Sequence[int],
    reference: ProbabilityTable,
    ancilla_qubits: int = 3,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> List[Tuple[int, float, LatticePoint]]:
    """
    TV distance between the state-register marginal and a reference table
    after each checkpoint number of walk steps.

    Returns:
    - List of (steps, tv distance, marginal argmax) per checkpoint.
    """
    state = init_state(layout_for_grid(grid, ancilla_qubits), qubit_cap)
    table = acceptance_from_log_likelihood(
        grid, oracle.grid_log_likelihood(grid), beta, ancilla_qubits
    )
    trace = []
    done = 0
    for target in sorted(checkpoints):
        for _ in range(target - done):
            state = apply_W(state, table)
        done = target
        marginal = s_marginal(state, grid)
        trace.append((target, tv_distance(marginal, reference), marginal.argmax()))
    return trace
