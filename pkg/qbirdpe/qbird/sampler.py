"""
Outer qBIRD loop: lattice construction, renormalization down to one qubit per
parameter, summarization and interval shrinking, repeated for a fixed number
of iterations.
"""

import logging
import time
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np

from qbirdpe.gwsignal.likelihood import LatticeOracle
from qbirdpe.lattice.grid import build_lattice, draw_lattice
from qbirdpe.models.lattice import LatticeGrid
from qbirdpe.models.run import (
    IterationRecord,
    PosteriorSamples,
    RenormStage,
    RunConfig,
    StageRecord,
)
from qbirdpe.qbird.renormalization import (
    likelihood_peak,
    quantum_metropolis,
    reduce_qubits,
    reduction_size,
    sieve,
    stable_argmax,
)
from qbirdpe.qbird.summary import summarize, update_interval

logger = logging.getLogger(__name__)


def _retains(values: Tuple[float, ...], next_grid: LatticeGrid) -> bool:
    return all(np.any(next_grid.values[p] == v) for p, v in enumerate(values))


def run_qbird(
    config: RunConfig,
    oracle: LatticeOracle,
    on_iteration: Optional[Callable[[IterationRecord], None]] = None,
) -> Tuple[PosteriorSamples, List[IterationRecord]]:
    """
    Runs the qBIRD sampler.

    Parameters:
    - config (RunConfig): Validated run configuration; the sampler section drives the loop.
    - oracle (LatticeOracle): Log-likelihood of the named parameter values.
    - on_iteration (callable): Called with every IterationRecord as it is produced.

    Returns:
    - Tuple[PosteriorSamples, List[IterationRecord]]: Post burn-in means and the
      full iteration log.
    """
    settings = config.sampler
    specs = config.specs
    n_params = len(specs)
    qubits = [settings.qubits] * n_params
    rng = np.random.default_rng(settings.seed)
    shots = settings.shots if settings.measurement == "shots" else None
    dump_dir = Path(settings.dump_dir) if settings.dump_dir else None
    if dump_dir is not None:
        dump_dir.mkdir(parents=True, exist_ok=True)

    intervals = [(spec.lower, spec.upper) for spec in specs]
    records: List[IterationRecord] = []
    logger.info(
        "qBIRD: %d parameters, Q=%d, L=%d, %d iterations (burn-in %d)",
        n_params,
        settings.qubits,
        settings.walk_steps,
        settings.iterations,
        settings.burn_in,
    )

    for iteration in range(settings.iterations):
        started = time.perf_counter()
        current = [spec.with_bounds(lo, hi) for spec, (lo, hi) in zip(specs, intervals)]
        if settings.draw_mode == "random":
            grid = draw_lattice(current, qubits, rng)
        else:
            grid = build_lattice(current, qubits)
        stage = RenormStage(s=grid.state_qubits, grid=grid)
        betas = settings.beta.step_values(iteration, settings.walk_steps)

        stages: List[StageRecord] = []
        while True:
            dump_path = None
            if dump_dir is not None:
                dump_path = dump_dir / f"iter{iteration:05d}_s{stage.s:02d}.qbsv"
            probs = quantum_metropolis(
                stage,
                oracle,
                settings.walk_steps,
                betas,
                ancilla_qubits=settings.ancilla_qubits,
                qubit_cap=settings.qubit_cap,
                shots=shots,
                rng=rng,
                dump_path=dump_path,
                iteration=iteration,
            )
            if stage.s == n_params:
                break
            sieved = sieve(probs, settings.alpha)
            if sieved.count < 1:
                raise RuntimeError(f"Iteration {iteration}: sieve at s={stage.s} kept no point.")
            raw, rounded = reduction_size(stage.s, n_params, sieved.count)
            # cached by the oracle during the walk
            log_l = oracle.grid_log_likelihood(stage.grid)
            best = stage.grid.point_values(stable_argmax(probs))
            peak = stage.grid.point_values(likelihood_peak(log_l))
            next_stage = reduce_qubits(
                stage, sieved, probs, settings.selection, log_likelihood=log_l
            )
            retained = _retains(best, next_stage.grid)
            if not retained:
                raise RuntimeError(f"Iteration {iteration}: argmax lost at s={stage.s}.")
            if not _retains(peak, next_stage.grid):
                raise RuntimeError(f"Iteration {iteration}: likelihood peak lost at s={stage.s}.")
            if next_stage.s >= stage.s:
                raise RuntimeError(
                    f"Iteration {iteration}: reduction did not shrink s={stage.s}."
                )
            stages.append(
                StageRecord(
                    s=stage.s,
                    n_survivors=sieved.count,
                    s_raw=raw,
                    s_next=rounded,
                    argmax_retained=retained,
                )
            )
            logger.debug("Iteration %d stage: %s", iteration, stages[-1].model_dump())
            stage = next_stage

        summaries = summarize(probs)
        record = IterationRecord(
            iteration=iteration,
            means=[mean for mean, _ in summaries],
            stds=[std for _, std in summaries],
            intervals=intervals,
            beta=settings.beta.value(iteration),
            walk_steps=settings.walk_steps,
            stages=stages,
            wall_time=time.perf_counter() - started,
        )
        records.append(record)
        if on_iteration is not None:
            on_iteration(record)

        intervals = [
            update_interval(
                spec, mean, std, settings.interval_factor, settings.min_width_fraction
            )
            for spec, (mean, std) in zip(specs, summaries)
        ]
        if (iteration + 1) % settings.log_every == 0:
            logger.info(
                "Iteration %d/%d: means %s",
                iteration + 1,
                settings.iterations,
                ", ".join(f"{n}={m:.6g}" for n, m in zip(config.names, record.means)),
            )

    kept = records[settings.burn_in :]
    samples = PosteriorSamples(
        names=config.names,
        samples=np.array([r.means for r in kept], dtype=float).reshape(len(kept), n_params),
        iterations=np.array([r.iteration for r in kept], dtype=int),
        burn_in=settings.burn_in,
        config=config.model_dump(mode="json"),
    )
    logger.info("qBIRD finished: %d samples kept", samples.n_samples)
    return samples, records
