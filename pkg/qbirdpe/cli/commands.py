import json
import logging
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from qbirdpe.baselines.classical_mh import classical_mh, read_samples_csv, write_samples_csv
from qbirdpe.baselines.grid_posterior import brute_force_posterior, write_posterior_csv
from qbirdpe.baselines.metrics import (
    credible_interval,
    tv_distance,
    weighted_credible_interval,
    weighted_histogram,
    weighted_mean_std,
)
from qbirdpe.cli.config import snapshot
from qbirdpe.gwsignal.injection import generate_injection
from qbirdpe.gwsignal.io import read_psd_csv, read_series_csv, write_series_csv
from qbirdpe.gwsignal.likelihood import LikelihoodOracle
from qbirdpe.gwsignal.psd import PsdModel
from qbirdpe.gwsignal.waveform import ToyInspiral
from qbirdpe.lattice.grid import build_lattice
from qbirdpe.models.run import IterationRecord, RunConfig, RunManifest
from qbirdpe.models.signal import FrequencySeries
from qbirdpe.qbird.sampler import run_qbird

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
SAMPLERS = ("qbird", "mh", "grid")


def code_version() -> str:
    try:
        return version("qbirdpe")
    except PackageNotFoundError:
        return "unknown"


def build_psd(config: RunConfig) -> PsdModel:
    settings = config.psd
    if settings.kind == "tabulated":
        return read_psd_csv(settings.path)
    return PsdModel(
        kind=settings.kind, level=settings.level, scale=settings.scale, knee=settings.knee
    )


def build_oracle(config: RunConfig, data: FrequencySeries) -> LikelihoodOracle:
    """
    Likelihood of the inferred parameters; the others stay at their injected values.
    """
    model = ToyInspiral(truncate_at_isco=config.waveform.truncate_at_isco)
    return LikelihoodOracle(
        data,
        build_psd(config),
        fixed=config.injection,
        model=model,
        workers=config.data.workers,
    )


def _write_json(payload: Dict[str, Any], path: Path) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def cmd_inject(config: RunConfig, out: PathLike) -> List[Path]:
    """
    Writes the injected data (data.csv) and the truth file (truth.json).
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    waveform = config.waveform
    logger.info("Injecting %s into %s noise", config.injection.model_dump(), config.noise.kind)
    data = generate_injection(
        config.injection,
        build_psd(config),
        waveform.f_start,
        waveform.delta_f,
        waveform.n_nodes,
        noise=config.noise.kind,
        seed=config.noise.seed,
        model=ToyInspiral(truncate_at_isco=waveform.truncate_at_isco),
    )
    data_path = write_series_csv(data, out / "data.csv")
    truth = {
        "injection": config.injection.model_dump(),
        "noise": config.noise.kind,
        "noise_seed": config.noise.seed,
        "parameters": {name: list(bounds) for name, bounds in config.parameters.items()},
    }
    truth_path = _write_json(truth, out / "truth.json")
    logger.info("Wrote %s and %s", data_path, truth_path)
    return [data_path, truth_path]


def load_data(config: RunConfig, out: Path) -> FrequencySeries:
    path = Path(config.data.strain_path) if config.data.strain_path else out / "data.csv"
    if not path.exists():
        raise FileNotFoundError(f"Data file {path} does not exist; run 'inject' first.")
    return read_series_csv(path, delta_f=config.waveform.delta_f)


def cmd_run(config: RunConfig, sampler: str, out: PathLike, command: str = "run") -> RunManifest:
    """
    Runs one sampler on the data and writes its outputs plus manifest_<sampler>.json.
    """
    if sampler not in SAMPLERS:
        raise ValueError(f"Unknown sampler {sampler!r}; expected one of {SAMPLERS}.")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    data = load_data(config, out)
    oracle = build_oracle(config, data)
    outputs: List[Path] = []
    seeds = {"noise": config.noise.seed}

    if sampler == "qbird":
        seeds["sampler"] = config.sampler.seed
        log_path = out / "iterations.jsonl"
        with open(log_path, "w") as handle:

            def write_record(record: IterationRecord) -> None:
                handle.write(record.model_dump_json() + "\n")

            samples, _ = run_qbird(config, oracle, on_iteration=write_record)
        outputs.append(
            write_samples_csv(
                samples.names, samples.samples, samples.iterations, out / "samples_qbird.csv"
            )
        )
        outputs.append(log_path)
    elif sampler == "mh":
        seeds["mh"] = config.mh.seed
        grid = build_lattice(config.specs, [config.sampler.qubits] * len(config.specs))
        chain = classical_mh(
            grid,
            oracle,
            config.sampler.beta.beta,
            config.mh.steps,
            seed=config.mh.seed,
            ancilla_qubits=config.sampler.ancilla_qubits if config.mh.quantize else None,
        )
        logger.info("MH acceptance rate %.3f", chain.acceptance_rate)
        burn_in = config.mh.burn_in
        outputs.append(
            write_samples_csv(
                config.names,
                chain.values(burn_in + 1),
                np.arange(burn_in + 1, chain.n_steps + 1),
                out / "samples_mh.csv",
            )
        )
    else:
        qubits = config.grid.qubits or config.sampler.qubits
        grid = build_lattice(config.specs, [qubits] * len(config.specs))
        posterior = brute_force_posterior(
            grid, oracle, config.grid_beta, config.grid.enumeration_cap
        )
        outputs.append(write_posterior_csv(posterior, out / "grid_posterior.csv"))

    manifest_path = out / f"manifest_{sampler}.json"
    manifest = RunManifest(
        command=command,
        sampler=sampler,
        config=snapshot(config),
        seeds=seeds,
        code_version=code_version(),
        outputs=[str(p) for p in outputs + [manifest_path]],
        timings={"total_seconds": time.perf_counter() - started},
    )
    manifest_path.write_text(manifest.model_dump_json(indent=2) + "\n")
    logger.info("Wrote %s", ", ".join(manifest.outputs))
    return manifest


def load_distribution(
    path: PathLike, names: List[str]
) -> Tuple[np.ndarray, Optional[np.ndarray], bool]:
    """
    Reads a samples CSV or a grid posterior CSV as (values, weights, is_samples).

    values has one column per name, in the order of names.
    """
    path = Path(path)
    with open(path) as handle:
        header = handle.readline().strip().split(",")
    if header and header[0] == "iteration":
        file_names, _, samples = read_samples_csv(path)
        if sorted(file_names) != sorted(names):
            raise ValueError(f"{path}: parameters {file_names} do not match {names}.")
        return samples[:, [file_names.index(n) for n in names]], None, True
    if header and header[0] == "idx_1" and header[-1] == "prob":
        n_params = (len(header) - 1) // 2
        if n_params != len(names):
            raise ValueError(f"{path}: holds {n_params} parameters, expected {len(names)}.")
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return table[:, n_params : 2 * n_params], table[:, -1], False
    raise ValueError(f"{path}: not a samples or grid posterior file.")


def _summary(values: np.ndarray, weights: Optional[np.ndarray], level: float) -> Dict[str, Any]:
    mean, std = weighted_mean_std(values, weights)
    if weights is None:
        lo, hi = credible_interval(values.tolist(), level)
    else:
        lo, hi = weighted_credible_interval(values, weights, level)
    return {"mean": mean, "std": std, "credible_interval": [lo, hi]}


def cmd_compare(
    config: RunConfig, samples_path: PathLike, reference_path: PathLike, out: PathLike
) -> Dict[str, Any]:
    """
    Compares a sample set against a reference; writes report.json and hist_<param>.csv.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    settings = config.compare
    names = config.names
    values_a, weights_a, _ = load_distribution(samples_path, names)
    values_b, weights_b, _ = load_distribution(reference_path, names)

    report: Dict[str, Any] = {
        "samples": str(samples_path),
        "reference": str(reference_path),
        "level": settings.level,
        "tv_threshold": settings.tv_threshold,
        "parameters": {},
    }
    for p, (name, truth) in enumerate(zip(names, config.truth())):
        value_range = config.parameters[name]
        centres, hist_a = weighted_histogram(values_a[:, p], settings.bins, value_range, weights_a)
        _, hist_b = weighted_histogram(values_b[:, p], settings.bins, value_range, weights_b)
        width = (value_range[1] - value_range[0]) / settings.bins
        hist_path = out / f"hist_{name}.csv"
        np.savetxt(
            hist_path,
            np.column_stack([centres, hist_a / width, hist_b / width]),
            delimiter=",",
            header="bin_center,density_samples,density_reference",
            comments="",
            fmt="%.17g",
        )
        summary_a = _summary(values_a[:, p], weights_a, settings.level)
        summary_b = _summary(values_b[:, p], weights_b, settings.level)
        tv = tv_distance(hist_a, hist_b)
        lo, hi = summary_a["credible_interval"]
        report["parameters"][name] = {
            "injected": truth,
            "samples": summary_a,
            "reference": summary_b,
            "tv_distance": tv,
            "injected_in_interval": bool(lo <= truth <= hi),
            "tv_pass": bool(tv < settings.tv_threshold),
        }
    report["pass"] = all(
        entry["tv_pass"] and entry["injected_in_interval"]
        for entry in report["parameters"].values()
    )
    _write_json(report, out / "report.json")
    logger.info("Comparison written to %s (pass=%s)", out / "report.json", report["pass"])
    return report
