import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from qbirdpe.models.lattice import LatticeGrid, LatticePoint, ParameterSpec
from qbirdpe.models.signal import SourceParams

# Inferable parameters and their report units
PARAMETER_UNITS = {
    "chirp_mass": "Msun",
    "mass_ratio": "",
    "luminosity_distance": "Mpc",
    "inclination": "rad",
}


class WaveformSettings(BaseModel):
    "Frequency grid and options of the waveform model"

    f_start: float = Field(20.0, gt=0, description="First frequency node (Hz)")
    f_end: float = Field(512.0, gt=0, description="Last frequency node (Hz)")
    delta_f: float = Field(0.25, gt=0, description="Node spacing (Hz)")
    truncate_at_isco: bool = Field(False, description="Zero the strain above the ISCO frequency")

    @model_validator(mode="after")
    def check_band(self) -> "WaveformSettings":
        if self.f_end < self.f_start:
            raise ValueError(f"f_end ({self.f_end}) is below f_start ({self.f_start}).")
        return self

    @property
    def n_nodes(self) -> int:
        return int(round((self.f_end - self.f_start) / self.delta_f)) + 1


class PsdSettings(BaseModel):
    kind: Literal["flat", "analytic", "tabulated"] = "analytic"
    level: float = Field(1e-46, gt=0, description="Flat PSD level (1/Hz)")
    scale: float = Field(1e-49, gt=0, description="Analytic PSD scale S0 (1/Hz)")
    knee: float = Field(215.0, gt=0, description="Analytic PSD reference frequency (Hz)")
    path: Optional[str] = Field(None, description="CSV f_hz,psd for the tabulated kind")

    @model_validator(mode="after")
    def check_path(self) -> "PsdSettings":
        if self.kind == "tabulated" and not self.path:
            raise ValueError("Tabulated PSD needs a path.")
        return self


class NoiseSettings(BaseModel):
    kind: Literal["zero", "gaussian"] = "zero"
    seed: int = Field(0, ge=0)


class DataSettings(BaseModel):
    strain_path: Optional[str] = Field(None, description="External CSV f_hz,re,im")
    workers: int = Field(1, ge=1, description="Threads evaluating the likelihood over a lattice")


class BetaSchedule(BaseModel):
    "Annealing exponent per outer iteration, optionally per walk step"

    kind: Literal["constant", "linear", "geometric"] = "constant"
    beta: float = Field(0.5, ge=0, description="Final (or constant) beta")
    beta_start: float = Field(0.05, gt=0, description="Starting beta of a ramp")
    ramp_iterations: int = Field(0, ge=0, description="Iterations over which a ramp runs")
    per_step: Optional[List[float]] = Field(
        None, description="Multipliers of beta for each of the L walk steps"
    )

    @model_validator(mode="after")
    def check_steps(self) -> "BetaSchedule":
        if self.per_step is not None and any(m < 0 for m in self.per_step):
            raise ValueError("per_step multipliers must be non-negative.")
        return self

    def value(self, iteration: int) -> float:
        if self.kind == "constant" or self.ramp_iterations == 0:
            return self.beta
        t = min(iteration / self.ramp_iterations, 1.0)
        if self.kind == "linear":
            return self.beta_start + t * (self.beta - self.beta_start)
        # geometric interpolation between beta_start and beta
        if self.beta == 0:
            return self.beta_start * (1 - t)
        return self.beta_start * (self.beta / self.beta_start) ** t

    def step_values(self, iteration: int, walk_steps: int) -> List[float]:
        beta = self.value(iteration)
        if self.per_step is None:
            return [beta] * walk_steps
        if len(self.per_step) != walk_steps:
            raise ValueError(
                f"per_step has {len(self.per_step)} entries for {walk_steps} walk steps."
            )
        return [beta * m for m in self.per_step]


class SamplerSettings(BaseModel):
    "qBIRD settings"

    qubits: int = Field(4, ge=1, description="Discretization qubits Q per parameter")
    ancilla_qubits: int = Field(3, ge=1, description="Acceptance register size a")
    walk_steps: int = Field(4, ge=0, description="Applications L of W per iteration")
    beta: BetaSchedule = Field(default_factory=BetaSchedule)
    alpha: float = Field(0.5, ge=0, le=1, description="Sieve threshold")
    interval_factor: float = Field(2.0, gt=0, description="lambda of the interval update")
    min_width_fraction: float = Field(
        1e-6, gt=0, le=1, description="Smallest interval width, as a fraction of the prior width"
    )
    iterations: int = Field(300, ge=1)
    burn_in: int = Field(50, ge=0)
    measurement: Literal["exact", "shots"] = "exact"
    shots: int = Field(100000, ge=1)
    seed: int = Field(0, ge=0)
    draw_mode: Literal["grid", "random"] = "grid"
    selection: Literal["marginal", "joint"] = "marginal"
    qubit_cap: int = Field(26, ge=1)
    dump_dir: Optional[str] = None
    log_every: int = Field(50, ge=1)

    @model_validator(mode="after")
    def check_burn_in(self) -> "SamplerSettings":
        if not self.iterations > self.burn_in:
            raise ValueError(
                f"iterations ({self.iterations}) must exceed burn_in ({self.burn_in})."
            )
        return self


class MHSettings(BaseModel):
    "Classical lattice Metropolis-Hastings settings"

    steps: int = Field(100000, ge=1)
    burn_in: int = Field(1000, ge=0)
    seed: int = Field(0, ge=0)
    quantize: bool = Field(False, description="Quantize acceptance to the ancilla size")

    @model_validator(mode="after")
    def check_burn_in(self) -> "MHSettings":
        if not self.steps > self.burn_in:
            raise ValueError(f"steps ({self.steps}) must exceed burn_in ({self.burn_in}).")
        return self


class GridSettings(BaseModel):
    enumeration_cap: int = Field(2**20, ge=1)
    beta: Optional[float] = Field(
        None, ge=0, description="Annealing exponent of the reference posterior; sampler beta when unset"
    )
    qubits: Optional[int] = Field(None, ge=1, description="Qubits per parameter; sampler.qubits when unset")


class CompareSettings(BaseModel):
    bins: int = Field(32, ge=1)
    level: float = Field(0.9, gt=0, lt=1)
    tv_threshold: float = Field(0.1, gt=0, le=1)


class RunConfig(BaseModel):
    "Complete, validated run configuration"

    parameters: Dict[str, Tuple[float, float]]
    injection: SourceParams
    waveform: WaveformSettings = Field(default_factory=WaveformSettings)
    psd: PsdSettings = Field(default_factory=PsdSettings)
    noise: NoiseSettings = Field(default_factory=NoiseSettings)
    data: DataSettings = Field(default_factory=DataSettings)
    sampler: SamplerSettings = Field(default_factory=SamplerSettings)
    mh: MHSettings = Field(default_factory=MHSettings)
    grid: GridSettings = Field(default_factory=GridSettings)
    compare: CompareSettings = Field(default_factory=CompareSettings)

    @model_validator(mode="after")
    def check_parameters(self) -> "RunConfig":
        if not self.parameters:
            raise ValueError("At least one parameter must be inferred.")
        for name, (lower, upper) in self.parameters.items():
            if name not in PARAMETER_UNITS:
                raise ValueError(
                    f"Unknown parameter {name!r}; expected one of {sorted(PARAMETER_UNITS)}."
                )
            if not lower < upper:
                raise ValueError(f"Prior of {name!r}: lower ({lower}) must be below upper ({upper}).")
            if name == "inclination":
                if lower < 0 or upper > math.pi:
                    raise ValueError("Inclination prior must lie inside [0, pi].")
            elif lower <= 0:
                raise ValueError(f"Prior of {name!r} must be positive.")
            truth = getattr(self.injection, name)
            if not lower <= truth <= upper:
                raise ValueError(f"Injected {name} = {truth} lies outside its prior [{lower}, {upper}].")
        return self

    @property
    def specs(self) -> List[ParameterSpec]:
        return [
            ParameterSpec(name=name, lower=lo, upper=hi, unit_label=PARAMETER_UNITS[name])
            for name, (lo, hi) in self.parameters.items()
        ]

    @property
    def names(self) -> List[str]:
        return list(self.parameters)

    def truth(self) -> List[float]:
        return [getattr(self.injection, name) for name in self.parameters]

    @property
    def grid_beta(self) -> float:
        "Tempering of the reference posterior, the sampler target unless set"
        if self.grid.beta is not None:
            return self.grid.beta
        return self.sampler.beta.beta


@dataclass(eq=False)
class RenormStage:
    """
    One renormalization stage: s state qubits over the surviving product grid.
    """

    s: int
    grid: LatticeGrid

    def __post_init__(self):
        if self.s != self.grid.state_qubits:
            raise ValueError(f"Stage size {self.s} does not match grid qubits {self.grid.state_qubits}.")

    @property
    def survivors(self) -> List[np.ndarray]:
        return list(self.grid.values)


@dataclass(eq=False)
class SieveResult:
    alpha: float
    mask: np.ndarray
    max_probability: float

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def survivors(self) -> List[LatticePoint]:
        return [LatticePoint(idx) for idx in zip(*np.nonzero(self.mask))]


class StageRecord(BaseModel):
    s: int
    n_survivors: int
    s_raw: int = Field(..., description="s' from the reduction formula")
    s_next: int = Field(..., description="s' rounded up to a multiple of P")
    argmax_retained: bool


class IterationRecord(BaseModel):
    iteration: int
    means: List[float]
    stds: List[float]
    intervals: List[Tuple[float, float]]
    beta: float
    walk_steps: int
    stages: List[StageRecord] = Field(default_factory=list)
    wall_time: float = 0.0


@dataclass(eq=False)
class PosteriorSamples:
    """
    Per-iteration means kept after burn-in; samples has one column per parameter.
    """

    names: List[str]
    samples: np.ndarray
    iterations: np.ndarray
    burn_in: int
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> np.ndarray:
        return self.samples[:, self.names.index(name)]


class RunManifest(BaseModel):
    command: str
    sampler: Optional[str] = None
    config: Dict[str, Any]
    seeds: Dict[str, int]
    code_version: str
    outputs: List[str] = Field(default_factory=list)
    timings: Dict[str, float] = Field(default_factory=dict)
