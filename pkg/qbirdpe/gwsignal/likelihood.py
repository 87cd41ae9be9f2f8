import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Annotated, Callable, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import Field, validate_call

from qbirdpe.gwsignal.psd import PsdModel
from qbirdpe.gwsignal.waveform import WaveformModel, toy_model
from qbirdpe.lattice.grid import check_point, prior_density
from qbirdpe.models.lattice import LatticeGrid, LatticePoint
from qbirdpe.models.signal import FrequencySeries, SourceParams

CacheKey = Tuple[Tuple[str, float], ...]


def gaussian_log_likelihood(
    data: FrequencySeries, template: FrequencySeries, psd_values: np.ndarray
) -> float:
    """
    Pure quadratic form -1/2 * sum_i |d(f_i) - h(f_i)|^2 / S_n(f_i).

    The normalization constant of the Gaussian is dropped.
    """
    data.check_compatible(template)
    psd_values = np.asarray(psd_values, dtype=float)
    if psd_values.shape != data.values.shape:
        raise ValueError(
            f"PSD has {psd_values.size} nodes, data has {data.n_nodes}."
        )
    residual = data.values - template.values
    return float(-0.5 * np.sum(np.abs(residual) ** 2 / psd_values))


@validate_call
def metropolis_acceptance(
    delta_log_likelihood: float,
    beta: Annotated[float, Field(ge=0)],
    log_prior_ratio: float = 0.0,
) -> float:
    """
    Annealed Metropolis-Hastings acceptance min[1, prior ratio * (L_to / L_from)^beta].

    Parameters:
        delta_log_likelihood (float): logL(to) - logL(from).
        beta (float): Annealing exponent, non-negative.
        log_prior_ratio (float): log(pi(to) / pi(from)).

    Returns:
        float: Acceptance probability in [0, 1].
    """
    exponent = log_prior_ratio + (beta * delta_log_likelihood if beta > 0 else 0.0)
    return math.exp(min(0.0, exponent))


def acceptance_array(
    delta_log_likelihood: np.ndarray, beta: float, log_prior_ratio: float = 0.0
) -> np.ndarray:
    """
    Vectorized form of metropolis_acceptance.
    """
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}.")
    exponent = log_prior_ratio + beta * np.asarray(delta_log_likelihood, dtype=float)
    return np.exp(np.minimum(0.0, exponent))


class LatticeOracle(ABC):
    """
    Memoized log-likelihood over named parameter values.

    Cache entries are keyed by the (name, value) pairs of a point, so they stay
    valid when the lattice changes between iterations. With workers > 1 a grid is
    evaluated on a thread pool; concurrent writers race on insertion, and since
    the stored values are deterministic any writer wins.
    """

    def __init__(self, workers: int = 1):
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}.")
        self.workers = workers
        self._cache: Dict[CacheKey, float] = {}

    @abstractmethod
    def evaluate(self, values: Dict[str, float]) -> float:
        """
        Computes the log-likelihood for one set of parameter values, uncached.
        """

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def clear_cache(self) -> None:
        self._cache.clear()

    def log_likelihood_values(self, values: Dict[str, float]) -> float:
        key = tuple((name, float(v)) for name, v in values.items())
        cached = self._cache.get(key)
        if cached is None:
            cached = self.evaluate(dict(key))
            self._cache[key] = cached
        return cached

    def log_likelihood_at(self, grid: LatticeGrid, point: LatticePoint) -> float:
        check_point(grid, point)
        return self.log_likelihood_values(dict(zip(grid.names, grid.point_values(point))))

    def grid_log_likelihood(self, grid: LatticeGrid) -> np.ndarray:
        """
        Log-likelihood at every joint point, shaped like the grid.
        """
        names = grid.names

        def at(idx: Tuple[int, ...]) -> float:
            values = {name: float(grid.values[p][k]) for p, (name, k) in enumerate(zip(names, idx))}
            return self.log_likelihood_values(values)

        points = list(np.ndindex(*grid.shape))
        if self.workers > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(at, points))
        else:
            results = [at(idx) for idx in points]
        # ndindex walks the grid in C order
        return np.array(results, dtype=float).reshape(grid.shape)


class LikelihoodOracle(LatticeOracle):
    """
    Gaussian gravitational-wave likelihood of the data given a waveform model.

    Parameters not on the lattice are taken from fixed.
    """

    def __init__(
        self,
        data: FrequencySeries,
        psd: PsdModel,
        fixed: SourceParams,
        model: WaveformModel = toy_model,
        workers: int = 1,
    ):
        super().__init__(workers)
        self.data = data
        self.psd = psd
        self.fixed = fixed
        self.model = model
        self.frequencies = data.frequencies
        self.psd_values = psd.evaluate(self.frequencies)

    def source_params(self, values: Dict[str, float]) -> SourceParams:
        unknown = set(values) - set(SourceParams.model_fields)
        if unknown:
            raise ValueError(f"Unknown source parameters {sorted(unknown)}.")
        return SourceParams(**{**self.fixed.model_dump(), **values})

    def template(self, params: SourceParams) -> FrequencySeries:
        return FrequencySeries(
            self.data.f_start, self.data.delta_f, self.model.strain(params, self.frequencies)
        )

    def evaluate(self, values: Dict[str, float]) -> float:
        params = self.source_params(values)
        return gaussian_log_likelihood(self.data, self.template(params), self.psd_values)


class FunctionOracle(LatticeOracle):
    """
    Wraps a log-likelihood callable of the named parameter values.
    """

    def __init__(self, function: Callable[[Dict[str, float]], float], workers: int = 1):
        super().__init__(workers)
        self.function = function

    def evaluate(self, values: Dict[str, float]) -> float:
        return float(self.function(values))


def log_likelihood(
    oracle: LatticeOracle,
    point: Union[LatticePoint, SourceParams],
    grid: Optional[LatticeGrid] = None,
) -> float:
    """
    Log-likelihood of a lattice point (grid required) or of explicit source parameters.
    """
    if isinstance(point, SourceParams):
        return oracle.log_likelihood_values(point.model_dump())
    if grid is None:
        raise ValueError("A lattice point needs its grid to be resolved to values.")
    return oracle.log_likelihood_at(grid, point)


def acceptance(
    oracle: LatticeOracle,
    grid: LatticeGrid,
    from_point: LatticePoint,
    to_point: LatticePoint,
    beta: float,
) -> float:
    """
    Acceptance of the move from_point -> to_point at annealing exponent beta.
    """
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}.")
    delta = oracle.log_likelihood_at(grid, to_point) - oracle.log_likelihood_at(grid, from_point)
    log_prior_ratio = math.log(prior_density(grid, to_point) / prior_density(grid, from_point))
    return metropolis_acceptance(delta, beta, log_prior_ratio)
