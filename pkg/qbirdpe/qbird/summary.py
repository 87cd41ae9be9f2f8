import logging
from typing import Annotated, List, Tuple

import numpy as np
from pydantic import Field, validate_call

from qbirdpe.models.lattice import ParameterSpec, ProbabilityTable

logger = logging.getLogger(__name__)


def summarize(probs: ProbabilityTable) -> List[Tuple[float, float]]:
    """
    Mean and weighted standard deviation of every parameter at the final stage.

    Parameters:
    - probs (ProbabilityTable): Distribution over a grid with one qubit per parameter.

    Returns:
    - List[Tuple[float, float]]: (E, V) per parameter, with E = sum p x and
      V = sqrt(sum p (x - E)^2) over the parameter's marginal.
    """
    grid = probs.grid
    if any(q != 1 for q in grid.qubits):
        raise ValueError(
            f"Summaries need one qubit per parameter, got qubits {list(grid.qubits)}."
        )
    out = []
    for p in range(grid.n_params):
        weights = probs.marginal(p)
        values = grid.values[p]
        mean = float(np.sum(weights * values))
        var = float(np.sum(weights * (values - mean) ** 2))
        out.append((mean, float(np.sqrt(max(var, 0.0)))))
    return out


@validate_call
def update_interval(
    spec: ParameterSpec,
    mean: float,
    std: Annotated[float, Field(ge=0)],
    interval_factor: Annotated[float, Field(gt=0)],
    min_width_fraction: Annotated[float, Field(gt=0, le=1)] = 1e-6,
) -> Tuple[float, float]:
    """
    Next search interval E -/+ lambda V, clipped to the prior.

    Parameters:
        spec (ParameterSpec): Parameter with its prior interval.
        mean (float): E of the parameter.
        std (float): V of the parameter.
        interval_factor (float): lambda.
        min_width_fraction (float): Smallest width allowed, as a fraction of the prior width.

    Returns:
        Tuple[float, float]: (lower, upper) inside [spec.lower, spec.upper].
    """
    lower = max(spec.lower, mean - interval_factor * std)
    upper = min(spec.upper, mean + interval_factor * std)
    min_width = min_width_fraction * spec.width
    if upper - lower < min_width:
        logger.warning(
            "Interval of %s collapsed to width %g; widening to %g around %g",
            spec.name,
            upper - lower,
            min_width,
            mean,
        )
        lower = max(spec.lower, mean - min_width / 2)
        upper = min(spec.upper, mean + min_width / 2)
        # mean at a prior edge: push the other side out instead
        if upper - lower < min_width:
            if lower == spec.lower:
                upper = min(spec.upper, lower + min_width)
            else:
                lower = max(spec.lower, upper - min_width)
    return lower, upper
