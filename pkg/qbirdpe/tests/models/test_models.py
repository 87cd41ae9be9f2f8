import math

import numpy as np
import pytest
from pydantic import ValidationError

from qbirdpe.models.lattice import LatticeGrid, LatticePoint, ParameterSpec, ProbabilityTable
from qbirdpe.models.run import BetaSchedule, RunConfig, SamplerSettings, WaveformSettings
from qbirdpe.models.signal import FrequencySeries, SourceParams
from qbirdpe.models.walk import AcceptanceTable, RegisterLayout, WalkState
from qbirdpe.tests.test_data.lattices import grid_2x2, grid_3x3, spec_x, spec_y

"""Test ParameterSpec"""


def test_parameter_spec_width():
    spec = ParameterSpec(name="chirp_mass", lower=19.4, upper=19.6)
    assert math.isclose(spec.width, 0.2)
    narrowed = spec.with_bounds(19.45, 19.5)
    assert narrowed.name == "chirp_mass"
    assert (narrowed.lower, narrowed.upper) == (19.45, 19.5)


@pytest.mark.parametrize("lower, upper", [(1.0, 1.0), (2.0, 1.0)])
def test_parameter_spec_invalid_bounds(lower, upper):
    with pytest.raises(ValidationError):
        ParameterSpec(name="x", lower=lower, upper=upper)


"""Test LatticeGrid"""


def test_lattice_grid_properties():
    assert grid_2x2.shape == (4, 4)
    assert grid_2x2.n_points == 16
    assert grid_2x2.state_qubits == 4
    assert grid_2x2.names == ["x", "y"]
    assert grid_3x3.point_values(LatticePoint((3, 4))) == (3.0, 4.0)


@pytest.mark.parametrize(
    "qubits, values",
    [
        ((2,), (np.array([0.0, 1.0]),)),
        ((1,), (np.array([1.0, 0.0]),)),
        ((0,), (np.array([0.0]),)),
    ],
)
def test_lattice_grid_invalid(qubits, values):
    with pytest.raises(ValueError):
        LatticeGrid(params=(spec_x,), qubits=qubits, values=values)


def test_lattice_grid_duplicate_names():
    values = (np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        LatticeGrid(params=(spec_x, spec_x), qubits=(1, 1), values=values)


"""Test ProbabilityTable"""


def test_probability_table_marginal_and_argmax():
    probs = np.zeros((4, 4))
    probs[1, 2] = 0.7
    probs[3, 0] = 0.3
    table = ProbabilityTable(grid_2x2, probs)
    assert table.total() == pytest.approx(1.0)
    assert table.marginal(0) == pytest.approx([0, 0.7, 0, 0.3])
    assert table.marginal(1) == pytest.approx([0.3, 0, 0.7, 0])
    assert table.argmax() == LatticePoint((1, 2))
    assert table.probability(LatticePoint((3, 0))) == pytest.approx(0.3)


"""Test SourceParams and FrequencySeries"""


def test_source_params_masses():
    params = SourceParams(chirp_mass=30.0, mass_ratio=1.0)
    assert params.symmetric_mass_ratio == pytest.approx(0.25)
    assert params.total_mass == pytest.approx(30.0 * 0.25 ** (-0.6))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"chirp_mass": -1.0, "mass_ratio": 2.0},
        {"chirp_mass": 19.5, "mass_ratio": 0.0},
        {"chirp_mass": 19.5, "mass_ratio": 2.0, "inclination": 4.0},
    ],
)
def test_source_params_invalid(kwargs):
    with pytest.raises(ValidationError):
        SourceParams(**kwargs)


def test_frequency_series_band_splits_nodes():
    series = FrequencySeries(20.0, 0.5, np.arange(10) + 0j)
    low = series.band(20.0, 22.0)
    high = series.band(22.0, 25.0)
    assert low.n_nodes + high.n_nodes == series.n_nodes
    assert high.f_start == 22.0
    assert np.array_equal(np.concatenate([low.values, high.values]), series.values)


def test_frequency_series_incompatible():
    a = FrequencySeries(20.0, 0.5, np.ones(4))
    b = FrequencySeries(20.0, 0.25, np.ones(4))
    assert not a.is_compatible(b)
    with pytest.raises(ValueError):
        a.check_compatible(b)


"""Test RegisterLayout and walk containers"""


@pytest.mark.parametrize(
    "qubits, expected",
    [((6, 6), 18), ((3, 3, 3, 3), 19), ((5, 5), 16), ((2,), 7)],
)
def test_register_layout_total(qubits, expected):
    assert RegisterLayout(qubits_per_param=qubits, ancilla_qubits=3).total == expected


def test_register_layout_tensor_shape():
    layout = RegisterLayout(qubits_per_param=(2, 1, 1))
    assert layout.direction_qubits == 2
    assert layout.tensor_shape == (4, 2, 2, 4, 2, 2)


def test_walk_state_shape_checked():
    layout = RegisterLayout(qubits_per_param=(1, 1))
    with pytest.raises(ValueError):
        WalkState(layout, np.zeros((2, 2, 2, 2)))


def test_acceptance_table_quantization():
    values = np.full(grid_2x2.shape + (2, 2), 0.5)
    table = AcceptanceTable(grid=grid_2x2, ancilla_qubits=3, values=values)
    assert table.levels == 7
    assert np.allclose(table.quantized, 4 / 7)
    with pytest.raises(ValueError):
        AcceptanceTable(grid=grid_2x2, ancilla_qubits=3, values=values + 1)


"""Test run configuration"""


def test_beta_schedule_kinds():
    assert BetaSchedule(beta=0.5).value(100) == 0.5
    linear = BetaSchedule(kind="linear", beta_start=0.1, beta=0.5, ramp_iterations=4)
    assert linear.value(0) == pytest.approx(0.1)
    assert linear.value(2) == pytest.approx(0.3)
    assert linear.value(10) == pytest.approx(0.5)
    geometric = BetaSchedule(kind="geometric", beta_start=0.1, beta=0.4, ramp_iterations=2)
    assert geometric.value(1) == pytest.approx(0.2)
    stepped = BetaSchedule(beta=0.5, per_step=[1.0, 0.5])
    assert stepped.step_values(0, 2) == [0.5, 0.25]
    with pytest.raises(ValueError):
        stepped.step_values(0, 4)


def test_sampler_settings_full_scale_accepted():
    settings = SamplerSettings(
        qubits=6, beta={"beta": 0.5}, iterations=2100, walk_steps=4, burn_in=100
    )
    assert settings.iterations - settings.burn_in == 2000


@pytest.mark.parametrize(
    "kwargs",
    [
        {"iterations": 50, "burn_in": 50},
        {"alpha": 1.5},
        {"interval_factor": 0.0},
    ],
)
def test_sampler_settings_invalid(kwargs):
    with pytest.raises(ValidationError):
        SamplerSettings(**kwargs)


def test_waveform_settings_nodes():
    assert WaveformSettings().n_nodes == 1969


def _config(**overrides):
    data = {
        "parameters": {"chirp_mass": [19.4, 19.6], "mass_ratio": [1.9, 2.1]},
        "injection": {"chirp_mass": 19.5, "mass_ratio": 2.0},
    }
    data.update(overrides)
    return data


def test_run_config_specs():
    config = RunConfig.model_validate(_config())
    assert config.names == ["chirp_mass", "mass_ratio"]
    assert config.specs[0].unit_label == "Msun"
    assert config.truth() == [19.5, 2.0]


def test_run_config_grid_beta():
    config = RunConfig.model_validate(_config(sampler={"beta": {"beta": 0.05}}))
    assert config.grid_beta == 0.05
    config = RunConfig.model_validate(_config(sampler={"beta": {"beta": 0.05}}, grid={"beta": 1.0}))
    assert config.grid_beta == 1.0
    assert config.data.workers == 1


@pytest.mark.parametrize(
    "overrides",
    [
        {"parameters": {"spin": [0.0, 1.0]}},
        {"parameters": {"chirp_mass": [19.6, 19.4]}},
        {"parameters": {"chirp_mass": [20.0, 21.0]}},
        {"parameters": {"inclination": [0.0, 4.0]}},
    ],
)
def test_run_config_invalid(overrides):
    with pytest.raises(ValidationError):
        RunConfig.model_validate(_config(**overrides))


def test_grid_fixture_specs():
    assert grid_3x3.params == (spec_x, spec_y)
