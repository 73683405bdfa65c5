import dataclasses

import numpy as np
import pytest

from metriplectic_rom import (
    GasParams,
    RodParams,
    gas_system,
    rod_initial_condition,
    rod_system,
)
from metriplectic_rom.config import default_config
from metriplectic_rom.pipelines import run_training


@pytest.fixture(scope="session")
def gas():
    return gas_system(GasParams())


@pytest.fixture(scope="session")
def small_rod_params():
    return RodParams(n_points=6)


@pytest.fixture(scope="session")
def small_rod(small_rod_params):
    return rod_system(small_rod_params)


@pytest.fixture(scope="session")
def small_rod_x0(small_rod_params):
    return rod_initial_condition(0.65, -0.1, 1.9, small_rod_params)


@pytest.fixture(scope="session")
def tiny_gas_config():
    """Short gas protocol for unit tests: 5 trajectories over [0, 2]."""
    cfg = default_config("gas")
    return dataclasses.replace(
        cfg,
        training=dataclasses.replace(cfg.training, num_trajectories=5, horizon=2.0),
        evaluation=dataclasses.replace(cfg.evaluation, horizons=(2.0,), n_values=(2, 3, 4)),
    )


@pytest.fixture(scope="session")
def tiny_gas_training(tiny_gas_config):
    return run_training(tiny_gas_config, persist=False)


@pytest.fixture(scope="session")
def gas_ic_rng():
    return np.random.default_rng(424242)


def random_gas_states(count, seed=7):
    from metriplectic_rom import gas_sample_ics

    return gas_sample_ics(seed, count)


def random_rod_states(params, count, seed=7):
    from metriplectic_rom import rod_sample_params

    draws = rod_sample_params(seed, count)
    return np.array([rod_initial_condition(*row, params=params) for row in draws])
