import pytest

from fkdv import SolverConfig, build_series, measure_tail, solve, sweep

SWEEP_EPSILONS = [0.08, 0.10, 0.12, 0.15]


@pytest.fixture(scope="session")
def table30():
    return build_series(30)


@pytest.fixture(scope="session")
def tail_sweep():
    """(config, solution, measurement) at h = eps/20 for the standard sweep."""
    return sweep(SWEEP_EPSILONS, h_factor=20.0)


@pytest.fixture(scope="session")
def tail_sweep_half():
    """Same sweep at h = eps/40, for discretization-error estimates."""
    return sweep(SWEEP_EPSILONS, h_factor=40.0)
