import math

import pytest
from hypothesis import HealthCheck, settings

from latticescatter.config import EXAMPLE_CONFIG, parse_config
from latticescatter.green import GreenEngine

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def engine_sqrt2():
    """k = sqrt(2), eps = 1e-6, serving lattice distances up to 60."""
    return GreenEngine.build(SQRT2, 1e-6, max_distance=60)


@pytest.fixture(scope="session")
def engine_eps3():
    """k = sqrt(2), eps = 1e-3, for comparisons with the quadrature oracle."""
    return GreenEngine.build(SQRT2, 1e-3, max_distance=20)


@pytest.fixture(scope="session")
def example_config():
    return parse_config(EXAMPLE_CONFIG)


@pytest.fixture(scope="session")
def example_spec(example_config):
    return example_config.problem()


@pytest.fixture(scope="session")
def example_solution(example_spec):
    from latticescatter.solver import solve

    system, engine = solve(example_spec)
    return system, engine
