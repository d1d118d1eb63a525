import hypothesis
import numpy as np
import pytest

from bohmsim.model import Configuration, ScenarioParams, single_pointer_params

hypothesis.settings.register_profile(
    "suite", max_examples=50, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("suite")


@pytest.fixture(scope="session")
def fig2_params() -> ScenarioParams:
    return single_pointer_params(10, 10, 1, 1, 1, 3, Xi=0.0, n_particles=1)


@pytest.fixture(scope="session")
def fig3_params() -> ScenarioParams:
    return single_pointer_params(10, 10, 1, 1, 1, 3, Xi=10.0, n_particles=1)


@pytest.fixture(scope="session")
def fig4_params() -> ScenarioParams:
    return single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=10.0, n_particles=1)


def fig4_n_particles(n: int) -> ScenarioParams:
    return single_pointer_params(10, 10, 1, 0.2, 1, 3, Xi=10.0, n_particles=n)


def spread_z0(n: int, sigma_hat0: float = 0.0) -> tuple[float, ...]:
    """n distinct pointer starts whose scaled sum is exactly sigma_hat0."""
    if n == 1:
        return (sigma_hat0,)
    dev = 0.2 * np.linspace(-1.0, 1.0, n)
    dev -= dev.mean()
    return tuple(dev + sigma_hat0 / np.sqrt(n))


def config(t, x, y, z=()) -> Configuration:
    return Configuration(t, x, y, tuple(z))
