import pytest

from phformation import load_bundled_scenario, run


@pytest.fixture(scope="session")
def golden_scenario():
    """The bundled three-agent triangle experiment."""
    return load_bundled_scenario("triangle")


@pytest.fixture(scope="session")
def golden_run(golden_scenario):
    """One full proposed-controller run of the triangle scenario."""
    return run(golden_scenario)


@pytest.fixture(scope="session")
def tight_scenario():
    """Small-span variant that converges within seconds of simulated time."""
    return load_bundled_scenario("tight_triangle")


@pytest.fixture(scope="session")
def tight_run(tight_scenario):
    return run(tight_scenario)
