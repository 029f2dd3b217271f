import pytest

from hybrid_orbit.fixtures import from_catalog, paper_fixture
from hybrid_orbit.integrator import IntegratorConfig


@pytest.fixture
def paperfx():
    return paper_fixture()


@pytest.fixture(scope="session")
def cfg_fast():
    return IntegratorConfig(base_step=5e-3)


@pytest.fixture(scope="session")
def cfg_accurate():
    return IntegratorConfig(base_step=2e-3, guard_tol=1e-12)


@pytest.fixture(scope="session")
def stable2():
    return from_catalog("stable-2")


@pytest.fixture(scope="session")
def stable3():
    return from_catalog("stable-3")


@pytest.fixture(scope="session")
def unstable2():
    return from_catalog("unstable-2")


@pytest.fixture(scope="session")
def boundary2():
    return from_catalog("boundary-2")


@pytest.fixture(scope="session")
def uncoupled2():
    return from_catalog("uncoupled-2")
