import os

import pytest
from hypothesis import HealthCheck, settings

from klbridge import KernelSpec, cached_spectrum

settings.register_profile(
    "klbridge",
    max_examples=int(os.environ.get("KLB_HYPOTHESIS_EXAMPLES", "40")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("klbridge")

GRID = 2000

# lines appended by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fbm_spectrum():
    def get(h, n_nodes=GRID, **kw):
        return cached_spectrum(KernelSpec.fbm(h), n_nodes, **kw)
    return get


@pytest.fixture(scope="session")
def bridge_spectrum():
    def get(h, n_nodes=GRID, **kw):
        return cached_spectrum(KernelSpec.bridge_of(KernelSpec.fbm(h)), n_nodes, **kw)
    return get


@pytest.fixture(scope="session")
def brownian_spectrum():
    return cached_spectrum(KernelSpec.brownian(), GRID)


@pytest.fixture(scope="session")
def brownian_bridge_spectrum():
    return cached_spectrum(KernelSpec.bridge_of(KernelSpec.brownian()), GRID)
