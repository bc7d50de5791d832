import pytest

from occpf import kernels
from occpf.scenario import bundled_scenario_path, load_scenario

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def bundled_scenario():
    return load_scenario(bundled_scenario_path("paper_fig3"))


@pytest.fixture(params=kernels.available_backends())
def each_backend(request):
    """Run the test once per importable kernel backend."""
    previous = kernels.backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
