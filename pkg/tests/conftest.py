import pytest

from dnpswitch import kernels
from dnpswitch.model import DriveConditions, ModelParams

ACCEPTANCE_LINES = []


@pytest.fixture
def ref():
    return ModelParams()


@pytest.fixture
def anchor_a():
    return DriveConditions(B_z=2.0, P=0.3, V_app=-0.45, helicity=-1)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
