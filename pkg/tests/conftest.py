import pytest

from ratercheck.kernels import available_backends

BACKENDS = available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Each available kernel module in turn (compiled and pure Python)."""
    return BACKENDS[request.param]


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance criterion lines collected during the run."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
