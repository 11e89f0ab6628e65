import pytest


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def record(request):
    """Registers a one-line verdict shown in the terminal summary."""
    def _record(line):
        request.config.acceptance_lines.append(line)
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
