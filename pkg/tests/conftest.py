import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240917, help="seed for randomized checks")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line, details in RESULTS:
        terminalreporter.write_line(line)
        for d in details:
            terminalreporter.write_line("    " + d)
