import pytest

from alphacev.model import GridSpec, ModelParams


@pytest.fixture
def fig1_params():
    return ModelParams(a=1.05, k=2.0, sigma1=1.0, sigma2=0.0, gamma=0.54, alpha=1.5, x0=1.0)


@pytest.fixture
def fig2_params():
    return ModelParams(a=1.05, k=2.0, sigma1=0.37, sigma2=0.37, gamma=0.54, alpha=1.5, x0=1.0)


@pytest.fixture
def grid64():
    return GridSpec(1.0, 64, 2.0)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion as a PASS/FAIL line for the terminal summary."""

    def record(number, name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
