import mpmath
import pytest


@pytest.fixture(scope="session")
def mp_f():
    """High-precision oracle for f(t) = (1 - t)/(1 - t**r), limit 1/r at t = 1."""

    def f(r, t, dps=50):
        with mpmath.workdps(dps):
            r = mpmath.mpf(r)
            t = mpmath.mpf(t)
            if t == 1:
                return 1 / r
            return (1 - t) / (1 - t**r)

    return f


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
