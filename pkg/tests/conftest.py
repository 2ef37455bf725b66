import pytest

from fisherstefan.profile import shoot_profile

# J(-1) and mu(c) from an independent 30-digit Taylor integration (mpmath.odefun)
J_ORACLE = {
    0.0: 0.4226497308103742,
    0.5: 0.4845416758786673,
    1.0: 0.5131188502185601,
    1.5: 0.4864265150573061,
}
MU_ORACLE = {0.5: 1.687850709174499, 1.0: 9.531512935107384, 1.5: 110.5095711479306}


@pytest.fixture(scope="session")
def wave_c1():
    return shoot_profile(1.0, length=80.0)


@pytest.fixture(scope="session")
def wave_c0():
    return shoot_profile(0.0, length=80.0)


_criteria = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _criteria.extend(
            line for line in report.capstdout.splitlines() if line.startswith(("[PASS]", "[FAIL]"))
        )


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criteria, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
