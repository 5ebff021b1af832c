import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from grassmann_kernel.grassmann import AlgebraSignature, GrassmannElement  # noqa: E402

settings.register_profile("kernel", deadline=None, max_examples=60)
settings.load_profile("kernel")

_criteria: dict[str, str] = {}


@pytest.fixture
def rng():
    return random.Random(20261016)


@pytest.fixture
def s12():
    """The 1|2 algebra of the running example."""
    sig = AlgebraSignature(1, 2)
    return sig, GrassmannElement.x(sig, 1), GrassmannElement.theta(sig, 1), GrassmannElement.theta(sig, 2)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _criteria[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        terminalreporter.write_line(f"{_criteria[name]}  {name}")
