import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "vallab", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("vallab")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record an acceptance verdict: ``acceptance(label, passed, detail)``."""
    log = request.config.stash[_ACCEPTANCE]

    def record(label, passed, detail=""):
        log[label] = (bool(passed), detail)
    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(log, key=lambda s: int(s.split()[0][1:])):
        passed, detail = log[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
