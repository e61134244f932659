import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from systolelab import FNPoint, default_catalog

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SCHMUTZ_LENGTH = 2.0 * math.acosh(2.0)


@pytest.fixture(scope="session")
def system():
    return default_catalog()


@pytest.fixture(scope="session")
def schmutz():
    return FNPoint((SCHMUTZ_LENGTH,) * 3)


def random_points(n, seed, lo=(0.5, 0.5, 0.5, -2, -2, -2), hi=(3, 3, 3, 2, 2, 2)):
    rng = np.random.default_rng(seed)
    return [FNPoint.from_array(rng.uniform(lo, hi)) for _ in range(n)]


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion; printed at session end."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number, ok, detail, seconds, limit):
        fast = seconds < limit
        status = "PASS" if ok and fast else "FAIL"
        line = f"criterion {number}: {status}  {detail}  [{seconds:.2f} s, limit {limit:g} s]"
        lines.append(line)
        print(line)
        return ok and fast

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
