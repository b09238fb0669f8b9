import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from netctl.graph import DirectedNetwork

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by test_acceptance, printed once at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split(".")[0]), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def random_digraph(n, p, seed, self_loops=False):
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    if not self_loops:
        np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return DirectedNetwork(n, np.column_stack([src, dst]))


def path(n):
    return DirectedNetwork(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture
def chain7():
    return path(7)
