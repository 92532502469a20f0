import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from seccache import CoverageProfile, PopularityProfile  # noqa: E402


def random_instance(rng, N, S_max=3):
    p = rng.dirichlet(np.ones(N)) * 0.98 + 0.02 / N
    S = int(rng.integers(1, S_max + 1))
    g = rng.dirichlet(np.ones(S))
    return PopularityProfile(p / p.sum()), CoverageProfile(g / g.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    results = {}
    for mod in list(sys.modules.values()):
        results.update(getattr(mod, "ACCEPTANCE_RESULTS", None) or {})
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
