import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from segmenter.model import DisplaySet, ProductCatalog

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

# criterion number -> (passed, summary); filled by test_acceptance
ACCEPTANCE = {}


def random_catalog(rng, n, low=0.0, high=10.0):
    return ProductCatalog.from_qualities(rng.uniform(low, high, size=n).round(6).tolist())


def random_subset(rng, n, allow_empty=False):
    while True:
        mask = rng.random(n) < 0.5
        if allow_empty or mask.any():
            return DisplaySet(tuple(int(r) for r in np.flatnonzero(mask)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {summary}")
