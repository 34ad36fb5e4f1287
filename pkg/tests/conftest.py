import random

import pytest

from entropylab.verify import DEFAULT_SEED, random_params


@pytest.fixture
def rng():
    return random.Random(DEFAULT_SEED)


@pytest.fixture
def random_maps(rng):
    return [random_params(rng) for _ in range(40)]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
