import random

from entropylab.verify import (Check, flows_suite, monotone_suite, ordered_pair, random_params,
                               rome_suite)


def test_check_line():
    assert Check("x", 3, 3).line() == "PASS x: 3/3"
    assert Check("x", 2, 3, "note").line() == "FAIL x: 2/3 (note)"


def test_random_params_are_valid_and_reproducible():
    a = [random_params(random.Random(9)) for _ in range(3)]
    b = [random_params(random.Random(9)) for _ in range(3)]
    assert a == b
    for _ in range(100):
        p, q = ordered_pair(random.Random(_))
        assert all(x <= y for x, y in zip(p.zeta, q.zeta))


def test_small_suites_pass():
    assert all(c.ok for c in rome_suite(graphs=10))
    assert all(c.ok for c in monotone_suite(pairs=10, n_max=8))
    assert all(c.ok for c in flows_suite(maps=5, traced=1))
