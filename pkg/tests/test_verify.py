import math

import numpy as np
import pytest

from rdlab import verify
from rdlab.verify import SuiteResult


@pytest.mark.parametrize("suite", verify.SUITES)
def test_suites_pass_on_small_samples(suite):
    (res,) = verify.run(suite, n=4, seed=3)
    assert res.passed, res.lines()
    assert res.worst and all(v <= t for v, t in res.worst.values())


def test_instances_regenerate_from_index():
    a = verify.run_suite("quotient", 3, seed=9).worst
    b = verify.run_suite("quotient", 3, seed=9).worst
    assert a == b


def test_random_pair_condition(rng):
    for _ in range(20):
        a, b = verify.random_psd_pair(rng, max_condition=1e4)
        assert a.shape == b.shape and 2 <= a.shape[0] <= 6
        w = np.linalg.eigvalsh(b)
        assert w.min() > 0 and w.max() / w.min() <= 1e4 * (1 + 1e-9)


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run_suite("bogus", 1, 0)


class TestSuiteResult:
    def test_keeps_worst(self):
        res = SuiteResult("s", 3)
        for i, v in enumerate([0.1, 0.5, 0.2]):
            res.record(i, "c", v, 1.0)
        assert res.worst["c"] == (0.5, 1.0) and res.passed

    def test_records_violation(self):
        res = SuiteResult("s", 2)
        res.record(0, "c", 0.1, 0.0)
        assert not res.passed and res.failures == [(0, "c", 0.1)]
        assert any("violation at instance 0" in line for line in res.lines())

    def test_nan_is_a_violation(self):
        res = SuiteResult("s", 1)
        res.record(0, "c", math.nan, 1.0)
        assert not res.passed and math.isnan(res.worst["c"][0])
