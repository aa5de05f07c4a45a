import math

import numpy as np
import pytest

from triest.metrics import EstimateTrace, eps_error, local_pearson, mape, max_ape, pearson


def test_mape_zero_when_exact():
    assert mape([1, 2, 3], [1, 2, 3]) == 0


def test_mape_ten_percent():
    truth = np.array([3.0, 10.0, 50.0])
    assert mape(truth, 1.1 * truth) == pytest.approx(0.1)


def test_mape_excludes_zero_truth():
    assert mape([0, 10], [5, 9]) == pytest.approx(0.1)


def test_mape_undefined():
    assert math.isnan(mape([0, 0], [1, 2]))


def test_mape_from_trace():
    tr = EstimateTrace([1, 2], [2.0, 4.0], [2.0, 5.0])
    assert mape(tr) == pytest.approx(0.1)
    assert max_ape(tr) == pytest.approx(0.2)


def test_trace_validation():
    with pytest.raises(ValueError):
        EstimateTrace([1, 1], [0, 0], [0, 0])
    with pytest.raises(ValueError):
        EstimateTrace([1, 2], [0], [0, 0])


def test_pearson_cases():
    xs = np.array([1.0, 2.0, 4.0, 7.0])
    assert pearson(xs, xs) == pytest.approx(1.0)
    assert pearson(xs, 2 * xs) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert math.isnan(pearson([1, 1, 1], [1, 2, 3]))


def test_eps_error_cases():
    assert eps_error({1: 3, 2: 5}, {1: 3, 2: 5}) == 0
    assert eps_error({}, {7: 1}) == pytest.approx(1.0)
    assert eps_error({"a": 3}, {"a": 1}) == pytest.approx(0.5)
    assert math.isnan(eps_error({}, {}))
    assert eps_error({1: 3, 9: 0}, {1: 1}) == eps_error({1: 3}, {1: 1, 4: 0})


def test_local_pearson_union_support():
    assert local_pearson({1: 1, 2: 2}, {2: 2, 3: 1}) == pytest.approx(pearson([1, 2, 0], [0, 2, 1]))
