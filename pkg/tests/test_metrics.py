import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from emhroute.learner import ExperimentTrace, IterationRecord, run_experiment
from emhroute.metrics import (
    compare,
    estimate_lifetime,
    historic_bottleneck,
    historic_series,
    moving_average,
    saving_ratio,
)
from emhroute.model import Deployment, RoutingVector


def crafted(rows, policy="EMH"):
    trace = ExperimentTrace(policy, 0)
    for i, row in enumerate(rows, start=1):
        row = np.asarray(row, dtype=float)
        trace.records.append(
            IterationRecord(i, RoutingVector.star(len(row) + 1), "explore", None, row.max(), row, int(row.argmax()) + 1, 0, np.zeros(len(row)))
        )
    return trace


def test_historic_bottleneck_is_not_sum_of_bottlenecks():
    trace = crafted([(3, 1), (1, 3)])
    assert historic_bottleneck(trace, 2) == 4.0
    assert trace.e_b.sum() == 6.0


def test_historic_at_one_is_first_bottleneck():
    trace = crafted([(3, 1), (1, 3)])
    assert historic_bottleneck(trace, 1) == 3.0
    np.testing.assert_array_equal(historic_series(trace), [3.0, 4.0])


def test_historic_bounds():
    with pytest.raises(ValueError):
        historic_bottleneck(crafted([(1, 2)]), 2)
    with pytest.raises(ValueError):
        historic_series(crafted([]))


@given(st.lists(st.lists(st.floats(0, 1), min_size=3, max_size=3), min_size=1, max_size=20))
def test_historic_between_max_and_sum(rows):
    trace = crafted(rows)
    E = historic_series(trace)
    assert np.all(np.diff(E) >= -1e-12)
    assert np.all(E <= np.cumsum(trace.e_b) + 1e-12)
    assert np.all(E >= np.maximum.accumulate(trace.e_b) - 1e-12)


def test_single_hop_historic_is_linear_when_deterministic(office9):
    d = office9.deployment.deterministic()
    trace = run_experiment(d, "SH", 10, 3, seed=0, association=False)
    E = historic_series(trace)
    np.testing.assert_allclose(E, E[0] * np.arange(1, 11), rtol=1e-12)


def test_saving_ratio_cases():
    same = crafted([(1.0, 0.5)])
    assert saving_ratio(same, crafted([(1.0, 0.5)]), 1) == 0.0
    assert saving_ratio(crafted([(1.0, 0.2)]), crafted([(0.93, 0.4)]), 1) == pytest.approx(0.07)
    with pytest.raises(ZeroDivisionError):
        saving_ratio(crafted([(0.0, 0.0)]), same, 1)


def test_moving_average_cases():
    assert moving_average([2.0] * 30) == [2.0] * 30
    assert moving_average([1.0, 5.0, 3.0], 1) == [1.0, 5.0, 3.0]
    assert moving_average(list(range(1, 16)))[-1] == 8.0
    assert moving_average([1.0, 3.0])[-1] == 2.0
    with pytest.raises(ValueError):
        moving_average([1.0], 0)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40), st.integers(1, 20))
def test_moving_average_matches_numpy(xs, w):
    ref = [np.mean(xs[max(0, i - w + 1) : i + 1]) for i in range(len(xs))]
    np.testing.assert_allclose(moving_average(xs, w), ref, atol=1e-6)


def test_lifetime():
    d = Deployment(positions=((0, 0), (5, 0)))
    assert d.battery_capacity * 3.6 * d.supply_voltage == pytest.approx(9504.0)
    assert estimate_lifetime(crafted([(1.0,)] * 40), d) == pytest.approx(9504.0)
    assert estimate_lifetime(crafted([(0.5,)] * 40), d) == pytest.approx(2 * 9504.0)
    assert estimate_lifetime(crafted([(0.0,)] * 5), d) == math.inf


def test_emh_lifetime_not_shorter(office9):
    d = office9.deployment
    sh = run_experiment(d, "SH", 110, seed=0)
    emh = run_experiment(d, "EMH", 110, seed=0)
    assert estimate_lifetime(emh, d) >= estimate_lifetime(sh, d)


def test_compare_consistent_with_pointwise_ratio(office9):
    d = office9.deployment
    sh = run_experiment(d, "SH", 30, 2, seed=5)
    emh = run_experiment(d, "EMH", 30, 2, seed=5)
    c = compare(sh, emh)
    for t in (1, 10, 30):
        assert c.rho[t - 1] == pytest.approx(saving_ratio(sh, emh, t), rel=1e-12)
    np.testing.assert_array_equal(c.iterations, np.arange(1, 31))
    np.testing.assert_allclose(c.e_b_emh_ma, moving_average(list(emh.e_b), 15))
