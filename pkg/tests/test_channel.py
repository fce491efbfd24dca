import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emhroute.channel import (
    calibrate_reference_loss,
    collision_probability,
    draw_transmission_attempts,
    estimate_rssi_vector,
    link_table,
    rssi,
    select_tx_power,
    success_probability,
    truncated_geometric_mean,
)
from emhroute.model import ChannelParams, Deployment, DeploymentError, RadioParams

RADIO = RadioParams()


def test_rssi_at_reference_distance():
    p = ChannelParams(reference_loss=40.0, shadowing_sigma=0.0)
    assert rssi((0, 0), (1, 0), 14.0, p) == pytest.approx(-26.0, abs=1e-12)


def test_rssi_doubling_distance_exponent_two():
    p = ChannelParams(path_loss_exponent=2.0, reference_loss=40.0)
    drop = rssi((0, 0), (10, 0), 0.0, p) - rssi((0, 0), (20, 0), 0.0, p)
    assert drop == pytest.approx(20 * math.log10(2), abs=1e-12)
    assert round(drop, 2) == 6.02


def test_rssi_coincident_positions():
    with pytest.raises(ValueError):
        rssi((1, 1), (1, 1), 0.0, ChannelParams())


def test_rssi_shadowing_is_seeded():
    p = ChannelParams(shadowing_sigma=4.0)
    a = rssi((0, 0), (7, 0), 0.0, p, np.random.default_rng(3))
    b = rssi((0, 0), (7, 0), 0.0, p, np.random.default_rng(3))
    assert a == b
    assert a != rssi((0, 0), (7, 0), 0.0, p)


@given(st.floats(1.0, 500.0), st.floats(1.0, 500.0))
def test_rssi_decreasing_in_distance(d1, d2):
    p = ChannelParams()
    if d2 > d1 * (1 + 1e-9):
        assert rssi((0, 0), (d1, 0), 0.0, p) > rssi((0, 0), (d2, 0), 0.0, p)


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_rssi_increasing_in_power(p1, p2):
    params = ChannelParams()
    if p2 - p1 > 1e-9:
        assert rssi((0, 0), (9, 0), p1, params) < rssi((0, 0), (9, 0), p2, params)


def test_office_calibration_residuals(office9):
    """Least-squares reference loss against the testbed's gateway RSSI weights."""
    d = office9.deployment
    cal = office9.calibration
    dist = [d.distance(s, 0) for s in d.stations]
    loss, residuals = calibrate_reference_loss(dist, cal["gateway_rssi_dbm"], cal["tx_power_dbm"], d.channel.path_loss_exponent)
    assert np.abs(residuals).max() <= 3.0
    assert loss == pytest.approx(d.channel.reference_loss, abs=0.01)
    gamma = estimate_rssi_vector(d)
    assert np.abs(gamma - np.array(cal["gateway_rssi_dbm"])).max() <= 3.0
    assert gamma.argmin() == 8 and gamma.min() == pytest.approx(-87, abs=3)


def test_estimate_single_station_matches_rssi():
    d = Deployment(positions=((0, 0), (1, 0)))
    gamma = estimate_rssi_vector(d)
    assert gamma.shape == (1,)
    assert gamma[0] == rssi((1, 0), (0, 0), 14.0, d.channel)


def test_estimate_deterministic_without_noise(office9):
    d = office9.deployment.with_channel(rssi_noise_sigma=0.0)
    np.testing.assert_array_equal(estimate_rssi_vector(d), estimate_rssi_vector(d))


def test_estimate_seeded_with_noise(office9):
    d = office9.deployment
    a = estimate_rssi_vector(d, np.random.default_rng(11))
    b = estimate_rssi_vector(d, np.random.default_rng(11))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, estimate_rssi_vector(d, np.random.default_rng(12)))


def test_unreachable_station_is_rejected():
    d = Deployment(positions=((0, 0), (5, 0), (5000, 0)))
    with pytest.raises(DeploymentError, match="single-hop reachability"):
        estimate_rssi_vector(d)


def test_link_table_symmetric_and_frozen(office9):
    t = link_table(office9.deployment)
    np.testing.assert_array_equal(t, t.T)
    assert np.isnan(np.diag(t)).all()
    assert link_table(office9.deployment) is t


def test_select_power_boundary():
    params = ChannelParams(link_margin=10.0)
    exact = RADIO.sensitivity + params.link_margin
    assert select_tx_power(exact, params, RADIO) == 14.0
    assert select_tx_power(exact - 5, params, RADIO) == 14.0  # clamps


def test_select_power_ample_headroom():
    params = ChannelParams(link_margin=10.0)
    assert select_tx_power(RADIO.sensitivity + 10 + 30, params, RADIO) == -16.0


@settings(max_examples=300)
@given(st.floats(-130.0, -20.0), st.floats(0.0, 30.0))
def test_select_power_is_lowest_feasible(link_at_max, margin):
    params = ChannelParams(link_margin=margin)
    p = select_tx_power(link_at_max, params, RADIO)
    target = RADIO.sensitivity + margin
    feasible = [q for q in RADIO.tx_power_levels if link_at_max - (14.0 - q) >= target]
    if feasible:
        assert p == min(feasible)
        lower = [q for q in RADIO.tx_power_levels if q < p]
        assert not lower or link_at_max - (14.0 - max(lower)) < target
    else:
        assert p == 14.0


@given(st.floats(-130.0, -20.0), st.floats(-130.0, -20.0))
def test_select_power_monotone(a, b):
    params = ChannelParams()
    if a <= b:
        assert select_tx_power(a, params, RADIO) >= select_tx_power(b, params, RADIO)


def test_attempts_strong_link():
    rng = np.random.default_rng(0)
    p = ChannelParams()
    assert all(draw_transmission_attempts(-40.0, p, rng, sensitivity=-109.0) == (1, True) for _ in range(100))


def test_attempts_no_retransmissions():
    rng = np.random.default_rng(0)
    p = ChannelParams(max_retransmissions=0)
    for _ in range(200):
        a, _ = draw_transmission_attempts(-109.0, p, rng, sensitivity=-109.0)
        assert a == 1


def test_attempts_truncated_geometric_mean():
    """At zero margin q = 1/2; mean attempts follow the truncated geometric law."""
    p = ChannelParams(per_steepness=50.0, max_retransmissions=3)
    assert success_probability(-109.0, -109.0, p.per_steepness) == 0.5
    expected = sum(0.5**k for k in range(4))  # 1.875
    assert truncated_geometric_mean(0.5, 3) == expected
    rng = np.random.default_rng(2024)
    draws = [draw_transmission_attempts(-109.0, p, rng, sensitivity=-109.0) for _ in range(100_000)]
    mean = np.mean([a for a, _ in draws])
    assert abs(mean - expected) / expected < 0.02
    fail_rate = np.mean([not ok for _, ok in draws])
    assert fail_rate == pytest.approx(0.5**4, abs=0.005)


def test_contention_adds_expected_attempts():
    alpha, fan_in = 0.1, 9
    c = collision_probability(fan_in, alpha)
    assert 1 / (1 - c) - 1 == pytest.approx(alpha * (fan_in - 1), rel=1e-12)
    assert collision_probability(1, alpha) == 0.0
    p = ChannelParams(contention_alpha=alpha, max_retransmissions=50)
    rng = np.random.default_rng(5)
    mean = np.mean([draw_transmission_attempts(-40.0, p, rng, sensitivity=-109.0, fan_in=fan_in)[0] for _ in range(40_000)])
    assert mean == pytest.approx(1 + alpha * (fan_in - 1), rel=0.02)


def test_per_at_twenty_db_margin_is_tiny():
    q = success_probability(-89.0, -109.0, ChannelParams().per_steepness)
    assert 1 - q < 1e-6


def test_infinite_steepness_is_a_step():
    assert success_probability(-100.0, -109.0, math.inf) == 1.0
    assert success_probability(-110.0, -109.0, math.inf) == 0.0
