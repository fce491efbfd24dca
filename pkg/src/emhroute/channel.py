"""Synthetic radio channel.

Log-distance path loss with per-link shadowing frozen at deployment creation,
logistic packet error rate, and a contention penalty for siblings that share
a parent.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

from .model import ChannelParams, Deployment, DeploymentError, RadioParams, RssiVector


def rssi(tx, rx, tx_power: float, params: ChannelParams, rng: np.random.Generator | None = None) -> float:
    """Received power (dBm) for a transmitter at ``tx`` heard at ``rx``.

    A shadowing sample is added only when ``shadowing_sigma > 0`` and a random
    generator is supplied.
    """
    d = math.hypot(tx[0] - rx[0], tx[1] - rx[1])
    if d == 0:
        raise ValueError("transmitter and receiver positions coincide")
    value = tx_power - params.reference_loss - 10.0 * params.path_loss_exponent * math.log10(d)
    if params.shadowing_sigma > 0 and rng is not None:
        value += rng.normal(0.0, params.shadowing_sigma)
    return value


@lru_cache(maxsize=64)
def link_table(d: Deployment) -> np.ndarray:
    """Symmetric n x n matrix of RSSI (dBm) at maximum power, NaN on the diagonal.

    Shadowing is drawn once from ``d.shadowing_seed`` so the scene is static.
    """
    rng = np.random.default_rng(d.shadowing_seed)
    n = d.n
    table = np.full((n, n), np.nan)
    pmax = d.radio.max_power
    for i in range(n):
        for j in range(i + 1, n):
            v = rssi(d.positions[i], d.positions[j], pmax, d.channel, rng)
            table[i, j] = table[j, i] = v
    table.setflags(write=False)
    return table


def check_reachability(d: Deployment) -> None:
    """Raise if some station cannot reach the gateway single-hop at max power."""
    gw = link_table(d)[1:, 0]
    weak = [s for s, v in enumerate(gw, start=1) if v < d.radio.sensitivity]
    if weak:
        raise DeploymentError(
            f"stations {weak} cannot reach the gateway at {d.radio.max_power} dBm "
            f"(single-hop reachability violated)"
        )


def estimate_rssi_vector(d: Deployment, rng: np.random.Generator | None = None) -> RssiVector:
    """Gateway-perceived RSSI of every station transmitting at maximum power.

    With ``rssi_noise_sigma > 0`` and a generator, each entry carries an
    independent estimation error.
    """
    check_reachability(d)
    gamma = np.array(link_table(d)[1:, 0], dtype=float)
    sigma = d.channel.rssi_noise_sigma
    if sigma > 0 and rng is not None:
        gamma = gamma + rng.normal(0.0, sigma, size=gamma.shape)
    return gamma


def select_tx_power(link_rssi_at_max: float, params: ChannelParams, radio: RadioParams) -> float:
    """Lowest power level whose predicted RSSI clears sensitivity plus margin."""
    target = radio.sensitivity + params.link_margin
    pmax = radio.max_power
    for p in radio.tx_power_levels:
        if link_rssi_at_max - (pmax - p) >= target:
            return p
    return pmax


def success_probability(link_rssi: float, sensitivity: float, steepness: float) -> float:
    margin = link_rssi - sensitivity
    if math.isinf(steepness):
        return 1.0 if margin > 0 else (0.5 if margin == 0 else 0.0)
    x = steepness * margin
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return ex / (1.0 + ex)


def collision_probability(fan_in: int, alpha: float) -> float:
    """Per-attempt collision probability for a parent serving ``fan_in`` children.

    Chosen so that, on an otherwise perfect link, the expected number of extra
    attempts is ``alpha * (fan_in - 1)``.
    """
    load = alpha * max(fan_in - 1, 0)
    return load / (1.0 + load)


def draw_transmission_attempts(
    link_rssi: float,
    params: ChannelParams,
    rng: np.random.Generator,
    *,
    sensitivity: float,
    fan_in: int = 1,
) -> tuple[int, bool]:
    """Attempts needed to deliver one packet and whether it got through.

    Attempts are capped at ``1 + max_retransmissions``; when every attempt
    fails the cap is returned with ``delivered=False``.
    """
    cap = 1 + params.max_retransmissions
    q = success_probability(link_rssi, sensitivity, params.per_steepness)
    q *= 1.0 - collision_probability(fan_in, params.contention_alpha)
    if q >= 1.0:
        return 1, True
    if q <= 0.0:
        return cap, False
    attempts = int(rng.geometric(q))
    if attempts > cap:
        return cap, False
    return attempts, True


def truncated_geometric_mean(q: float, max_retransmissions: int) -> float:
    """Mean attempts of a geometric(q) draw truncated at ``1 + max_retransmissions``."""
    cap = 1 + max_retransmissions
    fail = 1.0 - q
    return sum(fail**k for k in range(cap))


def calibrate_reference_loss(
    distances: Sequence[float], measured_rssi: Sequence[float], tx_power: float, exponent: float
) -> tuple[float, np.ndarray]:
    """Least-squares reference loss (dB at 1 m) for a fixed exponent.

    Returns the fitted loss and the residuals ``measured - predicted``.
    """
    d = np.asarray(distances, dtype=float)
    y = np.asarray(measured_rssi, dtype=float)
    offsets = tx_power - 10.0 * exponent * np.log10(d) - y
    loss = float(offsets.mean())
    predicted = tx_power - loss - 10.0 * exponent * np.log10(d)
    return loss, y - predicted
