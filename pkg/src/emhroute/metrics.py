"""Evaluation quantities over experiment traces.

``e_b(t)`` is the bottleneck of iteration t alone.  The historic bottleneck
``E(t)`` takes the max over stations of each station's cumulative energy,
which is never more than the running sum of ``e_b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .learner import ExperimentTrace
from .model import Deployment

DEFAULT_MA_WINDOW = 15
LIFETIME_WINDOW = 30


def historic_series(trace: ExperimentTrace) -> np.ndarray:
    """``E(t)`` for t = 1..T."""
    if not len(trace):
        raise ValueError("empty trace")
    return np.cumsum(trace.station_energy, axis=0).max(axis=1)


def historic_bottleneck(trace: ExperimentTrace, t: int) -> float:
    if not len(trace):
        raise ValueError("empty trace")
    if not 1 <= t <= len(trace):
        raise ValueError(f"t={t} outside 1..{len(trace)}")
    return float(trace.station_energy[:t].sum(axis=0).max())


def saving_ratio(sh: ExperimentTrace, emh: ExperimentTrace, t: int) -> float:
    e_sh = historic_bottleneck(sh, t)
    if e_sh <= 0:
        raise ZeroDivisionError("single-hop historic bottleneck is zero")
    return (e_sh - historic_bottleneck(emh, t)) / e_sh


def moving_average(series: Sequence[float], window: int = DEFAULT_MA_WINDOW) -> list[float]:
    """Trailing mean over the last ``min(window, available)`` values."""
    if window < 1:
        raise ValueError("window must be >= 1")
    out = []
    total = 0.0
    for i, x in enumerate(series):
        total += x
        if i >= window:
            total -= series[i - window]
        out.append(total / min(i + 1, window))
    return out


def estimate_lifetime(trace: ExperimentTrace, d: Deployment, window: int = LIFETIME_WINDOW) -> float:
    """Iterations a full battery would last at the recent growth rate of ``E(t)``.

    Returns ``math.inf`` when ``E(t)`` stopped growing.
    """
    E = historic_series(trace)
    w = min(window, len(E))
    start = E[-w - 1] if len(E) > w else 0.0
    rate = (E[-1] - start) / w
    if rate <= 0:
        return math.inf
    battery_j = d.battery_capacity * 3.6 * d.supply_voltage
    return battery_j / rate


@dataclass(frozen=True)
class ComparisonSeries:
    e_b_sh: np.ndarray
    e_b_emh: np.ndarray
    E_sh: np.ndarray
    E_emh: np.ndarray
    rho: np.ndarray
    e_b_emh_ma: np.ndarray
    e_b_sh_ma: np.ndarray

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(1, len(self.rho) + 1)


def compare(sh: ExperimentTrace, emh: ExperimentTrace, window: int = DEFAULT_MA_WINDOW) -> ComparisonSeries:
    T = min(len(sh), len(emh))
    E_sh = historic_series(sh)[:T]
    E_emh = historic_series(emh)[:T]
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(E_sh > 0, (E_sh - E_emh) / E_sh, np.nan)
    e_sh, e_emh = sh.e_b[:T], emh.e_b[:T]
    return ComparisonSeries(
        e_b_sh=e_sh,
        e_b_emh=e_emh,
        E_sh=E_sh,
        E_emh=E_emh,
        rho=rho,
        e_b_emh_ma=np.array(moving_average(e_emh, window)),
        e_b_sh_ma=np.array(moving_average(e_sh, window)),
    )
