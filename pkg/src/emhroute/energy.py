"""Per-cycle time-in-state accounting and energy per station.

Energy follows the two-component model of the RE-Mote platform:
microprocessor ``V (t_cpu I_cpu + t_lpm I_lpm)`` plus radio
``V (t_rx I_rx + t_tx I_tx + t_sl I_sl)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Deployment, RadioParams, RoutingError, RoutingVector, children_table, descendant_counts, validate_routing


@dataclass(frozen=True)
class StateTimes:
    t_cpu: float = 0.0
    t_lpm: float = 0.0
    t_rx: float = 0.0
    t_tx: float = 0.0
    t_sl: float = 0.0

    def check(self) -> None:
        for name, value in vars(self).items():
            if value < 0:
                raise ValueError(f"{name} is negative ({value})")


def microprocessor_energy(t: StateTimes, v_dd: float, radio: RadioParams) -> float:
    t.check()
    return v_dd * (t.t_cpu * radio.i_cpu + t.t_lpm * radio.i_lpm)


def radio_energy(t: StateTimes, v_dd: float, radio: RadioParams, tx_power: float) -> float:
    t.check()
    i_tx = radio.i_tx(tx_power)
    return v_dd * (t.t_rx * radio.i_rx + t.t_tx * i_tx + t.t_sl * radio.i_sl)


def airtime(n_bytes: float, data_rate: float) -> float:
    return n_bytes * 8.0 / data_rate


def association_energy(d: Deployment) -> float:
    """One max-power association TX plus one RX wake for the routing broadcast."""
    tx = d.mac.preamble_time + airtime(d.payload_size, d.radio.data_rate)
    rx = d.mac.wake_window
    return d.supply_voltage * (tx * d.radio.i_tx(d.radio.max_power) + rx * d.radio.i_rx)


@dataclass(frozen=True)
class CycleReport:
    """One cycle of the whole network; every array is indexed by station - 1.

    ``energy`` is recomputable from ``times`` and ``tx_power``;
    ``association_energy`` is reported separately and ``total_energy`` adds both.
    """

    times: tuple[StateTimes, ...]
    tx_power: np.ndarray
    attempts: np.ndarray
    energy: np.ndarray
    association_energy: np.ndarray
    delivery_failures: int = 0

    @property
    def total_energy(self) -> np.ndarray:
        return self.energy + self.association_energy


def account_cycle(
    d: Deployment,
    r: RoutingVector,
    link_attempts: Sequence[int],
    tx_powers: Sequence[float],
    *,
    association: bool = False,
    delivery_failures: int = 0,
) -> CycleReport:
    """Split every station's cycle into CPU/LPM and RX/TX/SL time and price it.

    Each station sends one aggregate packet carrying its own payload plus the
    payloads of all its descendants.  Every attempt costs the sender a
    preamble plus airtime and the parent a wake window plus airtime.
    """
    n = d.n
    if len(link_attempts) != n - 1 or len(tx_powers) != n - 1:
        raise RoutingError("need one attempt count and one power per station")
    if not validate_routing(r, n):
        raise RoutingError(f"routing {r} is not a tree rooted at the gateway")
    attempts = np.asarray(link_attempts, dtype=int)
    if (attempts < 1).any():
        raise ValueError("every link needs at least one attempt")

    mac, radio = d.mac, d.radio
    kids = children_table(r)
    desc = descendant_counts(r)
    agg_air = [airtime(d.payload_size * (1 + desc[s]), radio.data_rate) for s in range(n)]

    times = []
    energy = np.empty(n - 1)
    for s in range(1, n):
        t_tx = attempts[s - 1] * (mac.preamble_time + agg_air[s])
        t_rx = sum(attempts[c - 1] * (mac.wake_window + agg_air[c]) for c in kids[s])
        t_cpu = mac.processing_overhead * (1 + len(kids[s]))
        t_sl = d.cycle_duration - t_tx - t_rx
        t_lpm = d.cycle_duration - t_cpu
        if t_sl < 0 or t_lpm < 0:
            raise ValueError(f"station {s} is busy longer than the cycle")
        st = StateTimes(t_cpu=t_cpu, t_lpm=t_lpm, t_rx=t_rx, t_tx=t_tx, t_sl=t_sl)
        times.append(st)
        energy[s - 1] = microprocessor_energy(st, d.supply_voltage, radio) + radio_energy(
            st, d.supply_voltage, radio, tx_powers[s - 1]
        )

    assoc = np.full(n - 1, association_energy(d) if association else 0.0)
    return CycleReport(
        times=tuple(times),
        tx_power=np.asarray(tx_powers, dtype=float),
        attempts=attempts,
        energy=energy,
        association_energy=assoc,
        delivery_failures=delivery_failures,
    )


def recompute_energy(report: CycleReport, d: Deployment) -> np.ndarray:
    return np.array(
        [
            microprocessor_energy(t, d.supply_voltage, d.radio)
            + radio_energy(t, d.supply_voltage, d.radio, p)
            for t, p in zip(report.times, report.tx_power)
        ]
    )


CYCLE_CSV_HEADER = ["iteration", "cycle", "station", "t_CPU", "t_LPM", "t_RX", "t_TX", "t_SL", "tx_power_dbm", "energy_J"]


def cycle_rows(report: CycleReport, iteration: int, cycle: int) -> list[list]:
    """CSV rows for one cycle; ``energy_J`` includes any association charge."""
    total = report.total_energy
    return [
        [iteration, cycle, s, t.t_cpu, t.t_lpm, t.t_rx, t.t_tx, t.t_sl, report.tx_power[s - 1], total[s - 1]]
        for s, t in enumerate(report.times, start=1)
    ]
