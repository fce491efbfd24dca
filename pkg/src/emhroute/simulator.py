"""K-cycle energy measurement of a fixed routing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import draw_transmission_attempts, link_table, select_tx_power
from .energy import CycleReport, account_cycle
from .model import Deployment, RoutingError, RoutingVector, children_table, validate_routing


@dataclass(frozen=True)
class MeasurementResult:
    routing: RoutingVector
    per_station_mean_energy: np.ndarray  # J, index s - 1
    bottleneck_mean_energy: float
    cycle_reports: tuple[CycleReport, ...]
    delivery_failure_rate: float

    @property
    def bottleneck_station(self) -> int:
        return int(np.argmax(self.per_station_mean_energy)) + 1

    @property
    def delivery_failures(self) -> int:
        return sum(rep.delivery_failures for rep in self.cycle_reports)


def link_powers(d: Deployment, r: RoutingVector) -> list[float]:
    """Transmission power each station uses towards its parent."""
    table = link_table(d)
    return [
        select_tx_power(table[s, r.parents[s - 1]], d.channel, d.radio)
        for s in range(1, d.n)
    ]


def measure_routing(
    d: Deployment,
    r: RoutingVector,
    K: int | None = None,
    rng: np.random.Generator | int | None = None,
    *,
    association: bool | None = None,
) -> MeasurementResult:
    """Run K cycles under routing ``r`` and average each station's energy.

    The association/broadcast overhead, when enabled, is charged to the first
    cycle.  Cycles start right after the routing broadcast.
    """
    K = d.averaging_cycles if K is None else K
    if K < 1:
        raise ValueError("K must be >= 1")
    if not validate_routing(r, d.n):
        raise RoutingError(f"routing {r} is not a tree rooted at the gateway")
    rng = np.random.default_rng(rng)
    association = d.mac.association_cost if association is None else association

    table = link_table(d)
    powers = link_powers(d, r)
    pmax = d.radio.max_power
    fan_in = [len(c) for c in children_table(r)]
    links = []
    for s in range(1, d.n):
        p = r.parents[s - 1]
        links.append((table[s, p] - (pmax - powers[s - 1]), fan_in[p]))

    reports = []
    failures = 0
    for k in range(K):
        attempts = []
        lost = 0
        for link_rssi, f in links:
            a, ok = draw_transmission_attempts(
                link_rssi, d.channel, rng, sensitivity=d.radio.sensitivity, fan_in=f
            )
            attempts.append(a)
            lost += not ok
        failures += lost
        reports.append(
            account_cycle(d, r, attempts, powers, association=association and k == 0, delivery_failures=lost)
        )

    per_station = np.mean([rep.total_energy for rep in reports], axis=0)
    return MeasurementResult(
        routing=r,
        per_station_mean_energy=per_station,
        bottleneck_mean_energy=float(per_station.max()),
        cycle_reports=tuple(reports),
        delivery_failure_rate=failures / (K * (d.n - 1)),
    )


def measure_single_hop(d: Deployment, K: int | None = None, rng=None, **kwargs) -> MeasurementResult:
    return measure_routing(d, RoutingVector.star(d.n), K, rng, **kwargs)
