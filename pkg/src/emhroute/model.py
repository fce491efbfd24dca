"""Domain types: deployments, radio parameters, routing and RSSI vectors.

Node ids are dense integers; 0 is always the gateway and stations are 1..n-1.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

GATEWAY = 0


class RoutingError(ValueError):
    """Structurally malformed routing vector."""


class DeploymentError(ValueError):
    """A deployment violates one of its invariants."""


@dataclass(frozen=True)
class RadioParams:
    """Currents (A) per operational state and the radio's discrete power levels.

    TX current is interpolated linearly in dBm between ``i_tx_min`` (at the
    lowest level) and ``i_tx_max`` (at the highest level).
    """

    i_cpu: float = 13e-3
    i_lpm: float = 0.4e-6
    i_rx: float = 19e-3
    i_sl: float = 0.12e-6
    i_tx_min: float = 39e-3
    i_tx_max: float = 61e-3
    tx_power_levels: tuple[float, ...] = tuple(float(p) for p in range(-16, 15))
    data_rate: float = 50_000.0
    sensitivity: float = -109.0

    def __post_init__(self):
        levels = tuple(float(p) for p in self.tx_power_levels)
        object.__setattr__(self, "tx_power_levels", levels)
        if not levels:
            raise DeploymentError("tx_power_levels must be nonempty")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise DeploymentError("tx_power_levels must be strictly ascending")
        if self.data_rate <= 0:
            raise DeploymentError("data_rate must be positive")

    @property
    def min_power(self) -> float:
        return self.tx_power_levels[0]

    @property
    def max_power(self) -> float:
        return self.tx_power_levels[-1]

    def i_tx(self, tx_power: float) -> float:
        """TX current at one of the configured power levels."""
        if tx_power not in self.tx_power_levels:
            raise ValueError(f"unknown transmission power level {tx_power!r} dBm")
        span = self.max_power - self.min_power
        if span == 0:
            return self.i_tx_max
        frac = (tx_power - self.min_power) / span
        return self.i_tx_min + frac * (self.i_tx_max - self.i_tx_min)

    def problems(self) -> list[str]:
        out = []
        for name in ("i_cpu", "i_lpm", "i_rx", "i_sl", "i_tx_min", "i_tx_max"):
            if getattr(self, name) < 0:
                out.append(f"radio.{name} is negative")
        if self.i_tx_max < self.i_tx_min:
            out.append("radio TX current must be nondecreasing in power")
        return out


@dataclass(frozen=True)
class ChannelParams:
    """Synthetic channel: log-distance path loss, frozen shadowing, logistic PER.

    ``rssi_noise_sigma`` is the per-iteration error of the gateway's RSSI
    estimate; ``contention_alpha`` adds expected retransmissions per extra
    sibling sharing a parent.
    """

    path_loss_exponent: float = 3.0
    reference_loss: float = 40.0
    shadowing_sigma: float = 0.0
    noise_floor: float = -120.0
    per_steepness: float = 0.7
    link_margin: float = 20.0
    max_retransmissions: int = 3
    contention_alpha: float = 0.1
    rssi_noise_sigma: float = 0.0

    def problems(self) -> list[str]:
        out = []
        if self.shadowing_sigma < 0:
            out.append("channel.shadowing_sigma is negative")
        if self.rssi_noise_sigma < 0:
            out.append("channel.rssi_noise_sigma is negative")
        if self.max_retransmissions < 0:
            out.append("channel.max_retransmissions is negative")
        if self.per_steepness <= 0:
            out.append("channel.per_steepness must be positive")
        if self.contention_alpha < 0:
            out.append("channel.contention_alpha is negative")
        return out


@dataclass(frozen=True)
class MacParams:
    """Fixed X-MAC style timing constants (seconds).

    ``association_cost`` charges one max-power association TX plus one RX wake
    for the routing broadcast to every station once per iteration.
    """

    preamble_time: float = 0.050
    wake_window: float = 0.100
    processing_overhead: float = 0.010
    association_cost: bool = True

    def problems(self) -> list[str]:
        return [
            f"mac.{f.name} is negative"
            for f in fields(self)
            if f.name != "association_cost" and getattr(self, f.name) < 0
        ]


@dataclass(frozen=True)
class Deployment:
    positions: tuple[tuple[float, float], ...]
    supply_voltage: float = 3.3
    battery_capacity: float = 800.0  # mAh per station
    radio: RadioParams = field(default_factory=RadioParams)
    channel: ChannelParams = field(default_factory=ChannelParams)
    mac: MacParams = field(default_factory=MacParams)
    cycle_duration: float = 120.0
    payload_size: int = 43
    averaging_cycles: int = 10
    shadowing_seed: int = 0

    def __post_init__(self):
        pos = tuple((float(x), float(y)) for x, y in self.positions)
        object.__setattr__(self, "positions", pos)
        problems = self.structural_problems()
        if problems:
            raise DeploymentError("; ".join(problems))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def stations(self) -> range:
        return range(1, self.n)

    def structural_problems(self) -> list[str]:
        out = []
        if len(self.positions) < 2:
            out.append("deployment needs a gateway and at least one station")
        if self.cycle_duration <= 0:
            out.append("cycle_duration must be positive")
        if self.payload_size <= 0:
            out.append("payload_size must be positive")
        if self.averaging_cycles < 1:
            out.append("averaging_cycles must be >= 1")
        if self.supply_voltage <= 0:
            out.append("supply_voltage must be positive")
        if len(set(self.positions)) != len(self.positions):
            out.append("node positions must be distinct")
        return out

    def problems(self) -> list[str]:
        """Every parameter invariant violated (reachability is checked by the channel)."""
        return (
            self.structural_problems()
            + self.radio.problems()
            + self.channel.problems()
            + self.mac.problems()
        )

    def distance(self, a: int, b: int) -> float:
        (xa, ya), (xb, yb) = self.positions[a], self.positions[b]
        return float(np.hypot(xa - xb, ya - yb))

    def with_channel(self, **changes) -> Deployment:
        return replace(self, channel=replace(self.channel, **changes))

    def with_mac(self, **changes) -> Deployment:
        return replace(self, mac=replace(self.mac, **changes))

    def deterministic(self) -> Deployment:
        """Same scene with every per-cycle random effect switched off.

        Frozen shadowing is part of the static scene and is kept.
        """
        return self.with_channel(
            per_steepness=float("inf"), contention_alpha=0.0, rssi_noise_sigma=0.0
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["positions"] = [list(p) for p in self.positions]
        d["radio"]["tx_power_levels"] = list(self.radio.tx_power_levels)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> Deployment:
        data = dict(data)
        radio = RadioParams(**data.pop("radio", {}))
        channel = ChannelParams(**data.pop("channel", {}))
        mac = MacParams(**data.pop("mac", {}))
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DeploymentError(f"unknown deployment keys: {sorted(extra)}")
        return cls(radio=radio, channel=channel, mac=mac, **data)


def load_deployment(path: str | Path) -> Deployment:
    """Read a deployment from JSON; either a bare deployment or a full config."""
    with open(path) as fh:
        data = json.load(fh)
    if "deployment" in data:
        data = data["deployment"]
    return Deployment.from_dict(data)


@dataclass(frozen=True, order=True)
class RoutingVector:
    """Parent of every station; ``parents[s - 1]`` is the parent of station s."""

    parents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))

    @classmethod
    def star(cls, n: int) -> RoutingVector:
        return cls((GATEWAY,) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.parents) + 1

    def __len__(self):
        return len(self.parents)

    def __iter__(self):
        return iter(self.parents)

    def __str__(self):
        return "(" + ",".join(map(str, self.parents)) + ")"

    def to_list(self) -> list[int]:
        return list(self.parents)

    @classmethod
    def from_list(cls, values: Iterable[int]) -> RoutingVector:
        return cls(tuple(values))

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> RoutingVector:
        return cls.from_list(json.loads(text))


RssiVector = np.ndarray  # float dBm, length n-1, entry s-1 belongs to station s


def _check_shape(r: RoutingVector, n: int) -> None:
    if len(r) != n - 1:
        raise RoutingError(f"routing has {len(r)} entries, expected {n - 1}")
    for p in r.parents:
        if not 0 <= p < n:
            raise RoutingError(f"parent {p} outside 0..{n - 1}")


def validate_routing(r: RoutingVector, n: int) -> bool:
    """True iff ``r`` is an arborescence into the gateway over ``n`` nodes."""
    _check_shape(r, n)
    reaches_root = {GATEWAY}
    for s in range(1, n):
        path = []
        seen = set()
        v = s
        while v not in reaches_root:
            if v in seen:
                return False
            seen.add(v)
            path.append(v)
            v = r.parents[v - 1]
        reaches_root.update(path)
    return True


def parent_of(r: RoutingVector, s: int) -> int:
    if s == GATEWAY:
        raise RoutingError("the gateway has no parent")
    if not 1 <= s <= len(r):
        raise RoutingError(f"station {s} not in routing of {len(r)} stations")
    return r.parents[s - 1]


def children_of(r: RoutingVector, v: int) -> set[int]:
    return {s for s, p in enumerate(r.parents, start=1) if p == v}


def children_table(r: RoutingVector) -> list[list[int]]:
    """``table[v]`` lists the children of node v, gateway included."""
    table: list[list[int]] = [[] for _ in range(r.n)]
    for s, p in enumerate(r.parents, start=1):
        table[p].append(s)
    return table


def depth(r: RoutingVector, s: int) -> int:
    """Hops from station s to the gateway (assumes a valid routing)."""
    hops = 0
    while s != GATEWAY:
        s = r.parents[s - 1]
        hops += 1
        if hops > len(r):
            raise RoutingError("routing contains a cycle")
    return hops


def descendant_counts(r: RoutingVector) -> list[int]:
    """Number of descendants of every node (index 0 is the gateway)."""
    counts = [0] * r.n
    for s in range(1, r.n):
        v = r.parents[s - 1]
        guard = 0
        while True:
            counts[v] += 1
            if v == GATEWAY:
                break
            v = r.parents[v - 1]
            guard += 1
            if guard > r.n:
                raise RoutingError("routing contains a cycle")
    return counts


def as_rssi_vector(values: Sequence[float]) -> RssiVector:
    return np.asarray(values, dtype=float)
