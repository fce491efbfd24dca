"""Epsilon-greedy search over RSSI-constrained routings (EMH) and the single-hop baseline.

Each routing is explored at most once; its payoff is the reciprocal of the
bottleneck station's K-cycle mean energy.  Exploration probability decays as
``epsilon0 / sqrt(t)`` with ``t`` counted after the iteration's update, so
the first update leaves epsilon at ``epsilon0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .channel import estimate_rssi_vector
from .model import Deployment, RoutingVector
from .routing_space import ConstrainedSpace, build_constrained_space, sample_unexplored
from .simulator import MeasurementResult, measure_routing

EXPLORE = "explore"
EXPLOIT = "exploit"
FIXED = "fixed"

POLICIES = ("SH", "EMH")


class LearnerError(RuntimeError):
    pass


@dataclass
class LearnerState:
    epsilon0: float = 1.0
    payoff_mode: Literal["ema", "freeze"] = "ema"
    ema_weight: float = 0.5
    schedule: Literal["sqrt", "constant"] = "sqrt"
    t: int = 0
    epsilon: float = field(default=None)  # type: ignore[assignment]
    payoffs: dict[RoutingVector, float] = field(default_factory=dict)
    history: list[tuple[int, RoutingVector, float, str]] = field(default_factory=list)

    def __post_init__(self):
        if self.epsilon is None:
            self.epsilon = self.epsilon0
        if self.payoff_mode not in ("ema", "freeze"):
            raise ValueError(f"unknown payoff mode {self.payoff_mode!r}")
        if self.schedule not in ("sqrt", "constant"):
            raise ValueError(f"unknown epsilon schedule {self.schedule!r}")

    def explored_in(self, space: ConstrainedSpace) -> list[RoutingVector]:
        return [r for r in self.payoffs if space.contains(r)]

    def best(self, candidates) -> RoutingVector:
        """Highest payoff; ties go to the lexicographically smallest vector."""
        top = max(self.payoffs[r] for r in candidates)
        return min(r for r in candidates if self.payoffs[r] == top)


def choose_action(
    state: LearnerState,
    space: ConstrainedSpace,
    rng: np.random.Generator,
    sample_rng: np.random.Generator | None = None,
) -> tuple[RoutingVector, str]:
    """Pick the next routing: explore an unexplored one with probability epsilon.

    One uniform is always consumed from ``rng`` for the decision; routing
    sampling uses ``sample_rng`` (defaults to ``rng``).
    """
    sample_rng = rng if sample_rng is None else sample_rng
    u = rng.random()
    explored = state.explored_in(space)
    if not explored or u < state.epsilon:
        r = sample_unexplored(space, explored, sample_rng)
        if r is not None:
            return r, EXPLORE
        if not explored:
            raise LearnerError("constrained space is empty")
    return state.best(explored), EXPLOIT


def update(state: LearnerState, r: RoutingVector, m: MeasurementResult, kind: str = EXPLORE) -> LearnerState:
    if m.routing != r:
        raise ValueError("measurement belongs to a different routing")
    e_b = m.bottleneck_mean_energy
    if not e_b > 0:
        raise ValueError(f"bottleneck energy must be positive, got {e_b}")
    payoff = 1.0 / e_b
    if r not in state.payoffs:
        state.payoffs[r] = payoff
    elif state.payoff_mode == "ema":
        w = state.ema_weight
        state.payoffs[r] = (1.0 - w) * state.payoffs[r] + w * payoff
    state.t += 1
    state.history.append((state.t, r, e_b, kind))
    if state.schedule == "sqrt":
        state.epsilon = state.epsilon0 / math.sqrt(state.t)
    return state


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    routing: RoutingVector
    action: str
    epsilon: float | None  # after this iteration's update; None for SH
    e_b: float
    per_station: np.ndarray
    bottleneck_station: int
    failures: int
    gamma: np.ndarray
    measurement: MeasurementResult | None = None


@dataclass
class ExperimentTrace:
    policy: str
    seed: int
    records: list[IterationRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def e_b(self) -> np.ndarray:
        return np.array([rec.e_b for rec in self.records])

    @property
    def station_energy(self) -> np.ndarray:
        """T x (n-1) matrix of per-iteration mean energy per station."""
        return np.vstack([rec.per_station for rec in self.records])

    @property
    def explore_count(self) -> int:
        return sum(rec.action == EXPLORE for rec in self.records)


def _streams(seed) -> list[np.random.Generator]:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(4)]


def run_experiment(
    d: Deployment,
    policy: str,
    T: int,
    K: int | None = None,
    seed: int | np.random.SeedSequence = 0,
    *,
    epsilon0: float = 1.0,
    payoff_mode: str = "ema",
    schedule: str = "sqrt",
    association: bool | None = None,
    keep_cycles: bool = False,
) -> ExperimentTrace:
    """Run T iterations of EMH or single-hop and record each iteration.

    The seed is split into independent streams for RSSI estimation, the
    explore/exploit coin, routing sampling and the channel, so SH and EMH
    runs with the same seed share channel randomness draw for draw.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if T < 1:
        raise ValueError("T must be >= 1")
    rssi_rng, coin_rng, sample_rng, channel_rng = _streams(seed)
    state = LearnerState(epsilon0=epsilon0, payoff_mode=payoff_mode, schedule=schedule)
    trace = ExperimentTrace(policy=policy, seed=int(seed.entropy) if isinstance(seed, np.random.SeedSequence) else int(seed))
    star = RoutingVector.star(d.n)

    for _ in range(T):
        gamma = estimate_rssi_vector(d, rssi_rng)
        if policy == "EMH":
            space = build_constrained_space(gamma)
            r, kind = choose_action(state, space, coin_rng, sample_rng)
        else:
            r, kind = star, FIXED
        m = measure_routing(d, r, K, channel_rng, association=association)
        eps = None
        if policy == "EMH":
            update(state, r, m, kind)
            eps = state.epsilon
        trace.records.append(
            IterationRecord(
                iteration=len(trace.records) + 1,
                routing=r,
                action=kind,
                epsilon=eps,
                e_b=m.bottleneck_mean_energy,
                per_station=m.per_station_mean_energy,
                bottleneck_station=m.bottleneck_station,
                failures=m.delivery_failures,
                gamma=gamma,
                measurement=m if keep_cycles else None,
            )
        )
    return trace
