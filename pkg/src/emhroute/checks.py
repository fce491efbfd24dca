"""Fast invariant suite behind ``emhroute validate``.

The brute-force counters here enumerate raw parent vectors and never touch
the product formula used by the routing space.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from .energy import StateTimes, account_cycle, microprocessor_energy, radio_energy
from .model import Deployment, RadioParams, RoutingVector, validate_routing
from .routing_space import build_constrained_space, count_all_routings


def brute_force_trees(n: int) -> int:
    """Parent vectors over n nodes that form a tree into node 0."""
    return sum(
        validate_routing(RoutingVector(p), n) for p in itertools.product(range(n), repeat=n - 1)
    )


def _stronger(gamma, a: int, b: int) -> bool:
    """Gateway hears station a strictly above b under the id tie-break."""
    ga, gb = gamma[a - 1], gamma[b - 1]
    return ga > gb or (ga == gb and a < b)


def brute_force_constrained(gamma) -> int:
    n = len(gamma) + 1
    count = 0
    for p in itertools.product(range(n), repeat=n - 1):
        r = RoutingVector(p)
        if not validate_routing(r, n):
            continue
        if all(q == 0 or _stronger(gamma, q, s) for s, q in enumerate(p, start=1)):
            count += 1
    return count


def check_trees() -> str:
    for parents in [(0, 0, 2, 2, 4, 4, 2, 7, 7), (0, 5, 2, 0, 1, 1, 5, 6, 2), (0,) * 9]:
        assert validate_routing(RoutingVector(parents), 10), parents
    assert not validate_routing(RoutingVector((2, 1)), 3)
    return "reference routings valid, 2-cycle rejected"


def check_cayley() -> str:
    for n in range(2, 7):
        bf = brute_force_trees(n)
        assert bf == count_all_routings(n), (n, bf)
    assert count_all_routings(10) == 100_000_000
    return f"n=4 -> {count_all_routings(4)}, n=2..6 match enumeration"


def check_constrained(draws: int = 40, seed: int = 7) -> str:
    rng = np.random.default_rng(seed)
    for _ in range(draws):
        m = int(rng.integers(1, 5))
        gamma = np.round(rng.uniform(-95, -50, size=m))
        space = build_constrained_space(gamma)
        bf = brute_force_constrained(gamma)
        assert space.cardinality == bf, (gamma, space.cardinality, bf)
    return f"{draws} random RSSI vectors (n <= 5) match brute force"


def check_epsilon() -> str:
    from .learner import LearnerState, update
    from .simulator import measure_single_hop

    d = Deployment(positions=((0, 0), (5, 0))).deterministic()
    m = measure_single_hop(d, 1, 0)
    state = LearnerState()
    for t in range(1, 111):
        update(state, m.routing, m, "exploit")
        assert abs(state.epsilon - 1 / math.sqrt(t)) <= 1e-12, t
    return "epsilon = 1/sqrt(t) for t = 1..110"


def check_energy_formulas() -> str:
    radio = RadioParams()
    e = microprocessor_energy(StateTimes(t_cpu=1.0), 3.3, radio)
    assert math.isclose(e, 42.9e-3, rel_tol=1e-12), e
    e = radio_energy(StateTimes(t_tx=43 * 8 / 50_000), 3.3, radio, 14.0)
    assert math.isclose(e, 3.3 * 0.061 * 0.00688, rel_tol=1e-12), e
    return "42.9 mJ CPU second, 1.385 mJ max-power airtime"


def energy_invariants(d: Deployment) -> str:
    problems = d.radio.problems() + d.mac.problems()
    assert not problems, "; ".join(problems)
    rep = account_cycle(d, RoutingVector.star(d.n), [1] * (d.n - 1), [d.radio.max_power] * (d.n - 1))
    assert (rep.energy >= 0).all(), "negative station energy"
    return f"currents nonnegative, star-cycle energies >= 0 on {d.n - 1} stations"


def run_checks(d: Deployment | None = None) -> list[tuple[str, bool, str]]:
    checks: list[tuple[str, Callable[[], str]]] = [
        ("tree validity", check_trees),
        ("cayley counts", check_cayley),
        ("constrained count", check_constrained),
        ("epsilon schedule", check_epsilon),
        ("energy formulas", check_energy_formulas),
    ]
    if d is not None:
        checks.append(("energy invariants", lambda: energy_invariants(d)))
    results = []
    for name, fn in checks:
        try:
            results.append((name, True, fn()))
        except Exception as exc:  # a check failing must not stop the rest
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
    return results
