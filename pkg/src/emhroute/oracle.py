"""Exhaustive ground truth for small deployments."""
from __future__ import annotations

from .channel import estimate_rssi_vector
from .model import Deployment, RoutingVector
from .routing_space import DEFAULT_ENUMERATION_LIMIT, build_constrained_space, enumerate_constrained
from .simulator import measure_routing


def rank_routings(
    d: Deployment, limit: int = DEFAULT_ENUMERATION_LIMIT, K: int | None = None
) -> list[tuple[RoutingVector, float]]:
    """Every constrained routing with its bottleneck energy, best first.

    Measured under the deterministic view of the deployment; equal energies
    are ordered by routing vector.  Raises ``SpaceTooLarge`` above ``limit``.
    """
    det = d.deterministic()
    space = build_constrained_space(estimate_rssi_vector(det))
    routings = enumerate_constrained(space, limit)
    scored = [(r, measure_routing(det, r, K, 0).bottleneck_mean_energy) for r in routings]
    scored.sort(key=lambda item: (item[1], item[0]))
    return scored
