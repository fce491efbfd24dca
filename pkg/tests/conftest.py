import itertools

import networkx as nx
import pytest

from emhroute.config import office_config
from emhroute.model import ChannelParams, Deployment, RoutingVector


def is_tree_nx(parents) -> bool:
    """Independent tree check: the undirected parent graph spans all nodes acyclically."""
    n = len(parents) + 1
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for s, p in enumerate(parents, start=1):
        if p == s:
            return False
        g.add_edge(s, p)
    return g.number_of_edges() == n - 1 and nx.is_tree(g)


def all_parent_vectors(n):
    return itertools.product(range(n), repeat=n - 1)


def line_deployment(distances, **channel) -> Deployment:
    """Stations on a straight line from the gateway, deterministic by default."""
    params = dict(reference_loss=40.0, shadowing_sigma=0.0, per_steepness=float("inf"), contention_alpha=0.0)
    params.update(channel)
    return Deployment(
        positions=((0.0, 0.0),) + tuple((float(x), 0.0) for x in distances),
        channel=ChannelParams(**params),
    )


@pytest.fixture(scope="session")
def office9():
    return office_config()


@pytest.fixture
def star9():
    return RoutingVector.star(10)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; printed in the terminal summary."""

    def record(label: str, passed: bool, detail: str) -> bool:
        request.config._acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
