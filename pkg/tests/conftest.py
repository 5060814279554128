"""Shared fixtures: toy networks, CSV writers, parameter pack."""

from __future__ import annotations

import math

import pytest

from raildecarb.network import (
    EARTH_RADIUS_MILES,
    EdgeRecord,
    NodeRecord,
    ODFlow,
    RailNetwork,
)
from raildecarb.params import ParameterPack


def lon_for_miles(miles: float) -> float:
    """Longitude offset (degrees) giving an exact great-circle distance at lat 0."""
    return math.degrees(miles / EARTH_RADIUS_MILES)


def make_node(node_id: str, miles_east: float = 0.0, state: str = "IL",
              candidate: bool = True, lat: float = 0.0) -> NodeRecord:
    return NodeRecord(node_id, node_id, state, lat, lon_for_miles(miles_east), candidate)


def line_network(positions: dict[str, float], candidates: set[str] | None = None,
                 state: str = "IL") -> RailNetwork:
    """Corridor network with nodes at the given mile markers, edges between
    consecutive positions."""
    ordering = sorted(positions.items(), key=lambda kv: kv[1])
    nodes = [
        make_node(nid, pos, state=state,
                  candidate=(candidates is None or nid in candidates))
        for nid, pos in ordering
    ]
    edges = [
        EdgeRecord(a[0], b[0], b[1] - a[1])
        for a, b in zip(ordering, ordering[1:])
    ]
    return RailNetwork(nodes, edges)


@pytest.fixture
def corridor_net() -> RailNetwork:
    """Four-node corridor A-B-C-D with 100/150/100 mile arcs."""
    return line_network({"A": 0.0, "B": 100.0, "C": 250.0, "D": 350.0})


@pytest.fixture
def corridor_flow() -> list[ODFlow]:
    return [ODFlow("A", "D", "Coal", 1_000_000.0)]


@pytest.fixture
def pack() -> ParameterPack:
    return ParameterPack()


def write_csvs(tmp_path, node_rows: list[str], edge_rows: list[str],
               demand_rows: list[str] | None = None):
    node_file = tmp_path / "nodes.csv"
    node_file.write_text("id,name,state,lat,lon,candidate\n" + "\n".join(node_rows) + "\n")
    edge_file = tmp_path / "edges.csv"
    edge_file.write_text("from,to,miles,owner\n" + "\n".join(edge_rows) + "\n")
    if demand_rows is None:
        return node_file, edge_file
    demand_file = tmp_path / "demand.csv"
    demand_file.write_text(
        "origin,destination,commodity,tons_per_year\n" + "\n".join(demand_rows) + "\n"
    )
    return node_file, edge_file, demand_file
