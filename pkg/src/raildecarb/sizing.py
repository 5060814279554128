"""Facility sizing: link energy demands, min-cost allocation, station metrics.

Link-level daily energy comes from the commodity tons routed on the
alternative subnetwork: ton-miles are converted to diesel-equivalent BTU by
commodity intensity, divided by the technology efficiency ratio, and
expressed as kWh/day (battery) or kgH2/day (hydrogen). Facilities then
absorb link demands at minimum total energy cost; the uncapacitated case
degenerates to cheapest-reachable-facility, the capacitated case is a
transportation problem solved by successive shortest paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .network import RailNetwork
from .params import BTU_PER_KWH, DAYS_PER_YEAR, ParameterPack, RailroadOps
from .routing import ArcKey, FlowAssignment, shortest_distances
from .validation import ValidationError, check_positive

TECHNOLOGIES = ("battery", "hydrogen")


class UnreachableLinkError(ValidationError):
    """A demanded link cannot be served by any facility."""


@dataclass(frozen=True)
class LinkEnergyDemand:
    arc: ArcKey
    commodity: str
    avg_energy_per_day: float
    peak_energy_per_day: float
    tonmiles_per_day: float


@dataclass
class FacilityLoad:
    facility: str
    state: str
    avg_energy_per_day: float
    peak_energy_per_day: float
    locomotives_per_day: float
    peak_locomotives_per_day: float
    units: int  # chargers (battery) or pumps (hydrogen)
    utilization: float

    def to_dict(self) -> dict:
        return {
            "id": self.facility,
            "state": self.state,
            "avg": self.avg_energy_per_day,
            "peak": self.peak_energy_per_day,
            "locos_per_day": self.locomotives_per_day,
            "chargers": self.units,
            "utilization": self.utilization,
        }


@dataclass
class SizingSolution:
    unit: str  # "kwh" or "kgh2", per day
    allocation: dict[tuple[str, ArcKey], float]
    facility_avg: dict[str, float]
    facility_peak: dict[str, float]
    energy_cost_per_day: float
    tonmiles_per_day: float
    facility_states: dict[str, str] = field(default_factory=dict)
    loads: list[FacilityLoad] = field(default_factory=list)

    @property
    def total_avg_energy_per_day(self) -> float:
        return sum(self.facility_avg.values())

    def to_dict(self) -> dict:
        return {
            "unit": self.unit,
            "facilities": [load.to_dict() for load in self.loads],
            "energy_cost_per_day": self.energy_cost_per_day,
            "allocation": [
                {"facility": f, "from": arc[0], "to": arc[1], "energy_per_day": e}
                for (f, arc), e in sorted(self.allocation.items())
            ],
        }


def technology_energy_per_tonmile(
    ops: RailroadOps, commodity: str, pack: ParameterPack, technology: str
) -> float:
    """kWh (battery) or kgH2 (hydrogen) per ton-mile for one commodity."""
    btu = ops.intensity(commodity)
    if technology == "battery":
        return btu / pack.battery.efficiency_ratio_vs_diesel / BTU_PER_KWH
    if technology == "hydrogen":
        return btu / pack.hydrogen.efficiency_ratio_vs_diesel / pack.hydrogen.lower_heating_value_btu_per_kg
    raise ValidationError(f"unknown technology {technology!r}; expected one of {TECHNOLOGIES}")


def link_energy_demands(
    assignment: FlowAssignment,
    pack: ParameterPack,
    railroad: str,
    technology: str,
    peak_factor: float | None = None,
) -> list[LinkEnergyDemand]:
    """Per-link, per-commodity daily energy on the alternative subnetwork."""
    peak = pack.engine.peak_to_average_factor if peak_factor is None else peak_factor
    if peak < 1.0:
        raise ValidationError(f"peak_factor must be >= 1, got {peak}")
    ops = pack.ops(railroad)

    miles_by_arc: dict[ArcKey, float] = {}
    for i, flow in enumerate(assignment.flows):
        if assignment.served_by[i] != "alt":
            continue
        path = assignment.paths[i]
        for (u, v), m in zip(path.arcs(),
                             (b - a for a, b in zip(path.cum_miles, path.cum_miles[1:]))):
            miles_by_arc[(u, v)] = m

    demands = []
    for (arc, network, commodity), tons in sorted(assignment.link_tons.items()):
        if network != "alt":
            continue
        tonmiles_day = tons * miles_by_arc[arc] / DAYS_PER_YEAR
        if tonmiles_day == 0:
            continue
        energy = tonmiles_day * technology_energy_per_tonmile(ops, commodity, pack, technology)
        demands.append(LinkEnergyDemand(
            arc=arc, commodity=commodity,
            avg_energy_per_day=energy, peak_energy_per_day=energy * peak,
            tonmiles_per_day=tonmiles_day,
        ))
    return demands


def facility_reach(
    net: RailNetwork,
    facilities: set[str],
    enabled_arcs: set[ArcKey],
    range_miles: float,
) -> dict[str, set[ArcKey]]:
    """Arcs each facility can serve along enabled paths.

    A facility serves an arc if a locomotive can leave it fully charged,
    traverse the arc, and end at some facility within one range: that is
    the in-and-back-out rule when it returns to the same facility (far end
    within half the range) and the pass-through case on corridors between
    facility pairs. Every arc the enabling rules admit is then servable.
    """
    check_positive("range_miles", range_miles)
    dists = {
        f: shortest_distances(net, f, allowed_arcs=enabled_arcs)
        for f in sorted(facilities)
    }
    reach: dict[str, set[ArcKey]] = {f: set() for f in dists}
    inf = float("inf")
    for (u, v) in enabled_arcs:
        m = net.edge_miles(u, v)
        exit_u = min((d.get(u, inf) for d in dists.values()), default=inf)
        exit_v = min((d.get(v, inf) for d in dists.values()), default=inf)
        for f, df in dists.items():
            through = min(df.get(u, inf) + m + exit_v, df.get(v, inf) + m + exit_u)
            if through <= range_miles:
                reach[f].add((u, v))
    return reach


def _successive_shortest_paths(
    facilities: list[str],
    arcs: list[ArcKey],
    demand: dict[ArcKey, float],
    capacity: dict[str, float],
    cost: dict[tuple[str, ArcKey], float],
) -> dict[tuple[str, ArcKey], float]:
    """Transportation problem via successive shortest augmenting paths.

    Nodes: source 0, facilities 1..F, links F+1..F+L, sink F+L+1. All costs
    sit on facility->link edges; augmenting paths are found with
    Bellman-Ford over the residual graph (deterministic order).
    """
    n_f, n_l = len(facilities), len(arcs)
    source, sink = 0, n_f + n_l + 1
    f_idx = {f: 1 + i for i, f in enumerate(facilities)}
    l_idx = {a: 1 + n_f + i for i, a in enumerate(arcs)}

    # edge list: [u, v, cap, cost]; residual edges paired via xor 1
    edges: list[list[float]] = []
    graph: dict[int, list[int]] = {i: [] for i in range(sink + 1)}

    def add_edge(u: int, v: int, cap: float, c: float) -> None:
        graph[u].append(len(edges))
        edges.append([u, v, cap, c])
        graph[v].append(len(edges))
        edges.append([v, u, 0.0, -c])

    for f in facilities:
        add_edge(source, f_idx[f], capacity[f], 0.0)
    for (f, a), c in sorted(cost.items()):
        add_edge(f_idx[f], l_idx[a], float("inf"), c)
    for a in arcs:
        add_edge(l_idx[a], sink, demand[a], 0.0)

    total_demand = sum(demand.values())
    shipped = 0.0
    flow_on_edge = [0.0] * len(edges)

    while shipped < total_demand - 1e-12:
        dist = [float("inf")] * (sink + 1)
        parent_edge = [-1] * (sink + 1)
        dist[source] = 0.0
        for _ in range(sink + 1):
            changed = False
            for eid, (u, v, cap, c) in enumerate(edges):
                residual = cap - flow_on_edge[eid]
                if residual > 1e-12 and dist[u] + c < dist[v] - 1e-15:
                    dist[v] = dist[u] + c
                    parent_edge[v] = eid
                    changed = True
            if not changed:
                break
        if dist[sink] == float("inf"):
            raise UnreachableLinkError(
                "capacity infeasibility: remaining demand cannot be served"
            )
        bottleneck = float("inf")
        node = sink
        while node != source:
            eid = parent_edge[node]
            bottleneck = min(bottleneck, edges[eid][2] - flow_on_edge[eid])
            node = edges[eid][0]
        bottleneck = min(bottleneck, total_demand - shipped)
        node = sink
        while node != source:
            eid = parent_edge[node]
            flow_on_edge[eid] += bottleneck
            flow_on_edge[eid ^ 1] -= bottleneck
            node = edges[eid][0]
        shipped += bottleneck

    allocation: dict[tuple[str, ArcKey], float] = {}
    for eid, (u, v, cap, c) in enumerate(edges):
        if eid % 2 == 0 and 1 <= u <= n_f and flow_on_edge[eid] > 1e-12:
            allocation[(facilities[u - 1], arcs[v - 1 - n_f])] = flow_on_edge[eid]
    return allocation


def solve_allocation(
    demands: list[LinkEnergyDemand],
    facilities: set[str],
    reach: dict[str, set[ArcKey]],
    unit_costs: dict[str, float],
    capacities: dict[str, float] | None = None,
    unit: str = "kwh",
    facility_states: dict[str, str] | None = None,
) -> SizingSolution:
    """Serve all link energy demands at minimum total energy cost.

    Uncapacitated, each link goes entirely to its cheapest reachable
    facility (ties: smallest facility id); with capacities, the instance is
    solved as a transportation problem by successive shortest paths.
    """
    facility_list = sorted(facilities)
    for f in facility_list:
        if f not in unit_costs:
            raise ValidationError(f"no unit cost for facility {f!r}")

    avg_by_arc: dict[ArcKey, float] = {}
    peak_by_arc: dict[ArcKey, float] = {}
    tonmiles = 0.0
    for d in demands:
        avg_by_arc[d.arc] = avg_by_arc.get(d.arc, 0.0) + d.avg_energy_per_day
        peak_by_arc[d.arc] = peak_by_arc.get(d.arc, 0.0) + d.peak_energy_per_day
        tonmiles += d.tonmiles_per_day
    arcs = sorted(a for a, e in avg_by_arc.items() if e > 0)

    for arc in arcs:
        if not any(arc in reach.get(f, ()) for f in facility_list):
            raise UnreachableLinkError(
                f"link {arc[0]}-{arc[1]} is not reachable by any facility"
            )

    allocation: dict[tuple[str, ArcKey], float] = {}
    if capacities is None:
        for arc in arcs:
            best = min(
                (f for f in facility_list if arc in reach[f]),
                key=lambda f: (unit_costs[f], f),
            )
            allocation[(best, arc)] = avg_by_arc[arc]
    else:
        caps = {f: capacities.get(f, float("inf")) for f in facility_list}
        cost = {
            (f, arc): unit_costs[f]
            for f in facility_list
            for arc in arcs
            if arc in reach[f]
        }
        allocation = _successive_shortest_paths(
            facility_list, arcs, avg_by_arc, caps, cost
        )

    facility_avg = {f: 0.0 for f in facility_list}
    facility_peak = {f: 0.0 for f in facility_list}
    for (f, arc), energy in allocation.items():
        facility_avg[f] += energy
        ratio = peak_by_arc[arc] / avg_by_arc[arc]
        facility_peak[f] += energy * ratio
    cost_per_day = sum(e * unit_costs[f] for (f, _), e in allocation.items())

    return SizingSolution(
        unit=unit,
        allocation=allocation,
        facility_avg=facility_avg,
        facility_peak=facility_peak,
        energy_cost_per_day=cost_per_day,
        tonmiles_per_day=tonmiles,
        facility_states=dict(facility_states or {}),
    )


def facility_metrics(
    sol: SizingSolution,
    pack: ParameterPack,
    technology: str,
    max_utilization: float | None = None,
) -> list[FacilityLoad]:
    """Locomotive throughput and charger/pump counts per facility.

    The unit count is the smallest integer keeping peak-hour demand within
    the utilization bound; utilization is then recomputed from that count.
    """
    bound = pack.engine.max_station_utilization if max_utilization is None else max_utilization
    if bound <= 0:
        raise ValidationError(f"max_utilization must be > 0, got {bound}")
    if technology == "battery":
        event_energy = pack.battery.event_energy_kwh
        duration = pack.battery.event_duration_hours
    elif technology == "hydrogen":
        event_energy = pack.hydrogen.event_energy_kg
        duration = pack.hydrogen.event_duration_hours
    else:
        raise ValidationError(f"unknown technology {technology!r}")

    loads = []
    for f in sorted(sol.facility_avg):
        avg, peak = sol.facility_avg[f], sol.facility_peak[f]
        locos = avg / event_energy
        peak_locos = peak / event_energy
        unit_hours = peak_locos * duration
        units = 0 if peak <= 0 else math.ceil(unit_hours / (24.0 * bound))
        utilization = unit_hours / (units * 24.0) if units else 0.0
        loads.append(FacilityLoad(
            facility=f,
            state=sol.facility_states.get(f, ""),
            avg_energy_per_day=avg,
            peak_energy_per_day=peak,
            locomotives_per_day=locos,
            peak_locomotives_per_day=peak_locos,
            units=units,
            utilization=utilization,
        ))
    sol.loads = loads
    return loads


def tender_count(
    range_miles: float,
    ops: RailroadOps,
    intensity_btu_per_tonmile: float,
    pack: ParameterPack,
    technology: str,
) -> int:
    """Energy-storage tender cars per locomotive to traverse the range."""
    if range_miles < 0:
        raise ValidationError(f"range_miles must be >= 0, got {range_miles}")
    btu = range_miles * ops.tons_per_locomotive * intensity_btu_per_tonmile
    if technology == "battery":
        energy = btu / pack.battery.efficiency_ratio_vs_diesel / BTU_PER_KWH
        per_tender = pack.battery.event_energy_kwh
    elif technology == "hydrogen":
        energy = (btu / pack.hydrogen.efficiency_ratio_vs_diesel
                  / pack.hydrogen.lower_heating_value_btu_per_kg)
        per_tender = pack.hydrogen.tender_capacity_kg
    else:
        raise ValidationError(f"unknown technology {technology!r}")
    return max(1, math.ceil(energy / per_tender))
