"""Deterministic routing: O-D ranking, alternative subnetwork, assignment.

Shortest paths break mileage ties by the lexicographically smallest node-id
sequence, so identical inputs always produce identical routings. A flow is
served entirely by the alternative technology or entirely by diesel; the
penetration rate is the alternative share of ton-miles over assigned paths.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .network import RailNetwork, ODFlow
from .validation import ValidationError, check_fraction, check_nonnegative, check_positive

ArcKey = tuple[str, str]


class UnreachableError(ValidationError):
    """No route exists between the requested origin and destination."""


@dataclass(frozen=True)
class Path:
    nodes: tuple[str, ...]
    cum_miles: tuple[float, ...]

    @property
    def total_miles(self) -> float:
        return self.cum_miles[-1]

    def arcs(self) -> list[ArcKey]:
        return [arc_key(u, v) for u, v in zip(self.nodes, self.nodes[1:])]


def arc_key(u: str, v: str) -> ArcKey:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class RoutingPolicy:
    """How flows may use the alternative subnetwork.

    * ``no_reroute``: served only if the baseline path is fully enabled.
    * ``reroute``: served if some fully-enabled path is at most
      ``(1 + max_increase) x baseline miles``; the shortest such path is used.
    * ``endpoints``: like ``no_reroute``, and both endpoints must host
      facilities.
    """

    kind: str = "no_reroute"
    max_increase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("no_reroute", "reroute", "endpoints"):
            raise ValidationError(f"unknown routing policy {self.kind!r}")
        check_nonnegative("max_increase", self.max_increase)


def shortest_path(
    net: RailNetwork,
    origin: str,
    destination: str,
    allowed_arcs: set[ArcKey] | None = None,
) -> Path:
    """Minimum-mileage path with deterministic lexicographic tie-breaking.

    Labels are (miles, node-sequence) pairs; appending an arc preserves the
    label ordering, so the settled label at the destination is the smallest
    mileage and, among equals, the lexicographically smallest sequence.
    """
    for node in (origin, destination):
        if node not in net.nodes:
            raise ValidationError(f"unknown node {node!r}")
    if origin == destination:
        return Path((origin,), (0.0,))

    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (origin,))]
    settled: set[str] = set()
    while heap:
        dist, nodes = heapq.heappop(heap)
        tail = nodes[-1]
        if tail in settled:
            continue
        settled.add(tail)
        if tail == destination:
            cum = [0.0]
            for u, v in zip(nodes, nodes[1:]):
                cum.append(cum[-1] + net.edge_miles(u, v))
            return Path(nodes, tuple(cum))
        for nbr, miles in net.adjacency[tail]:
            if nbr in settled:
                continue
            if allowed_arcs is not None and arc_key(tail, nbr) not in allowed_arcs:
                continue
            heapq.heappush(heap, (dist + miles, nodes + (nbr,)))
    raise UnreachableError(f"no route from {origin!r} to {destination!r}")


def shortest_distances(
    net: RailNetwork, source: str, allowed_arcs: set[ArcKey] | None = None
) -> dict[str, float]:
    """Plain Dijkstra distances from one source (no path reconstruction)."""
    dist = {source: 0.0}
    heap = [(0.0, source)]
    settled: set[str] = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        for nbr, miles in net.adjacency[node]:
            if nbr in settled:
                continue
            if allowed_arcs is not None and arc_key(node, nbr) not in allowed_arcs:
                continue
            nd = d + miles
            if nd < dist.get(nbr, float("inf")):
                dist[nbr] = nd
                heapq.heappush(heap, (nd, nbr))
    return dist


def rank_od_pairs(
    flows: list[ODFlow], net: RailNetwork
) -> list[tuple[tuple[str, str], float]]:
    """O-D pairs (commodities aggregated) by descending annual ton-miles.

    Ton-miles use baseline shortest-path mileage; ties break on
    (origin id, destination id). Zero-ton-mile pairs are excluded.
    """
    tons: dict[tuple[str, str], float] = {}
    for f in flows:
        tons[(f.origin, f.destination)] = tons.get((f.origin, f.destination), 0.0) + f.tons_per_year
    ranked = []
    for (o, d), t in tons.items():
        miles = shortest_path(net, o, d).total_miles
        tonmiles = t * miles
        if tonmiles > 0:
            ranked.append(((o, d), tonmiles))
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


def rank_and_select_ods(
    flows: list[ODFlow], net: RailNetwork, coverage_ratio: float
) -> list[tuple[str, str]]:
    """Prefix of ranked O-D pairs that first reaches the coverage ratio."""
    check_fraction("coverage_ratio", coverage_ratio)
    ranked = rank_od_pairs(flows, net)
    total = sum(tm for _, tm in ranked)
    threshold = coverage_ratio * total
    selected: list[tuple[str, str]] = []
    cumulative = 0.0
    if cumulative >= threshold:
        return selected
    for pair, tonmiles in ranked:
        selected.append(pair)
        cumulative += tonmiles
        if cumulative >= threshold:
            break
    return selected


def build_alt_subnetwork(
    net: RailNetwork, facilities: set[str], range_miles: float
) -> set[ArcKey]:
    """Arcs traversable by the alternative technology given open facilities.

    An arc is enabled if it lies on a shortest facility-to-facility path of
    length at most the range (any tied shortest path counts), or if its far
    end is within half the range of some facility, so the in-and-back-out
    trip does not exceed the range.
    """
    check_positive("range_miles", range_miles)
    for f in facilities:
        if f not in net.nodes:
            raise ValidationError(f"facility {f!r} is not a network node")
    if not facilities:
        return set()

    dists = {f: shortest_distances(net, f) for f in sorted(facilities)}
    half = range_miles / 2.0
    enabled: set[ArcKey] = set()

    for (u, v), edge in net.edges.items():
        m = edge.miles
        near = min(
            (min(d.get(u, float("inf")), d.get(v, float("inf"))) for d in dists.values()),
            default=float("inf"),
        )
        if near + m <= half:
            enabled.add((u, v))
            continue
        for f, df in dists.items():
            du_f, dv_f = df.get(u, float("inf")), df.get(v, float("inf"))
            if min(du_f, dv_f) + m > range_miles:
                continue
            for g, dg in dists.items():
                fg = dg.get(f, float("inf"))
                if fg > range_miles:
                    continue
                # Arc on some shortest f-g path, in either orientation.
                if abs(du_f + m + dg.get(v, float("inf")) - fg) < 1e-9 or \
                   abs(dv_f + m + dg.get(u, float("inf")) - fg) < 1e-9:
                    enabled.add((u, v))
                    break
            else:
                continue
            break
    return enabled


@dataclass
class FlowAssignment:
    """Every flow assigned wholly to the alternative or diesel network."""

    served_by: dict[int, str]  # flow index -> "alt" | "diesel"
    paths: dict[int, Path]  # flow index -> assigned path
    flows: list[ODFlow]
    # (arc, network, commodity) -> annual tons
    link_tons: dict[tuple[ArcKey, str, str], float] = field(default_factory=dict)
    penetration: float = 0.0

    @property
    def alt_tonmiles_per_year(self) -> float:
        return sum(
            f.tons_per_year * self.paths[i].total_miles
            for i, f in enumerate(self.flows)
            if self.served_by[i] == "alt"
        )

    @property
    def total_tonmiles_per_year(self) -> float:
        return sum(
            f.tons_per_year * self.paths[i].total_miles for i, f in enumerate(self.flows)
        )

    def tonmiles_by_commodity(self, network: str) -> dict[str, float]:
        out: dict[str, float] = {}
        for i, f in enumerate(self.flows):
            if self.served_by[i] != network:
                continue
            out[f.commodity] = out.get(f.commodity, 0.0) + f.tons_per_year * self.paths[i].total_miles
        return out

    def link_records(self) -> list[dict]:
        records = []
        for (arc, network, commodity), tons in sorted(self.link_tons.items()):
            records.append({
                "from": arc[0], "to": arc[1], "network": network,
                "commodity": commodity, "tons": tons,
            })
        return records

    def to_dict(self) -> dict:
        return {"links": self.link_records(), "penetration": self.penetration}


def assign_flows(
    flows: list[ODFlow],
    net: RailNetwork,
    enabled_arcs: set[ArcKey],
    policy: RoutingPolicy,
    facilities: set[str],
) -> FlowAssignment:
    """Assign each flow to the alternative subnetwork or the diesel baseline."""
    for arc in enabled_arcs:
        if arc not in net.edges and (arc[1], arc[0]) not in net.edges:
            raise ValidationError(f"enabled arc {arc} is not a network arc")

    baseline_cache: dict[tuple[str, str], Path] = {}
    detour_cache: dict[tuple[str, str], Path | None] = {}

    def baseline(o: str, d: str) -> Path:
        if (o, d) not in baseline_cache:
            baseline_cache[(o, d)] = shortest_path(net, o, d)
        return baseline_cache[(o, d)]

    def enabled_path(o: str, d: str) -> Path | None:
        if (o, d) not in detour_cache:
            try:
                detour_cache[(o, d)] = shortest_path(net, o, d, allowed_arcs=enabled_arcs)
            except UnreachableError:
                detour_cache[(o, d)] = None
        return detour_cache[(o, d)]

    served_by: dict[int, str] = {}
    paths: dict[int, Path] = {}
    link_tons: dict[tuple[ArcKey, str, str], float] = {}

    for i, f in enumerate(flows):
        base = baseline(f.origin, f.destination)
        assigned = base
        network = "diesel"
        if policy.kind in ("no_reroute", "endpoints"):
            ok = all(arc in enabled_arcs for arc in base.arcs())
            if policy.kind == "endpoints":
                ok = ok and f.origin in facilities and f.destination in facilities
            if ok:
                network = "alt"
        else:  # reroute
            detour = enabled_path(f.origin, f.destination)
            if detour is not None and detour.total_miles <= (1.0 + policy.max_increase) * base.total_miles:
                network = "alt"
                assigned = detour

        served_by[i] = network
        paths[i] = assigned
        for arc in assigned.arcs():
            key = (arc, network, f.commodity)
            link_tons[key] = link_tons.get(key, 0.0) + f.tons_per_year

    assignment = FlowAssignment(served_by=served_by, paths=paths, flows=list(flows),
                                link_tons=link_tons)
    total = assignment.total_tonmiles_per_year
    assignment.penetration = assignment.alt_tonmiles_per_year / total if total > 0 else 0.0
    return assignment
