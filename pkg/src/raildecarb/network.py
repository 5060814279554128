"""Rail network and commodity demand ingestion.

CSV formats (UTF-8, comma-delimited, ``#``-prefixed comment lines ignored):

* node file:   ``id,name,state,lat,lon,candidate``
* edge file:   ``from,to,miles,owner`` (optional ``oneway`` column)
* demand file: ``origin,destination,commodity,tons_per_year``

Networks are validated on load (unique ids, known endpoints, positive
mileage), parallel edges are merged keeping the minimum mileage, and the
result is immutable thereafter: every downstream step treats the network
and flow list as shared read-only inputs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .params import COMMODITIES
from .validation import ValidationError, check_lat_lon, check_positive

EARTH_RADIUS_MILES = 3958.7613


def great_circle_miles(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance in miles."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_MILES * math.asin(math.sqrt(a))


@dataclass(frozen=True)
class NodeRecord:
    id: str
    name: str
    state: str
    lat: float
    lon: float
    candidate: bool


@dataclass(frozen=True)
class EdgeRecord:
    u: str
    v: str
    miles: float
    owner: str = ""
    one_way: bool = False

    def key(self) -> tuple[str, str]:
        if self.one_way:
            return (self.u, self.v)
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


@dataclass(frozen=True)
class ODFlow:
    origin: str
    destination: str
    commodity: str
    tons_per_year: float


@dataclass
class IngestReport:
    merged_edges: list[str] = field(default_factory=list)
    dropped_rows: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


class RailNetwork:
    """Directed-capable graph of candidate yards and track arcs.

    Treated as bidirectional unless an edge is flagged one-way. Instances
    are immutable after construction; mutating operations return new
    networks.
    """

    def __init__(self, nodes: list[NodeRecord], edges: list[EdgeRecord],
                 report: IngestReport | None = None):
        self.nodes: dict[str, NodeRecord] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise ValidationError(f"duplicate node id {n.id!r}")
            check_lat_lon(f"node {n.id}", n.lat, n.lon)
            if n.candidate and not n.state:
                raise ValidationError(f"candidate node {n.id!r} has no state code")
            self.nodes[n.id] = n

        self.report = report or IngestReport()
        merged: dict[tuple[str, str], EdgeRecord] = {}
        for e in edges:
            if e.u not in self.nodes:
                raise ValidationError(f"edge {e.u}-{e.v}: unknown endpoint {e.u!r}")
            if e.v not in self.nodes:
                raise ValidationError(f"edge {e.u}-{e.v}: unknown endpoint {e.v!r}")
            if e.miles <= 0:
                raise ValidationError(f"edge {e.u}-{e.v}: nonpositive mileage {e.miles}")
            if e.u == e.v:
                self.report.dropped_rows.append(f"self-loop {e.u}-{e.v} dropped")
                continue
            key = e.key()
            if key in merged:
                keep = merged[key] if merged[key].miles <= e.miles else e
                self.report.merged_edges.append(
                    f"parallel edge {key[0]}-{key[1]}: kept {keep.miles} mi"
                )
                merged[key] = keep
            else:
                merged[key] = e
        self.edges: dict[tuple[str, str], EdgeRecord] = dict(sorted(merged.items()))

        self.adjacency: dict[str, list[tuple[str, float]]] = {n: [] for n in self.nodes}
        for e in self.edges.values():
            self.adjacency[e.u].append((e.v, e.miles))
            if not e.one_way:
                self.adjacency[e.v].append((e.u, e.miles))
        for nbrs in self.adjacency.values():
            nbrs.sort()

        self._warn_if_disconnected()

    def _warn_if_disconnected(self) -> None:
        if not self.nodes:
            return
        seen: set[str] = set()
        components: list[list[str]] = []
        for start in sorted(self.nodes):
            if start in seen:
                continue
            stack, comp = [start], []
            seen.add(start)
            while stack:
                node = stack.pop()
                comp.append(node)
                for nbr, _ in self.adjacency[node]:
                    if nbr not in seen:
                        seen.add(nbr)
                        stack.append(nbr)
            components.append(sorted(comp))
        if len(components) > 1:
            summary = "; ".join(
                f"[{c[0]}..] size {len(c)}" for c in components
            )
            self.report.warnings.append(
                f"network has {len(components)} weakly connected components: {summary}"
            )

    @property
    def candidates(self) -> list[str]:
        return sorted(n.id for n in self.nodes.values() if n.candidate)

    def edge_miles(self, u: str, v: str) -> float:
        key = (u, v) if (u, v) in self.edges else (v, u)
        return self.edges[key].miles

    def node_rows(self) -> list[dict]:
        return [
            {"id": n.id, "name": n.name, "state": n.state, "lat": n.lat,
             "lon": n.lon, "candidate": n.candidate}
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
        ]

    def edge_rows(self) -> list[dict]:
        return [
            {"from": e.u, "to": e.v, "miles": e.miles, "owner": e.owner}
            for e in self.edges.values()
        ]


def _read_csv_rows(path: str | Path, required: tuple[str, ...]) -> list[tuple[int, dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        numbered = [
            (i, line) for i, line in enumerate(fh, start=1) if not line.startswith("#")
        ]
    if not numbered:
        raise ValidationError(f"{path}: empty file")
    reader = csv.DictReader([line for _, line in numbered])
    if reader.fieldnames is None:
        raise ValidationError(f"{path}: missing header row")
    header = [h.strip() for h in reader.fieldnames]
    missing = [col for col in required if col not in header]
    if missing:
        raise ValidationError(f"{path}: missing column(s) {missing}")
    line_numbers = [n for n, _ in numbered[1:]]
    return [
        (line_numbers[i], {k.strip(): (v or "").strip() for k, v in row.items()})
        for i, row in enumerate(reader)
    ]


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "y"):
        return True
    if lowered in ("0", "false", "no", "n", ""):
        return False
    raise ValidationError(f"cannot parse boolean value {raw!r}")


def load_network(node_file: str | Path, edge_file: str | Path) -> RailNetwork:
    """Load and validate a rail network from node and edge CSV files.

    Errors name the offending row; parallel edges are merged keeping the
    minimum mileage and recorded in ``net.report``.
    """
    nodes = []
    for line_no, row in _read_csv_rows(node_file, ("id", "name", "state", "lat", "lon", "candidate")):
        try:
            nodes.append(NodeRecord(
                id=row["id"], name=row["name"], state=row["state"],
                lat=float(row["lat"]), lon=float(row["lon"]),
                candidate=_parse_bool(row["candidate"]),
            ))
        except (ValueError, ValidationError) as exc:
            raise ValidationError(f"{node_file} row {line_no}: {exc}") from None

    edges = []
    for line_no, row in _read_csv_rows(edge_file, ("from", "to", "miles", "owner")):
        try:
            edges.append(EdgeRecord(
                u=row["from"], v=row["to"], miles=float(row["miles"]),
                owner=row["owner"], one_way=_parse_bool(row.get("oneway", "")),
            ))
        except ValueError as exc:
            raise ValidationError(f"{edge_file} row {line_no}: {exc}") from None

    try:
        return RailNetwork(nodes, edges)
    except ValidationError as exc:
        raise ValidationError(f"{edge_file}: {exc}") from None


def save_network(net: RailNetwork, node_file: str | Path, edge_file: str | Path) -> None:
    with open(node_file, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "name", "state", "lat", "lon", "candidate"])
        for row in net.node_rows():
            writer.writerow([row["id"], row["name"], row["state"], repr(row["lat"]),
                             repr(row["lon"]), str(row["candidate"]).lower()])
    with open(edge_file, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["from", "to", "miles", "owner"])
        for row in net.edge_rows():
            writer.writerow([row["from"], row["to"], repr(row["miles"]), row["owner"]])


def cluster_supernodes(net: RailNetwork, radius_miles: float) -> RailNetwork:
    """Merge nearby nodes into super-nodes placed at the member centroid.

    Greedy and deterministic: seeds are taken in ascending node-id order and
    absorb every still-unassigned node within ``radius_miles`` great-circle
    distance of the seed. Inter-cluster edges keep their original mileage;
    intra-cluster edges are dropped. The member-to-super mapping is exposed
    as ``net.merge_map`` on the result for demand remapping.
    """
    if radius_miles < 0:
        raise ValidationError(f"radius_miles must be >= 0, got {radius_miles}")
    if radius_miles == 0:
        out = RailNetwork(list(net.nodes.values()), list(net.edges.values()))
        out.merge_map = {n: n for n in net.nodes}
        return out

    assigned: dict[str, str] = {}
    members: dict[str, list[str]] = {}
    for seed_id in sorted(net.nodes):
        if seed_id in assigned:
            continue
        seed = net.nodes[seed_id]
        group = [
            n.id for n in net.nodes.values()
            if n.id not in assigned
            and great_circle_miles(seed.lat, seed.lon, n.lat, n.lon) <= radius_miles
        ]
        for member in group:
            assigned[member] = seed_id
        members[seed_id] = sorted(group)

    new_nodes = []
    for seed_id, group in members.items():
        recs = [net.nodes[m] for m in group]
        seed = net.nodes[seed_id]
        new_nodes.append(NodeRecord(
            id=seed_id,
            name=seed.name if len(group) == 1 else f"{seed.name}+{len(group) - 1}",
            state=seed.state,
            lat=sum(r.lat for r in recs) / len(recs),
            lon=sum(r.lon for r in recs) / len(recs),
            candidate=any(r.candidate for r in recs),
        ))

    new_edges = []
    for e in net.edges.values():
        cu, cv = assigned[e.u], assigned[e.v]
        if cu == cv:
            continue
        new_edges.append(replace(e, u=cu, v=cv))

    out = RailNetwork(new_nodes, new_edges)
    out.merge_map = dict(assigned)
    return out


def load_demand(path: str | Path, net: RailNetwork) -> list[ODFlow]:
    """Load annual O-D tonnages; duplicate (O, D, commodity) rows are summed.

    Zero-ton rows are dropped with a warning in ``net.report``; unknown
    nodes, non-candidate endpoints, unknown commodity labels, and negative
    tonnages are errors naming the row.
    """
    candidates = set(net.candidates)
    totals: dict[tuple[str, str, str], float] = {}
    for line_no, row in _read_csv_rows(path, ("origin", "destination", "commodity", "tons_per_year")):
        origin, dest, commodity = row["origin"], row["destination"], row["commodity"]
        for node in (origin, dest):
            if node not in net.nodes:
                raise ValidationError(f"{path} row {line_no}: unknown node id {node!r}")
            if node not in candidates:
                raise ValidationError(
                    f"{path} row {line_no}: node {node!r} is not a candidate facility location"
                )
        if origin == dest:
            raise ValidationError(f"{path} row {line_no}: origin equals destination {origin!r}")
        matched = next((c for c in COMMODITIES if c.lower() == commodity.lower()), None)
        if matched is None:
            raise ValidationError(
                f"{path} row {line_no}: unknown commodity {commodity!r}; "
                f"valid labels: {list(COMMODITIES)}"
            )
        try:
            tons = float(row["tons_per_year"])
        except ValueError:
            raise ValidationError(
                f"{path} row {line_no}: bad tonnage {row['tons_per_year']!r}"
            ) from None
        if tons < 0:
            raise ValidationError(f"{path} row {line_no}: negative tonnage {tons}")
        if tons == 0:
            net.report.dropped_rows.append(f"{path} row {line_no}: zero tonnage dropped")
            continue
        totals[(origin, dest, matched)] = totals.get((origin, dest, matched), 0.0) + tons

    return [
        ODFlow(o, d, c, tons) for (o, d, c), tons in sorted(totals.items())
    ]


def remap_demand(flows: list[ODFlow], merge_map: dict[str, str]) -> tuple[list[ODFlow], list[str]]:
    """Remap O-D endpoints onto super-nodes; same-cluster flows are dropped."""
    totals: dict[tuple[str, str, str], float] = {}
    dropped: list[str] = []
    for f in flows:
        o, d = merge_map[f.origin], merge_map[f.destination]
        if o == d:
            dropped.append(
                f"flow {f.origin}->{f.destination} ({f.commodity}) collapsed into {o}, dropped"
            )
            continue
        totals[(o, d, f.commodity)] = totals.get((o, d, f.commodity), 0.0) + f.tons_per_year
    return [ODFlow(o, d, c, t) for (o, d, c), t in sorted(totals.items())], dropped


def _connected_component_ids(net: RailNetwork) -> dict[str, int]:
    comp: dict[str, int] = {}
    label = 0
    for start in sorted(net.nodes):
        if start in comp:
            continue
        stack = [start]
        comp[start] = label
        while stack:
            node = stack.pop()
            for nbr, _ in net.adjacency[node]:
                if nbr not in comp:
                    comp[nbr] = label
                    stack.append(nbr)
        label += 1
    return comp


def synth_demand(
    net: RailNetwork,
    seed: int,
    n_pairs: int,
    commodity_mix: dict[str, float] | None = None,
    tons_band: tuple[float, float] = (1e4, 1e6),
) -> list[ODFlow]:
    """Seeded gravity-style synthetic demand over candidate node pairs.

    Pair weight is proportional to 1/distance (great-circle between the
    endpoints); unreachable pairs are excluded. Tonnage is log-uniform in
    ``tons_band`` and the commodity is drawn from ``commodity_mix``
    (uniform over the nine groups by default). Same seed, same output.
    """
    check_positive("n_pairs", n_pairs)
    candidates = net.candidates
    if not candidates:
        raise ValidationError("network has no candidate nodes")
    comp = _connected_component_ids(net)
    pairs = [
        (o, d)
        for o in candidates
        for d in candidates
        if o != d and comp[o] == comp[d]
    ]
    if n_pairs > len(pairs):
        raise ValidationError(
            f"n_pairs {n_pairs} exceeds routable candidate pair count {len(pairs)}"
        )

    mix = commodity_mix or {c: 1.0 for c in COMMODITIES}
    for c in mix:
        if c not in COMMODITIES:
            raise ValidationError(f"unknown commodity {c!r} in commodity_mix")
    mix_labels = sorted(mix)
    mix_weights = np.array([mix[c] for c in mix_labels], dtype=float)
    mix_weights = mix_weights / mix_weights.sum()

    weights = np.array([
        1.0 / max(great_circle_miles(net.nodes[o].lat, net.nodes[o].lon,
                                     net.nodes[d].lat, net.nodes[d].lon), 1.0)
        for o, d in pairs
    ])
    weights /= weights.sum()

    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(pairs), size=n_pairs, replace=False, p=weights)
    lo, hi = math.log(tons_band[0]), math.log(tons_band[1])
    tonnage = np.exp(rng.uniform(lo, hi, size=n_pairs))
    commodity_idx = rng.choice(len(mix_labels), size=n_pairs, p=mix_weights)

    flows = [
        ODFlow(pairs[p][0], pairs[p][1], mix_labels[ci], float(t))
        for p, t, ci in zip(chosen, tonnage, commodity_idx)
    ]
    flows.sort(key=lambda f: (f.origin, f.destination, f.commodity))
    return flows
