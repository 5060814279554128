"""Scenario orchestration: drop-in and storage-technology pipelines.

Drop-in blends keep baseline routing and apply blended fuel factors
uniformly. Storage technologies (battery, hydrogen) run the sequential
pipeline: rank and select O-D pairs, site facilities, build the enabled
subnetwork and assign flows, size facilities, then evaluate emissions and
levelized costs. Deployment targeting extends the selected O-D prefix one
pair at a time until the achieved penetration reaches the target within
tolerance (undershoot is reported, not an error).

Reports are deterministic: identical config, seed, and inputs serialize to
byte-identical JSON (wall-clock timings are deliberately excluded from the
canonical document).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .base import ParamsMixin
from .lca import EmissionsSplit, scenario_emissions
from .network import ODFlow, RailNetwork
from .params import FacilityCostCurve, GridIntensityTable, ParameterPack, RAILROAD_GROUPS
from .routing import (
    FlowAssignment,
    RoutingPolicy,
    assign_flows,
    build_alt_subnetwork,
    rank_od_pairs,
    shortest_path,
)
from .siting import FacilitySet, SitingInstance, solve_exact, solve_greedy
from .sizing import (
    FacilityLoad,
    SizingSolution,
    facility_metrics,
    facility_reach,
    link_energy_demands,
    solve_allocation,
    tender_count,
)
from .tea import (
    LevelizedCost,
    NonPositiveAvoidanceError,
    battery_lco,
    cae,
    diesel_lco,
    dropin_lco,
    hydrogen_lco,
)
from .validation import ValidationError, check_fraction

SCHEMA_VERSION = 1
TECHNOLOGIES = ("diesel", "biodiesel", "efuel", "battery", "hydrogen")
DROPIN_TECHNOLOGIES = ("diesel", "biodiesel", "efuel")
STORAGE_TECHNOLOGIES = ("battery", "hydrogen")


@dataclass
class ScenarioConfig:
    railroad: str = "western"
    technology: str = "battery"
    blend_fraction: float = 0.0
    range_miles: float | None = None
    target_deployment: float = 0.5
    od_coverage_ratio: float | None = None
    policy: str = "no_reroute"
    reroute_max_increase: float = 0.0
    tolerance: float = 0.02
    siting_solver: str = "auto"  # auto | exact | greedy
    year: int | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.railroad not in RAILROAD_GROUPS:
            raise ValidationError(
                f"railroad must be one of {list(RAILROAD_GROUPS)}, got {self.railroad!r}"
            )
        if self.technology not in TECHNOLOGIES:
            raise ValidationError(
                f"technology must be one of {list(TECHNOLOGIES)}, got {self.technology!r}"
            )
        check_fraction("blend_fraction", self.blend_fraction)
        check_fraction("target_deployment", self.target_deployment)
        check_fraction("tolerance", self.tolerance)
        if self.od_coverage_ratio is not None:
            check_fraction("od_coverage_ratio", self.od_coverage_ratio)
        if self.technology in STORAGE_TECHNOLOGIES:
            if self.range_miles is None or self.range_miles <= 0:
                raise ValidationError(
                    "range_miles must be > 0 for storage technologies"
                )
        if self.policy not in ("no_reroute", "reroute", "endpoints"):
            raise ValidationError(f"unknown routing policy {self.policy!r}")
        if self.reroute_max_increase < 0:
            raise ValidationError("reroute_max_increase must be >= 0")
        if self.siting_solver not in ("auto", "exact", "greedy"):
            raise ValidationError(f"unknown siting solver {self.siting_solver!r}")

    def routing_policy(self) -> RoutingPolicy:
        if self.policy == "reroute":
            return RoutingPolicy("reroute", self.reroute_max_increase)
        return RoutingPolicy(self.policy)

    def to_dict(self) -> dict:
        return {
            "railroad": self.railroad,
            "technology": self.technology,
            "blend_fraction": self.blend_fraction,
            "range_miles": self.range_miles,
            "target_deployment": self.target_deployment,
            "od_coverage_ratio": self.od_coverage_ratio,
            "policy": self.policy,
            "reroute_max_increase": self.reroute_max_increase,
            "tolerance": self.tolerance,
            "siting_solver": self.siting_solver,
            "year": self.year,
            "seed": self.seed,
        }

    def content_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _round(value, digits):
    if value is None:
        return None
    return round(float(value), digits)


@dataclass
class EvaluationReport:
    config: ScenarioConfig
    penetration: float
    emissions: EmissionsSplit
    lco_alt: LevelizedCost | None
    lco_diesel_cents: float
    lco_scenario_avg_cents: float
    cae_usd_per_kg: float | None
    facilities: list[FacilityLoad] = field(default_factory=list)
    sited_facilities: list[str] = field(default_factory=list)
    enabled_arcs: list[tuple[str, str]] = field(default_factory=list)
    link_records: list[dict] = field(default_factory=list)
    od_pairs_selected: int = 0
    coverage_ratio: float = 0.0
    undershoot: bool = False
    infeasible_paths: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    tenders_per_locomotive: int | None = None
    totals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Serializable view; numbers are rounded here and only here."""
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "config_hash": self.config.content_hash(),
            "penetration": _round(self.penetration, 6),
            "emissions": {
                "diesel_kt_per_year": _round(self.emissions.diesel_kt_per_year, 4),
                "alt_kt_per_year": _round(self.emissions.alt_kt_per_year, 4),
                "scenario_g_per_tonmile": _round(self.emissions.scenario_g_per_tonmile, 3),
                "baseline_g_per_tonmile": _round(self.emissions.baseline_g_per_tonmile, 3),
                "reduction_fraction": _round(self.emissions.reduction_fraction, 4),
            },
            "lco": {
                "alternative": None if self.lco_alt is None else {
                    "components_cents_per_tonmile": {
                        k: _round(v, 2) for k, v in sorted(self.lco_alt.components.items())
                    },
                    "total_cents_per_tonmile": _round(self.lco_alt.cents_per_tonmile, 2),
                },
                "diesel_cents_per_tonmile": _round(self.lco_diesel_cents, 2),
                "scenario_average_cents_per_tonmile": _round(self.lco_scenario_avg_cents, 2),
            },
            "cae_usd_per_kg": _round(self.cae_usd_per_kg, 2),
            "facilities": [
                {
                    "id": l.facility,
                    "state": l.state,
                    "avg": _round(l.avg_energy_per_day, 1),
                    "peak": _round(l.peak_energy_per_day, 1),
                    "locos_per_day": _round(l.locomotives_per_day, 3),
                    "chargers": l.units,
                    "utilization": _round(l.utilization, 3),
                }
                for l in self.facilities
            ],
            "sited_facilities": list(self.sited_facilities),
            "enabled_arcs": [list(a) for a in self.enabled_arcs],
            "links": [
                {**rec, "tons": _round(rec["tons"], 1)} for rec in self.link_records
            ],
            "od_selection": {
                "pairs_selected": self.od_pairs_selected,
                "coverage_ratio": _round(self.coverage_ratio, 6),
            },
            "flags": {
                "undershoot": self.undershoot,
                "cae_defined": self.cae_usd_per_kg is not None,
            },
            "infeasible_paths": list(self.infeasible_paths),
            "notes": list(self.notes),
            "tenders_per_locomotive": self.tenders_per_locomotive,
            "totals": {k: _round(v, 2) for k, v in sorted(self.totals.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _weighted_intensity(
    assignment: FlowAssignment, pack: ParameterPack, railroad: str,
    network: str | None = None,
) -> float:
    """Ton-mile-weighted diesel energy intensity (BTU/ton-mile) of flows."""
    ops = pack.ops(railroad)
    num = den = 0.0
    for i, f in enumerate(assignment.flows):
        if network is not None and assignment.served_by[i] != network:
            continue
        tm = f.tons_per_year * assignment.paths[i].total_miles
        num += tm * ops.intensity(f.commodity)
        den += tm
    return num / den if den > 0 else 0.0


def _baseline_assignment(net: RailNetwork, flows: list[ODFlow]) -> FlowAssignment:
    return assign_flows(flows, net, set(), RoutingPolicy("no_reroute"), set())


def run_dropin(
    cfg: ScenarioConfig,
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack | None = None,
) -> EvaluationReport:
    """Uniform drop-in blend over baseline routing (pure factor arithmetic)."""
    pack = pack or ParameterPack()
    cfg.validate()
    if cfg.technology not in DROPIN_TECHNOLOGIES:
        raise ValidationError(f"run_dropin needs a drop-in technology, got {cfg.technology!r}")
    blend = 0.0 if cfg.technology == "diesel" else cfg.blend_fraction

    assignment = _baseline_assignment(net, flows)
    intensity = _weighted_intensity(assignment, pack, cfg.railroad)
    emissions = scenario_emissions(
        assignment, None, pack, cfg.railroad, cfg.technology, blend,
    )

    base_lco = diesel_lco(pack, intensity)
    if cfg.technology == "diesel" or blend == 0.0:
        alt = base_lco
    else:
        alt = dropin_lco(blend, cfg.technology, pack, intensity)

    cae_value: float | None
    try:
        cae_value = cae(
            alt.usd_per_tonmile, base_lco.usd_per_tonmile,
            emissions.scenario_g_per_tonmile / 1000.0,
            emissions.baseline_g_per_tonmile / 1000.0,
        )
    except NonPositiveAvoidanceError:
        cae_value = None

    return EvaluationReport(
        config=cfg,
        penetration=blend,
        emissions=emissions,
        lco_alt=alt,
        lco_diesel_cents=base_lco.cents_per_tonmile,
        lco_scenario_avg_cents=alt.cents_per_tonmile,
        cae_usd_per_kg=cae_value,
        link_records=assignment.link_records(),
        totals={
            "ton_miles_per_year": assignment.total_tonmiles_per_year,
            "alt_ton_miles_per_year": blend * assignment.total_tonmiles_per_year,
        },
        notes=["drop-in blend applied uniformly; penetration equals the admixture rate"],
    )


@dataclass
class StorageStep:
    """Intermediate artifacts of one storage-pipeline evaluation."""

    facilities: FacilitySet
    enabled_arcs: set
    assignment: FlowAssignment
    penetration: float


def _site_and_assign(
    cfg: ScenarioConfig,
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack,
    pairs: list[tuple[str, str]],
    on_infeasible: str,
    already_open: frozenset[str] | None = None,
) -> StorageStep:
    paths = [shortest_path(net, o, d) for o, d in pairs]
    facilities: FacilitySet
    if not paths and not already_open:
        facilities = FacilitySet([], [])
        enabled: set = set()
    else:
        inst = SitingInstance(paths, frozenset(net.candidates), cfg.range_miles)
        solver = cfg.siting_solver
        if solver == "auto":
            useful = {n for p in paths for n in p.nodes if n in inst.candidates}
            solver = "exact" if len(useful) <= pack.engine.exact_siting_limit else "greedy"
        if solver == "exact":
            facilities = solve_exact(
                inst, exhaustive_limit=pack.engine.exact_siting_limit,
                on_infeasible=on_infeasible, already_open=already_open,
            )
        else:
            facilities = solve_greedy(inst, on_infeasible=on_infeasible,
                                      already_open=already_open)
        enabled = build_alt_subnetwork(net, set(facilities.facilities), cfg.range_miles)

    assignment = assign_flows(
        flows, net, enabled, cfg.routing_policy(), set(facilities.facilities)
    )
    return StorageStep(facilities, enabled, assignment, assignment.penetration)


def _evaluate_storage(
    cfg: ScenarioConfig,
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack,
    grid: GridIntensityTable,
    costcurve: FacilityCostCurve | None,
    step: StorageStep,
    coverage_ratio: float,
    undershoot: bool,
) -> EvaluationReport:
    assignment = step.assignment
    technology = cfg.technology

    sizing: SizingSolution | None = None
    loads: list[FacilityLoad] = []
    alt_lco: LevelizedCost | None = None
    tenders: int | None = None
    notes = [
        "diesel-side emissions for rerouted flows use assigned-path miles",
        "energy allocation precedes state pricing; prices do not steer siting",
    ]

    demands = link_energy_demands(assignment, pack, cfg.railroad, technology)
    if demands and step.facilities.facilities:
        open_set = set(step.facilities.facilities)
        reach = facility_reach(net, open_set, step.enabled_arcs, cfg.range_miles)
        states = {f: net.nodes[f].state for f in open_set}
        if technology == "battery":
            unit_costs = {
                f: grid.price_usd_per_kwh(states[f], cfg.year) for f in open_set
            }
            unit = "kwh"
        else:
            unit_costs = {f: pack.hydrogen.fuel_cost_usd_per_kg for f in open_set}
            unit = "kgh2"
        sizing = solve_allocation(
            demands, open_set, reach, unit_costs, unit=unit, facility_states=states
        )
        loads = facility_metrics(sizing, pack, technology)

        basis_intensity = _weighted_intensity(assignment, pack, cfg.railroad, network="alt")
        tenders = tender_count(
            cfg.range_miles, pack.ops(cfg.railroad), basis_intensity, pack, technology
        )
        if technology == "battery":
            alt_lco = battery_lco(sizing, costcurve, pack, cfg.railroad, grid,
                                  tenders=tenders, year=cfg.year)
        else:
            alt_lco = hydrogen_lco(sizing, costcurve, pack, cfg.railroad, tenders=tenders)

    emissions = scenario_emissions(
        assignment, sizing, pack, cfg.railroad, technology,
        grid=grid, year=cfg.year,
    )

    baseline_cents = diesel_lco(pack, _weighted_intensity(assignment, pack, cfg.railroad)).cents_per_tonmile
    diesel_side_intensity = _weighted_intensity(assignment, pack, cfg.railroad, network="diesel")
    diesel_side_cents = (
        diesel_lco(pack, diesel_side_intensity).cents_per_tonmile
        if diesel_side_intensity > 0 else 0.0
    )
    pen = step.penetration
    if alt_lco is not None:
        scenario_avg = pen * alt_lco.cents_per_tonmile + (1 - pen) * diesel_side_cents
    else:
        scenario_avg = diesel_side_cents

    cae_value: float | None
    try:
        cae_value = cae(
            scenario_avg / 100.0, baseline_cents / 100.0,
            emissions.scenario_g_per_tonmile / 1000.0,
            emissions.baseline_g_per_tonmile / 1000.0,
        )
    except NonPositiveAvoidanceError:
        cae_value = None

    return EvaluationReport(
        config=cfg,
        penetration=pen,
        emissions=emissions,
        lco_alt=alt_lco,
        lco_diesel_cents=baseline_cents,
        lco_scenario_avg_cents=scenario_avg,
        cae_usd_per_kg=cae_value,
        facilities=loads,
        sited_facilities=list(step.facilities.facilities),
        enabled_arcs=sorted(step.enabled_arcs),
        link_records=assignment.link_records(),
        od_pairs_selected=0,
        coverage_ratio=coverage_ratio,
        undershoot=undershoot,
        infeasible_paths=list(step.facilities.infeasible_details),
        notes=notes,
        tenders_per_locomotive=tenders,
        totals={
            "ton_miles_per_year": assignment.total_tonmiles_per_year,
            "alt_ton_miles_per_year": assignment.alt_tonmiles_per_year,
            "energy_cost_per_day": sizing.energy_cost_per_day if sizing else 0.0,
        },
    )


def run_storage(
    cfg: ScenarioConfig,
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack | None = None,
    grid: GridIntensityTable | None = None,
    costcurve: FacilityCostCurve | None = None,
    coverage_ratio: float | None = None,
) -> EvaluationReport:
    """One pass of the sequential storage pipeline at a fixed coverage ratio.

    Siting infeasibility propagates with the offending paths; use
    :func:`target_deployment` to skip uncoverable paths instead.
    """
    pack = pack or ParameterPack()
    grid = grid or _default_grid(pack)
    cfg.validate()
    if cfg.technology not in STORAGE_TECHNOLOGIES:
        raise ValidationError(f"run_storage needs battery or hydrogen, got {cfg.technology!r}")
    ratio = coverage_ratio
    if ratio is None:
        ratio = cfg.od_coverage_ratio if cfg.od_coverage_ratio is not None else cfg.target_deployment
    check_fraction("coverage_ratio", ratio)

    ranked = rank_od_pairs(flows, net)
    total_tm = sum(tm for _, tm in ranked)
    threshold = ratio * total_tm
    pairs: list[tuple[str, str]] = []
    cumulative = 0.0
    for pair, tm in ranked:
        if cumulative >= threshold:
            break
        pairs.append(pair)
        cumulative += tm

    step = _site_and_assign(cfg, net, flows, pack, pairs, on_infeasible="raise")
    report = _evaluate_storage(
        cfg, net, flows, pack, grid, costcurve, step,
        coverage_ratio=(cumulative / total_tm if total_tm else 0.0),
        undershoot=False,
    )
    report.od_pairs_selected = len(pairs)
    return report


def target_deployment(
    cfg: ScenarioConfig,
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack | None = None,
    grid: GridIntensityTable | None = None,
    costcurve: FacilityCostCurve | None = None,
) -> tuple[float, EvaluationReport]:
    """Extend the ranked O-D prefix until penetration reaches the target.

    Facility growth is incremental: facilities opened for an earlier prefix
    stay open and each step adds the minimum set covering the newly
    selected path, so achieved penetration is nondecreasing along the
    roll-out. Paths that cannot be covered at the configured range are
    skipped (they stay on diesel) and the achieved penetration may
    undershoot the target.
    """
    pack = pack or ParameterPack()
    grid = grid or _default_grid(pack)
    cfg.validate()
    if cfg.technology not in STORAGE_TECHNOLOGIES:
        raise ValidationError(f"target_deployment needs battery or hydrogen, got {cfg.technology!r}")
    target = cfg.target_deployment
    tolerance = cfg.tolerance

    ranked = rank_od_pairs(flows, net)
    total_tm = sum(tm for _, tm in ranked)

    best_step = _site_and_assign(cfg, net, flows, pack, [], on_infeasible="drop")
    cumulative = 0.0
    pairs: list[tuple[str, str]] = []
    achieved = best_step.penetration

    if target > 0:
        opened: frozenset[str] = frozenset()
        for pair, tm in ranked:
            if achieved >= target - tolerance:
                break
            pairs.append(pair)
            cumulative += tm
            best_step = _site_and_assign(
                cfg, net, flows, pack, pairs, on_infeasible="drop",
                already_open=opened,
            )
            opened = frozenset(best_step.facilities.facilities)
            achieved = best_step.penetration

    coverage = cumulative / total_tm if total_tm else 0.0
    undershoot = achieved < target - tolerance
    report = _evaluate_storage(
        cfg, net, flows, pack, grid, costcurve, best_step,
        coverage_ratio=coverage, undershoot=undershoot,
    )
    report.od_pairs_selected = len(pairs)
    return coverage, report


def _default_grid(pack: ParameterPack) -> GridIntensityTable:
    return GridIntensityTable(
        {},
        default_g_per_kwh=pack.engine.default_grid_g_per_kwh,
        default_price_usd_per_kwh=pack.battery.default_charging_cost_usd_per_kwh,
    )


def run_scenario(
    cfg: ScenarioConfig,
    net: RailNetwork,
    flows: list[ODFlow],
    pack: ParameterPack | None = None,
    grid: GridIntensityTable | None = None,
    costcurve: FacilityCostCurve | None = None,
) -> EvaluationReport:
    """Dispatch on technology: drop-in report or deployment-targeted storage run."""
    cfg.validate()
    if cfg.technology in DROPIN_TECHNOLOGIES:
        return run_dropin(cfg, net, flows, pack)
    if cfg.od_coverage_ratio is not None:
        return run_storage(cfg, net, flows, pack, grid, costcurve)
    _, report = target_deployment(cfg, net, flows, pack, grid, costcurve)
    return report


class DropInScenario(ParamsMixin):
    """Estimator-style wrapper for drop-in blend evaluations.

    After :meth:`fit`, the evaluation is available as ``report_`` and the
    baseline flow assignment as ``assignment_``.
    """

    def __init__(self, fuel: str = "biodiesel", blend: float = 0.5,
                 railroad: str = "western", pack: ParameterPack | None = None):
        self.fuel = fuel
        self.blend = blend
        self.railroad = railroad
        self.pack = pack

    def _config(self) -> ScenarioConfig:
        return ScenarioConfig(
            railroad=self.railroad, technology=self.fuel, blend_fraction=self.blend
        )

    def fit(self, net: RailNetwork, flows: list[ODFlow]) -> "DropInScenario":
        cfg = self._config()
        self.report_ = run_dropin(cfg, net, flows, self.pack)
        self.assignment_ = _baseline_assignment(net, flows)
        return self


class StorageScenario(ParamsMixin):
    """Estimator-style wrapper for the five-step storage pipeline.

    ``fit`` sites facilities and sizes them for the given network and
    demand; fitted state lands in ``facilities_``, ``enabled_arcs_``,
    ``assignment_``, ``achieved_penetration_``, and ``report_``.
    ``transform`` assigns a new flow list on the fitted subnetwork.
    """

    def __init__(self, technology: str = "battery", range_miles: float = 400.0,
                 target_deployment: float = 0.5, policy: str = "no_reroute",
                 reroute_max_increase: float = 0.0, tolerance: float = 0.02,
                 railroad: str = "western", year: int | None = None, seed: int = 0,
                 pack: ParameterPack | None = None,
                 grid: GridIntensityTable | None = None,
                 costcurve: FacilityCostCurve | None = None):
        self.technology = technology
        self.range_miles = range_miles
        self.target_deployment = target_deployment
        self.policy = policy
        self.reroute_max_increase = reroute_max_increase
        self.tolerance = tolerance
        self.railroad = railroad
        self.year = year
        self.seed = seed
        self.pack = pack
        self.grid = grid
        self.costcurve = costcurve

    def _config(self) -> ScenarioConfig:
        return ScenarioConfig(
            railroad=self.railroad, technology=self.technology,
            range_miles=self.range_miles, target_deployment=self.target_deployment,
            policy=self.policy, reroute_max_increase=self.reroute_max_increase,
            tolerance=self.tolerance, year=self.year, seed=self.seed,
        )

    def fit(self, net: RailNetwork, flows: list[ODFlow]) -> "StorageScenario":
        cfg = self._config()
        coverage, report = target_deployment(
            cfg, net, flows, self.pack, self.grid, self.costcurve
        )
        self.net_ = net
        self.coverage_ratio_ = coverage
        self.report_ = report
        self.facilities_ = list(report.sited_facilities)
        self.enabled_arcs_ = {tuple(a) for a in report.enabled_arcs}
        self.achieved_penetration_ = report.penetration
        return self

    def transform(self, flows: list[ODFlow]) -> FlowAssignment:
        if not hasattr(self, "enabled_arcs_"):
            raise ValidationError("StorageScenario is not fitted yet")
        return assign_flows(
            flows, self.net_, set(self.enabled_arcs_),
            self._config().routing_policy(), set(self.facilities_),
        )
