"""Rail freight decarbonization scenario engine.

Given a rail network, commodity O-D flows, and an energy-technology
configuration, the engine sites and sizes refueling/charging facilities,
routes flows, and evaluates well-to-wheel emissions, levelized operating
cost, and the cost of avoided emissions.
"""

from .network import (
    EdgeRecord,
    NodeRecord,
    ODFlow,
    RailNetwork,
    cluster_supernodes,
    load_demand,
    load_network,
    remap_demand,
    save_network,
    synth_demand,
)
from .params import (
    COMMODITIES,
    FacilityCostCurve,
    GridIntensityTable,
    ParameterPack,
)
from .routing import (
    FlowAssignment,
    Path,
    RoutingPolicy,
    assign_flows,
    build_alt_subnetwork,
    rank_and_select_ods,
    shortest_path,
)
from .siting import (
    FacilitySet,
    SitingInfeasibleError,
    SitingInstance,
    coverage_predicate,
    solve_exact,
    solve_greedy,
)
from .sizing import (
    FacilityLoad,
    LinkEnergyDemand,
    SizingSolution,
    facility_metrics,
    facility_reach,
    link_energy_demands,
    solve_allocation,
    tender_count,
)
from .lca import (
    battery_wtw,
    blend_wtw,
    diesel_wtw_per_tonmile,
    hydrogen_wtw,
    scenario_emissions,
)
from .tea import (
    LevelizedCost,
    NonPositiveAvoidanceError,
    battery_lco,
    cae,
    crf,
    dropin_lco,
    hydrogen_lco,
)
from .scenario import (
    DropInScenario,
    EvaluationReport,
    ScenarioConfig,
    StorageScenario,
    run_dropin,
    run_scenario,
    run_storage,
    target_deployment,
)
from .validation import ValidationError

__version__ = "0.1.0"

__all__ = [
    "COMMODITIES",
    "DropInScenario",
    "EdgeRecord",
    "EvaluationReport",
    "FacilityCostCurve",
    "FacilityLoad",
    "FacilitySet",
    "FlowAssignment",
    "GridIntensityTable",
    "LevelizedCost",
    "LinkEnergyDemand",
    "NodeRecord",
    "NonPositiveAvoidanceError",
    "ODFlow",
    "ParameterPack",
    "Path",
    "RailNetwork",
    "RoutingPolicy",
    "ScenarioConfig",
    "SitingInfeasibleError",
    "SitingInstance",
    "SizingSolution",
    "StorageScenario",
    "ValidationError",
    "assign_flows",
    "battery_lco",
    "battery_wtw",
    "blend_wtw",
    "build_alt_subnetwork",
    "cae",
    "cluster_supernodes",
    "coverage_predicate",
    "crf",
    "diesel_wtw_per_tonmile",
    "dropin_lco",
    "facility_metrics",
    "facility_reach",
    "hydrogen_lco",
    "hydrogen_wtw",
    "link_energy_demands",
    "load_demand",
    "load_network",
    "rank_and_select_ods",
    "remap_demand",
    "run_dropin",
    "run_scenario",
    "run_storage",
    "save_network",
    "scenario_emissions",
    "shortest_path",
    "solve_allocation",
    "solve_exact",
    "solve_greedy",
    "synth_demand",
    "target_deployment",
    "tender_count",
]
