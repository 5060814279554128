"""Acceptance suite: every exit criterion at its stated tolerance.

Each criterion runs as one test and prints a PASS/FAIL line (run with
``pytest tests/test_acceptance.py -v -s`` to see them live). Expected
values are frozen from independent oracles: exhaustive subset enumeration
over the coverage predicate, a linear-programming transportation oracle,
annuity summation, and a hand-worked corridor fixture computed from first
principles before the engine was wired together.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.optimize import linprog

from raildecarb.lca import diesel_wtw_per_tonmile
from raildecarb.network import ODFlow, synth_demand
from raildecarb.params import GridIntensityTable, ParameterPack
from raildecarb.routing import RoutingPolicy, Path, assign_flows, rank_od_pairs
from raildecarb.scenario import (
    ScenarioConfig,
    _site_and_assign,
    run_dropin,
    run_scenario,
    run_storage,
    target_deployment,
)
from raildecarb.siting import (
    SitingInfeasibleError,
    SitingInstance,
    coverage_predicate,
    solve_exact,
    solve_greedy,
)
from raildecarb.sizing import LinkEnergyDemand, facility_metrics, solve_allocation

from conftest import line_network

PACK = ParameterPack()


def criterion(label):
    """Print one PASS/FAIL line per acceptance criterion."""

    def wrap(fn):
        def run(*args, **kwargs):
            try:
                out = fn(*args, **kwargs)
            except BaseException:
                print(f"[ACCEPTANCE] {label}: FAIL")
                raise
            print(f"[ACCEPTANCE] {label}: PASS")
            return out

        run.__name__ = fn.__name__
        return run

    return wrap


# --- drop-in factor arithmetic ------------------------------------------------


def _demand_instances():
    net = line_network({"A": 0.0, "B": 120.0, "C": 260.0, "D": 400.0})
    return net, [
        [ODFlow("A", "D", "Coal", 1e6)],
        [ODFlow("A", "B", "Intermodal", 321.0), ODFlow("B", "D", "Others", 77.0)],
        synth_demand(net, seed=11, n_pairs=8),
    ]


@criterion("C1 biodiesel 50%: reduction within 0.5pp of 35.8%, CAE within $0.005 of $0.1275")
def test_c1_biodiesel_half():
    net, instances = _demand_instances()
    cfg = ScenarioConfig(technology="biodiesel", blend_fraction=0.5)
    for flows in instances:
        start = time.monotonic()
        report = run_dropin(cfg, net, flows)
        elapsed = time.monotonic() - start
        assert abs(report.emissions.reduction_fraction - 0.358) <= 0.005
        assert abs(report.cae_usd_per_kg - 0.1275) <= 0.005
        assert elapsed < 0.5  # factor arithmetic, sub-second on any demand


@criterion("C2 e-fuel 50%: reduction within 0.5pp of 49.7%, CAE within $0.005 of $0.2213")
def test_c2_efuel_half():
    net, instances = _demand_instances()
    cfg = ScenarioConfig(technology="efuel", blend_fraction=0.5)
    for flows in instances:
        report = run_dropin(cfg, net, flows)
        assert abs(report.emissions.reduction_fraction - 0.497) <= 0.005
        assert abs(report.cae_usd_per_kg - 0.2213) <= 0.005


@criterion("C3 fuel-totals identity: 1e6 gal over 1e9 ton-mi = 12.36 g/ton-mi (1e-6 rel)")
def test_c3_fuel_totals_identity():
    got = diesel_wtw_per_tonmile(1e6, 1e9)
    assert abs(got - 12.36) / 12.36 <= 1e-6


# --- siting oracle equivalence --------------------------------------------------


def _random_siting_instance(rng) -> SitingInstance:
    n = int(rng.integers(2, 11))  # at most 10 candidate nodes
    length = float(rng.uniform(150.0, 1200.0))
    positions = sorted(float(x) for x in rng.uniform(0.0, length, size=n))
    ids = [f"c{i:02d}" for i in range(n)]
    paths = []
    for _ in range(int(rng.integers(1, 4))):  # at most 3 paths
        i, j = sorted(rng.choice(n, size=2, replace=False))
        nodes = tuple(ids[i:j + 1])
        cum = tuple(p - positions[i] for p in positions[i:j + 1])
        paths.append(Path(nodes, cum))
    return SitingInstance(paths, frozenset(ids), float(rng.uniform(60.0, 800.0)))


def _oracle_minimum(inst: SitingInstance):
    """Exhaustive subset enumeration directly against the coverage predicate."""
    universe = sorted(inst.candidates)
    for k in range(len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            opened = set(combo)
            if all(coverage_predicate(p, opened, inst.range_miles) for p in inst.paths):
                return list(combo)
    return None


@criterion("C4 siting: exact matches exhaustive oracle on 1000 instances; greedy feasible, never smaller; <60s")
def test_c4_siting_oracle_equivalence():
    rng = np.random.default_rng(2024)
    start = time.monotonic()
    infeasible_count = 0
    for _ in range(1000):
        inst = _random_siting_instance(rng)
        expected = _oracle_minimum(inst)
        if expected is None:
            infeasible_count += 1
            with pytest.raises(SitingInfeasibleError):
                solve_exact(inst)
            with pytest.raises(SitingInfeasibleError):
                solve_greedy(inst)
            continue
        exact = solve_exact(inst)
        assert len(exact.facilities) == len(expected)
        assert exact.facilities == expected  # same lexicographic tie-break
        opened = set(exact.facilities)
        assert all(coverage_predicate(p, opened, inst.range_miles) for p in inst.paths)
        greedy = solve_greedy(inst)
        greedy_open = set(greedy.facilities)
        assert all(coverage_predicate(p, greedy_open, inst.range_miles) for p in inst.paths)
        assert len(greedy.facilities) >= len(exact.facilities)
    elapsed = time.monotonic() - start
    assert elapsed < 60.0, f"siting suite took {elapsed:.1f}s"
    assert 0 < infeasible_count < 1000  # both regimes exercised


# --- allocation oracle equivalence ----------------------------------------------


def _lp_oracle(cost_matrix, capacities, demands):
    n_f, n_l = cost_matrix.shape
    c, bounds = [], []
    for f in range(n_f):
        for l in range(n_l):
            if np.isinf(cost_matrix[f][l]):
                c.append(0.0)
                bounds.append((0.0, 0.0))
            else:
                c.append(float(cost_matrix[f][l]))
                bounds.append((0.0, None))
    a_eq = []
    for l in range(n_l):
        row = [0.0] * (n_f * n_l)
        for f in range(n_f):
            row[f * n_l + l] = 1.0
        a_eq.append(row)
    a_ub, b_ub = [], []
    for f in range(n_f):
        if np.isinf(capacities[f]):
            continue
        row = [0.0] * (n_f * n_l)
        for l in range(n_l):
            row[f * n_l + l] = 1.0
        a_ub.append(row)
        b_ub.append(capacities[f])
    res = linprog(c, A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq,
                  b_eq=demands, bounds=bounds, method="highs")
    return res


@criterion("C5 allocation: uncapacitated equals closed form exactly; capacitated within 1e-9 of LP oracle")
def test_c5_allocation_oracle_equivalence():
    rng = np.random.default_rng(77)

    # Uncapacitated: exact equality with the per-link argmin closed form.
    for _ in range(60):
        n_f, n_l = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        facilities = [f"F{i}" for i in range(n_f)]
        arcs = [(f"u{j}", f"v{j}") for j in range(n_l)]
        prices = {f: float(rng.uniform(0.05, 0.5)) for f in facilities}
        reach = {f: {a for a in arcs if rng.random() < 0.8} for f in facilities}
        if {a for f in facilities for a in reach[f]} != set(arcs):
            continue
        demands = [LinkEnergyDemand(a, "Coal", float(rng.uniform(1, 1000)),
                                    float(rng.uniform(1, 1000)) * 1.2, 1.0)
                   for a in arcs]
        sol = solve_allocation(demands, set(facilities), reach, prices)
        closed_form = sum(
            d.avg_energy_per_day * min(prices[f] for f in facilities if d.arc in reach[f])
            for d in demands
        )
        assert sol.energy_cost_per_day == closed_form

    # Capacitated 4x6 against the LP oracle.
    checked = 0
    while checked < 25:
        facilities = [f"F{i}" for i in range(4)]
        arcs = [(f"u{j}", f"v{j}") for j in range(6)]
        prices = {f: float(rng.uniform(0.05, 0.5)) for f in facilities}
        reach = {f: {a for a in arcs if rng.random() < 0.7} for f in facilities}
        if {a for f in facilities for a in reach[f]} != set(arcs):
            continue
        demands = [LinkEnergyDemand(a, "Coal", float(rng.integers(1, 500)),
                                    float(rng.integers(1, 500)) * 1.2, 1.0)
                   for a in arcs]
        caps = {f: (float(rng.integers(200, 1500)) if rng.random() < 0.7 else np.inf)
                for f in facilities}
        if sum(caps.values()) < sum(d.avg_energy_per_day for d in demands):
            continue
        cost_matrix = np.array([
            [prices[f] if a in reach[f] else np.inf for a in arcs] for f in facilities
        ])
        lp = _lp_oracle(cost_matrix, [caps[f] for f in facilities],
                        [d.avg_energy_per_day for d in demands])
        try:
            sol = solve_allocation(demands, set(facilities), reach, prices,
                                   capacities=caps)
        except Exception:
            assert not lp.success
            checked += 1
            continue
        assert lp.success
        assert sol.energy_cost_per_day == pytest.approx(lp.fun, rel=1e-9)
        checked += 1


# --- charger sizing ---------------------------------------------------------------


@criterion("C6 charger sizing: 11,200 kWh and 3.733 h per event exact; count minimal under the bound")
def test_c6_charger_sizing():
    event = PACK.battery.event_energy_kwh
    duration = PACK.battery.event_duration_hours
    assert event == 14.0 * 1000.0 * 0.8 == 11200.0
    assert duration == 11200.0 / 3000.0
    assert round(duration, 3) == 3.733

    from raildecarb.sizing import SizingSolution

    rng = np.random.default_rng(6)
    bound = PACK.engine.max_station_utilization
    for _ in range(60):
        peak = float(rng.uniform(50.0, 8e5))
        sol = SizingSolution(
            unit="kwh", allocation={}, facility_avg={"F": peak / 1.2},
            facility_peak={"F": peak}, energy_cost_per_day=0.0,
            tonmiles_per_day=1.0, facility_states={"F": "IL"},
        )
        load = facility_metrics(sol, PACK, "battery")[0]
        hours = load.peak_locomotives_per_day * duration
        assert load.units >= 1
        assert hours / (load.units * 24.0) <= bound + 1e-12
        if load.units > 1:  # decrement violates the bound
            assert hours / ((load.units - 1) * 24.0) > bound


# --- monotonicity suite --------------------------------------------------------


def _random_toy(rng):
    n = int(rng.integers(4, 9))
    positions = {f"n{i:02d}": float(x)
                 for i, x in enumerate(sorted(rng.uniform(0.0, 600.0, size=n)))}
    net = line_network(positions)
    ids = sorted(positions, key=lambda k: positions[k])
    flows = []
    for _ in range(int(rng.integers(2, 5))):
        a, b = rng.choice(n, size=2, replace=False)
        flows.append(ODFlow(ids[min(a, b)], ids[max(a, b)], "Coal",
                            float(rng.integers(1, 200))))
    return net, flows


@criterion("C7 monotonicity: penetration nondecreasing in O-D prefix, range, and enabled-arc superset (200 toys)")
def test_c7_monotonicity_suite():
    rng = np.random.default_rng(31415)
    for _ in range(200):
        net, flows = _random_toy(rng)
        ranked = [p for p, _ in rank_od_pairs(flows, net)]

        # (a) O-D prefix length, facilities grown as in the targeting loop.
        r = float(rng.uniform(150.0, 500.0))
        cfg = ScenarioConfig(technology="battery", range_miles=r, siting_solver="exact")
        opened: frozenset = frozenset()
        previous = -1.0
        for k in range(len(ranked) + 1):
            step = _site_and_assign(cfg, net, flows, PACK, ranked[:k],
                                    on_infeasible="drop", already_open=opened)
            opened = frozenset(step.facilities.facilities)
            assert step.penetration >= previous - 1e-12
            previous = step.penetration

        # (b) locomotive range at full selection.
        previous = -1.0
        for r2 in (120.0, 220.0, 350.0, 600.0):
            cfg2 = ScenarioConfig(technology="battery", range_miles=r2,
                                  siting_solver="exact")
            step = _site_and_assign(cfg2, net, flows, PACK, ranked,
                                    on_infeasible="drop")
            assert step.penetration >= previous - 1e-12
            previous = step.penetration

        # (c) enabled-arc superset at fixed policy.
        arcs = sorted(net.edges)
        k = int(rng.integers(0, len(arcs)))
        subset = {arcs[i] for i in rng.choice(len(arcs), size=k, replace=False)}
        superset = subset | {arcs[int(rng.integers(0, len(arcs)))]}
        pen_sub = assign_flows(flows, net, subset, RoutingPolicy(), set()).penetration
        pen_sup = assign_flows(flows, net, superset, RoutingPolicy(), set()).penetration
        assert pen_sup >= pen_sub - 1e-12


# --- determinism -----------------------------------------------------------------


@criterion("C8 determinism: identical config+seed gives byte-identical reports")
def test_c8_byte_determinism():
    net = line_network({"A": 0.0, "B": 100.0, "C": 250.0, "D": 350.0})
    flows = [ODFlow("A", "D", "Coal", 1e6), ODFlow("B", "C", "Intermodal", 5e3)]
    for cfg in (
        ScenarioConfig(technology="battery", range_miles=400.0,
                       target_deployment=1.0, seed=3),
        ScenarioConfig(technology="hydrogen", range_miles=900.0,
                       target_deployment=0.7, seed=9),
        ScenarioConfig(technology="biodiesel", blend_fraction=0.4, seed=1),
    ):
        first = run_scenario(cfg, net, flows, PACK).to_json().encode()
        second = run_scenario(cfg, net, flows, PACK).to_json().encode()
        assert first == second


# --- hand-solved corridor fixture ------------------------------------------------

# Corridor A(0) B(100) C(250) D(350), one million tons of coal per year
# A->D, battery at range 400, grid 400 g/kWh at $0.10/kWh. Worked by hand:
#   kWh/ton-mile  = 107 / 2.44 / 3412                     = 0.012852420579247787
#   facilities    = {A, C}  (minimum cover, lexicographic tie-break)
#   allocation    = A serves A-B and B-C, C serves C-D (price tie, smaller id)
#   A avg         = (100+150) miles * 1e6/365 t/d * kWh/tm = 8803.027794005333
#   C avg         = 100 miles * 1e6/365 * kWh/tm           = 3521.211117602133
#   chargers      = 1 each; A util 0.14671712990008887, C util 0.05868685196
#   alt emissions = 12324.238911607466 kWh/d * 400 g * 365 = 1.79933888109469 kt/y
#   scenario WTW  = 5.140968231699115 g/tm vs baseline 10.213456073149635
#   tenders       = ceil(6780.94 kWh / 11200)              = 1
#   LCO cents/tm  = 0.12 + 0.047947105929929415 + 0.12852420579247786
#                 = 0.29647131172240726; diesel 0.20410385518349192
#   CAE           = (0.0029647131 - 0.0020410386) / 0.0050724878 kg
#                 = 0.18209497868900185 $/kg
FIXTURE = {
    "kwh_per_tonmile": 0.012852420579247787,
    "facilities": ["A", "C"],
    "avg": {"A": 8803.027794005333, "C": 3521.211117602133},
    "utilization": {"A": 0.14671712990008887, "C": 0.058686851960035556},
    "alt_kt": 1.79933888109469,
    "scenario_g_per_tonmile": 5.140968231699115,
    "baseline_g_per_tonmile": 10.213456073149635,
    "tenders": 1,
    "lco_components": {
        "energy_storage": 0.12,
        "station": 0.047947105929929415,
        "electricity": 0.12852420579247786,
    },
    "lco_total": 0.29647131172240726,
    "diesel_lco": 0.20410385518349192,
    "cae": 0.18209497868900185,
    "energy_cost_per_day": 1232.4238911607467,
}


@criterion("C9a corridor fixture: facilities, allocation, metrics, report values match the hand solution")
def test_c9a_hand_solved_corridor():
    net = line_network({"A": 0.0, "B": 100.0, "C": 250.0, "D": 350.0})
    flows = [ODFlow("A", "D", "Coal", 1_000_000.0)]
    grid = GridIntensityTable({("IL", None): (400.0, 0.10)})
    cfg = ScenarioConfig(technology="battery", range_miles=400.0,
                         target_deployment=1.0, siting_solver="exact")
    coverage, report = target_deployment(cfg, net, flows, PACK, grid)

    assert coverage == 1.0
    assert report.penetration == 1.0
    assert report.sited_facilities == FIXTURE["facilities"]
    assert report.tenders_per_locomotive == FIXTURE["tenders"]

    loads = {l.facility: l for l in report.facilities}
    for f in FIXTURE["facilities"]:
        assert loads[f].avg_energy_per_day == pytest.approx(FIXTURE["avg"][f], rel=1e-12)
        assert loads[f].peak_energy_per_day == pytest.approx(
            FIXTURE["avg"][f] * 1.2, rel=1e-12)
        assert loads[f].units == 1
        assert loads[f].utilization == pytest.approx(FIXTURE["utilization"][f], rel=1e-12)

    assert report.emissions.alt_kt_per_year == pytest.approx(FIXTURE["alt_kt"], rel=1e-12)
    assert report.emissions.diesel_kt_per_year == 0.0
    assert report.emissions.scenario_g_per_tonmile == pytest.approx(
        FIXTURE["scenario_g_per_tonmile"], rel=1e-12)
    assert report.emissions.baseline_g_per_tonmile == pytest.approx(
        FIXTURE["baseline_g_per_tonmile"], rel=1e-12)

    for name, cents in FIXTURE["lco_components"].items():
        assert report.lco_alt.components[name] == pytest.approx(cents, rel=1e-12)
    assert report.lco_alt.cents_per_tonmile == pytest.approx(FIXTURE["lco_total"], rel=1e-12)
    assert report.lco_scenario_avg_cents == pytest.approx(FIXTURE["lco_total"], rel=1e-12)
    assert report.lco_diesel_cents == pytest.approx(FIXTURE["diesel_lco"], rel=1e-12)
    assert report.cae_usd_per_kg == pytest.approx(FIXTURE["cae"], rel=1e-12)
    assert report.totals["energy_cost_per_day"] == pytest.approx(
        FIXTURE["energy_cost_per_day"], rel=1e-12)


@criterion("C9b range sweep: consolidating facilities lowers the cost of avoided emissions")
def test_c9b_range_sweep_cae_ordering():
    # Five-node corridor, 100-mile arcs. At range 220 the cover needs two
    # facilities ({B, D}); at 440 one ({C}). Same penetration and emissions,
    # lower station capital, hence lower CAE at the longer range.
    net = line_network({"A": 0.0, "B": 100.0, "C": 200.0, "D": 300.0, "E": 400.0})
    flows = [ODFlow("A", "E", "Coal", 1_000_000.0)]
    grid = GridIntensityTable({("IL", None): (400.0, 0.10)})

    reports = {}
    for r in (220.0, 440.0):
        cfg = ScenarioConfig(technology="battery", range_miles=r,
                             od_coverage_ratio=1.0, siting_solver="exact")
        reports[r] = run_storage(cfg, net, flows, PACK, grid)

    assert reports[220.0].sited_facilities == ["B", "D"]
    assert reports[440.0].sited_facilities == ["C"]
    assert reports[220.0].penetration == reports[440.0].penetration == 1.0
    assert reports[440.0].emissions.scenario_g_per_tonmile == pytest.approx(
        reports[220.0].emissions.scenario_g_per_tonmile, rel=1e-12)
    assert sum(l.units for l in reports[220.0].facilities) == 2
    assert sum(l.units for l in reports[440.0].facilities) == 1
    assert reports[440.0].cae_usd_per_kg < reports[220.0].cae_usd_per_kg
