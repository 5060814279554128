"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 infeasibility.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from .network import cluster_supernodes, load_demand, load_network, remap_demand, synth_demand
from .params import FacilityCostCurve, GridIntensityTable, ParameterPack
from .scenario import ScenarioConfig, run_scenario
from .siting import SitingInfeasibleError
from .sizing import UnreachableLinkError
from .validation import ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2


def _load_pack(path: str | None) -> ParameterPack:
    if path is None:
        return ParameterPack()
    return ParameterPack.from_json(path)


def _load_inputs(node_file, edge_file, demand_file, pack: ParameterPack):
    """Network + demand, with optional super-node clustering from the pack."""
    net = load_network(node_file, edge_file)
    flows = load_demand(demand_file, net)
    radius = pack.engine.supernode_radius_miles
    if radius > 0:
        net = cluster_supernodes(net, radius)
        flows, dropped = remap_demand(flows, net.merge_map)
        for message in dropped:
            click.echo(f"warning: {message}", err=True)
    return net, flows


def _load_grid(path: str | None, pack: ParameterPack) -> GridIntensityTable:
    if path is None:
        return GridIntensityTable(
            {},
            default_g_per_kwh=pack.engine.default_grid_g_per_kwh,
            default_price_usd_per_kwh=pack.battery.default_charging_cost_usd_per_kwh,
        )
    return GridIntensityTable.from_csv(
        path,
        default_g_per_kwh=pack.engine.default_grid_g_per_kwh,
        default_price_usd_per_kwh=pack.battery.default_charging_cost_usd_per_kwh,
    )


def _report_summary_rows(report_dict: dict) -> list[tuple[str, object]]:
    em = report_dict["emissions"]
    lco = report_dict["lco"]
    return [
        ("technology", report_dict["config"]["technology"]),
        ("railroad", report_dict["config"]["railroad"]),
        ("penetration", report_dict["penetration"]),
        ("diesel_kt_per_year", em["diesel_kt_per_year"]),
        ("alt_kt_per_year", em["alt_kt_per_year"]),
        ("scenario_g_per_tonmile", em["scenario_g_per_tonmile"]),
        ("baseline_g_per_tonmile", em["baseline_g_per_tonmile"]),
        ("reduction_fraction", em["reduction_fraction"]),
        ("scenario_lco_cents_per_tonmile", lco["scenario_average_cents_per_tonmile"]),
        ("diesel_lco_cents_per_tonmile", lco["diesel_cents_per_tonmile"]),
        ("cae_usd_per_kg", report_dict["cae_usd_per_kg"]),
        ("facilities", len(report_dict["facilities"])),
        ("undershoot", report_dict["flags"]["undershoot"]),
    ]


def _write_summary_csv(path: Path, reports: list[dict]) -> None:
    rows = [_report_summary_rows(r) for r in reports]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([k for k, _ in rows[0]])
        for row in rows:
            writer.writerow([v for _, v in row])


scenario_options = [
    click.option("--railroad", default="western", show_default=True,
                 type=click.Choice(["western", "eastern"])),
    click.option("--tech", "--technology", "technology", default="battery",
                 show_default=True,
                 type=click.Choice(["diesel", "biodiesel", "efuel", "battery", "hydrogen"])),
    click.option("--blend", "blend_fraction", default=0.0, show_default=True,
                 help="Drop-in admixture fraction."),
    click.option("--range-miles", default=None, type=float,
                 help="Locomotive range for storage technologies."),
    click.option("--target-deployment", default=0.5, show_default=True),
    click.option("--od-coverage-ratio", default=None, type=float,
                 help="Bypass targeting: run one pass at this O-D coverage ratio."),
    click.option("--policy", default="no_reroute", show_default=True,
                 type=click.Choice(["no_reroute", "reroute", "endpoints"])),
    click.option("--reroute-max-increase", default=0.0, show_default=True),
    click.option("--tolerance", default=0.02, show_default=True),
    click.option("--siting-solver", default="auto", show_default=True,
                 type=click.Choice(["auto", "exact", "greedy"])),
    click.option("--year", default=None, type=int),
    click.option("--seed", default=0, show_default=True),
]

data_options = [
    click.option("--nodes", "node_file", required=True, type=click.Path(exists=True)),
    click.option("--edges", "edge_file", required=True, type=click.Path(exists=True)),
    click.option("--demand", "demand_file", required=True, type=click.Path(exists=True)),
    click.option("--params", "params_file", default=None, type=click.Path(exists=True),
                 help="Parameter pack JSON; defaults are built in."),
    click.option("--grid", "grid_file", default=None, type=click.Path(exists=True),
                 help="CSV state,year,g_per_kwh,price_per_kwh."),
    click.option("--cost-curve", "curve_file", default=None, type=click.Path(exists=True),
                 help="CSV tech,chargers,locos_per_day,levelized_contribution."),
]


def add_options(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@click.group()
def main() -> None:
    """Rail freight decarbonization scenario engine."""


@main.command()
@add_options(data_options)
@add_options(scenario_options)
@click.option("--out", default="report.json", show_default=True,
              help="EvaluationReport JSON output path.")
@click.option("--summary-csv", default=None,
              help="One-row CSV summary path (default: next to the report).")
def run(node_file, edge_file, demand_file, params_file, grid_file, curve_file,
        out, summary_csv, **cfg_kwargs) -> None:
    """Evaluate one scenario; write the report JSON and a CSV summary."""
    try:
        pack = _load_pack(params_file)
        pack.validate()
        net, flows = _load_inputs(node_file, edge_file, demand_file, pack)
        grid = _load_grid(grid_file, pack)
        curve = FacilityCostCurve.from_csv(curve_file) if curve_file else None
        cfg = ScenarioConfig(**cfg_kwargs)
        cfg.validate()
        report = run_scenario(cfg, net, flows, pack, grid, curve)
    except (SitingInfeasibleError, UnreachableLinkError) as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)

    Path(out).write_text(report.to_json())
    summary_path = Path(summary_csv) if summary_csv else Path(out).with_suffix(".summary.csv")
    _write_summary_csv(summary_path, [report.to_dict()])
    cae = report.cae_usd_per_kg
    click.echo(
        f"penetration={report.penetration:.4f} "
        f"reduction={report.emissions.reduction_fraction:.4f} "
        f"cae={'n/a' if cae is None else f'{cae:.4f}'} -> {out}"
    )


@main.command()
@add_options(data_options)
@add_options(scenario_options)
@click.option("--ranges", default=None,
              help="Comma-separated locomotive ranges to sweep, e.g. 200,400,800.")
@click.option("--targets", default=None,
              help="Comma-separated target deployments to sweep, e.g. 0.3,0.5,1.0.")
@click.option("--out-dir", default="sweep", show_default=True)
def sweep(node_file, edge_file, demand_file, params_file, grid_file, curve_file,
          ranges, targets, out_dir, **cfg_kwargs) -> None:
    """Run a range or deployment grid; one report per point plus a summary CSV."""
    if (ranges is None) == (targets is None):
        click.echo("provide exactly one of --ranges or --targets", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        pack = _load_pack(params_file)
        pack.validate()
        net, flows = _load_inputs(node_file, edge_file, demand_file, pack)
        grid = _load_grid(grid_file, pack)
        curve = FacilityCostCurve.from_csv(curve_file) if curve_file else None

        points: list[tuple[str, ScenarioConfig]] = []
        if ranges is not None:
            for r in ranges.split(","):
                kwargs = dict(cfg_kwargs, range_miles=float(r))
                points.append((f"range-{float(r):g}", ScenarioConfig(**kwargs)))
        else:
            for t in targets.split(","):
                kwargs = dict(cfg_kwargs, target_deployment=float(t))
                points.append((f"target-{float(t):g}", ScenarioConfig(**kwargs)))

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        reports = []
        for label, cfg in points:
            cfg.validate()
            report = run_scenario(cfg, net, flows, pack, grid, curve)
            (out / f"{label}.json").write_text(report.to_json())
            reports.append(report.to_dict())
            cae = report.cae_usd_per_kg
            click.echo(
                f"{label}: penetration={report.penetration:.4f} "
                f"cae={'n/a' if cae is None else f'{cae:.4f}'}"
            )
        _write_summary_csv(out / "summary.csv", reports)
    except (SitingInfeasibleError, UnreachableLinkError) as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


@main.command("synth-demand")
@click.option("--nodes", "node_file", required=True, type=click.Path(exists=True))
@click.option("--edges", "edge_file", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--n-pairs", default=50, show_default=True)
@click.option("--out", default="demand.csv", show_default=True)
def synth_demand_cmd(node_file, edge_file, seed, n_pairs, out) -> None:
    """Generate reproducible gravity-style synthetic demand."""
    try:
        net = load_network(node_file, edge_file)
        flows = synth_demand(net, seed=seed, n_pairs=n_pairs)
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["origin", "destination", "commodity", "tons_per_year"])
        for f in flows:
            writer.writerow([f.origin, f.destination, f.commodity, f"{f.tons_per_year:.3f}"])
    click.echo(f"wrote {len(flows)} flows -> {out}")


@main.command()
@click.option("--params", "params_file", default=None, type=click.Path(exists=True))
@click.option("--nodes", "node_file", default=None, type=click.Path(exists=True))
@click.option("--edges", "edge_file", default=None, type=click.Path(exists=True))
@click.option("--demand", "demand_file", default=None, type=click.Path(exists=True))
def validate(params_file, node_file, edge_file, demand_file) -> None:
    """Validate a parameter pack and/or network and demand files."""
    try:
        pack = _load_pack(params_file)
        pack.validate()
        net = None
        if node_file or edge_file:
            if not (node_file and edge_file):
                raise ValidationError("--nodes and --edges must be given together")
            net = load_network(node_file, edge_file)
            for warning in net.report.warnings:
                click.echo(f"warning: {warning}")
        if demand_file:
            if net is None:
                raise ValidationError("--demand requires --nodes and --edges")
            load_demand(demand_file, net)
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo("ok")


@main.command()
@add_options(data_options)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--persist-dir", default=None, type=click.Path(),
              help="Keep finished run reports as flat files across restarts.")
def serve(node_file, edge_file, demand_file, params_file, grid_file, curve_file,
          host, port, persist_dir) -> None:
    """Serve the scenario API over HTTP."""
    from .api import serve_api

    try:
        pack = _load_pack(params_file)
        pack.validate()
        net, flows = _load_inputs(node_file, edge_file, demand_file, pack)
        grid = _load_grid(grid_file, pack)
        curve = FacilityCostCurve.from_csv(curve_file) if curve_file else None
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    serve_api(net, flows, pack, grid, curve, host=host, port=port,
              persist_dir=persist_dir)


if __name__ == "__main__":
    main()
