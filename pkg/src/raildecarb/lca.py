"""Well-to-wheel greenhouse-gas accounting.

Diesel-side intensities can be derived two ways: from railroad fuel totals
(gallons over revenue ton-miles times a per-BTU factor times the diesel
lower heating value) or from commodity energy intensities. The engine uses
the commodity route for link-level splits and exposes the fuel-totals
route for railroad-level calibration.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import DAYS_PER_YEAR, GridIntensityTable, ParameterPack
from .routing import FlowAssignment
from .sizing import SizingSolution, technology_energy_per_tonmile
from .validation import ValidationError, check_fraction

GRAMS_PER_KT = 1e9


def diesel_g_per_btu(pack: ParameterPack) -> float:
    """Diesel well-to-wheel emissions factor in grams CO2 per BTU."""
    d = pack.dropin
    return d.emissions_kgco2_per_gallon["diesel"] * 1000.0 / d.diesel_lhv_btu_per_gallon


def diesel_wtw_per_tonmile(
    total_gallons: float,
    total_rtm: float,
    per_btu_factor: float | None = None,
    lhv_btu_per_gallon: float = 129_488.0,
) -> float:
    """gCO2/ton-mile from railroad fuel use and revenue ton-mile totals."""
    if total_rtm <= 0:
        raise ValidationError(f"total revenue ton-miles must be > 0, got {total_rtm}")
    if per_btu_factor is None:
        per_btu_factor = 12_360.0 / lhv_btu_per_gallon
    return (total_gallons / total_rtm) * per_btu_factor * lhv_btu_per_gallon


def blend_wtw(
    blend_fraction: float, alt_kg_per_gallon: float, diesel_kg_per_gallon: float
) -> float:
    """kgCO2 per gallon-equivalent of an admixture (drop-in efficiency 1)."""
    f = check_fraction("blend_fraction", blend_fraction)
    return f * alt_kg_per_gallon + (1.0 - f) * diesel_kg_per_gallon


def battery_wtw(
    sizing: SizingSolution,
    grid: GridIntensityTable,
    year: int | None = None,
) -> float:
    """kgCO2/day from charging, using the grid intensity of each facility's state."""
    total_g = 0.0
    for f, kwh in sorted(sizing.facility_avg.items()):
        if kwh == 0:
            continue
        state = sizing.facility_states.get(f)
        if not state:
            raise ValidationError(f"facility {f!r} has no state for grid lookup")
        total_g += kwh * grid.g_per_kwh(state, year)
    return total_g / 1000.0


def hydrogen_wtw(kg_h2_per_day: float, kgco2_per_kg: float = 14.77) -> float:
    """kgCO2/day for dispensed hydrogen (steam-methane reforming default)."""
    return kg_h2_per_day * kgco2_per_kg


@dataclass
class EmissionsSplit:
    diesel_kt_per_year: float
    alt_kt_per_year: float
    scenario_g_per_tonmile: float
    baseline_g_per_tonmile: float
    reduction_fraction: float

    def to_dict(self) -> dict:
        return {
            "diesel_kt_per_year": self.diesel_kt_per_year,
            "alt_kt_per_year": self.alt_kt_per_year,
            "scenario_g_per_tonmile": self.scenario_g_per_tonmile,
            "baseline_g_per_tonmile": self.baseline_g_per_tonmile,
            "reduction_fraction": self.reduction_fraction,
        }


def _baseline_annual_grams(
    assignment: FlowAssignment, pack: ParameterPack, railroad: str
) -> tuple[float, float]:
    """(annual grams under pure diesel, annual ton-miles) over assigned paths."""
    ops = pack.ops(railroad)
    factor = diesel_g_per_btu(pack)
    grams = 0.0
    tonmiles = 0.0
    for i, flow in enumerate(assignment.flows):
        tm = flow.tons_per_year * assignment.paths[i].total_miles
        tonmiles += tm
        grams += tm * ops.intensity(flow.commodity) * factor
    return grams, tonmiles


def scenario_emissions(
    assignment: FlowAssignment,
    sizing: SizingSolution | None,
    pack: ParameterPack,
    railroad: str,
    technology: str,
    blend_fraction: float = 0.0,
    grid: GridIntensityTable | None = None,
    year: int | None = None,
) -> EmissionsSplit:
    """Scenario emissions split: diesel share plus the alternative pathway."""
    ops = pack.ops(railroad)
    factor = diesel_g_per_btu(pack)
    baseline_grams, total_tonmiles = _baseline_annual_grams(assignment, pack, railroad)
    if total_tonmiles <= 0:
        raise ValidationError("assignment carries no ton-miles")
    baseline_g_per_tonmile = baseline_grams / total_tonmiles

    if technology in ("diesel", "biodiesel", "efuel"):
        alt_factor = pack.dropin.emissions_kgco2_per_gallon.get(
            technology if technology != "diesel" else "diesel"
        )
        diesel_factor = pack.dropin.emissions_kgco2_per_gallon["diesel"]
        blend = 0.0 if technology == "diesel" else check_fraction("blend_fraction", blend_fraction)
        # Gallons from diesel-equivalent BTU; blend applied uniformly.
        annual_gallons = baseline_grams / factor / pack.dropin.diesel_lhv_btu_per_gallon
        diesel_g = annual_gallons * (1.0 - blend) * diesel_factor * 1000.0
        alt_g = annual_gallons * blend * alt_factor * 1000.0
    else:
        diesel_g = 0.0
        for i, flow in enumerate(assignment.flows):
            if assignment.served_by[i] != "diesel":
                continue
            tm = flow.tons_per_year * assignment.paths[i].total_miles
            diesel_g += tm * ops.intensity(flow.commodity) * factor
        if sizing is None or sizing.total_avg_energy_per_day == 0:
            alt_g = 0.0
        elif technology == "battery":
            if grid is None:
                raise ValidationError("battery scenarios need a grid intensity table")
            alt_g = battery_wtw(sizing, grid, year) * 1000.0 * DAYS_PER_YEAR
        elif technology == "hydrogen":
            alt_g = hydrogen_wtw(
                sizing.total_avg_energy_per_day, pack.hydrogen.emissions_kgco2_per_kg
            ) * 1000.0 * DAYS_PER_YEAR
        else:
            raise ValidationError(f"unknown technology {technology!r}")

    scenario_g_per_tonmile = (diesel_g + alt_g) / total_tonmiles
    return EmissionsSplit(
        diesel_kt_per_year=diesel_g / GRAMS_PER_KT,
        alt_kt_per_year=alt_g / GRAMS_PER_KT,
        scenario_g_per_tonmile=scenario_g_per_tonmile,
        baseline_g_per_tonmile=baseline_g_per_tonmile,
        reduction_fraction=1.0 - scenario_g_per_tonmile / baseline_g_per_tonmile,
    )


def battery_g_per_tonmile(
    pack: ParameterPack, railroad: str, commodity: str, grid_g_per_kwh: float
) -> float:
    """Charging-side gCO2/ton-mile for one commodity at a given grid intensity."""
    kwh = technology_energy_per_tonmile(pack.ops(railroad), commodity, pack, "battery")
    return kwh * grid_g_per_kwh
