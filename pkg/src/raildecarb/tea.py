"""Techno-economic analysis: levelized operating costs and avoided-emission cost.

All levelized costs are expressed in cents per ton-mile from their natural
bases ($/gallon, $/kWh, $/kgH2) via the scenario's energy intensity. The
cost of avoided emissions divides the levelized cost increment by the
well-to-wheel emissions decrement against baseline diesel, in $/kgCO2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .params import DAYS_PER_YEAR, FacilityCostCurve, GridIntensityTable, ParameterPack
from .sizing import SizingSolution
from .validation import ValidationError, check_fraction


class NonPositiveAvoidanceError(ValidationError):
    """The alternative does not emit less than diesel; CAE is undefined."""


def crf(rate: float, years: float) -> float:
    """Capital recovery factor: r(1+r)^n / ((1+r)^n - 1); 1/n at zero rate."""
    if rate < 0:
        raise ValidationError(f"rate must be >= 0, got {rate}")
    if years < 1:
        raise ValidationError(f"years must be >= 1, got {years}")
    # expm1/log1p keep precision for rates near zero
    growth_minus_one = math.expm1(years * math.log1p(rate))
    if growth_minus_one == 0.0:
        return 1.0 / years
    return rate * (growth_minus_one + 1.0) / growth_minus_one


@dataclass
class LevelizedCost:
    """Cost breakdown in cents per ton-mile; total is the component sum."""

    components: dict[str, float] = field(default_factory=dict)
    basis: str = ""  # e.g. "$/kWh", "$/kgH2", "$/gallon"
    basis_cost: float = 0.0  # total in the natural basis unit

    @property
    def cents_per_tonmile(self) -> float:
        return sum(self.components.values())

    @property
    def usd_per_tonmile(self) -> float:
        return self.cents_per_tonmile / 100.0

    def to_dict(self) -> dict:
        return {
            "components_cents_per_tonmile": dict(sorted(self.components.items())),
            "total_cents_per_tonmile": self.cents_per_tonmile,
            "basis": self.basis,
            "basis_cost": self.basis_cost,
        }


def blended_fuel_price(blend_fraction: float, fuel: str, pack: ParameterPack) -> float:
    """$/gallon of a drop-in admixture with diesel."""
    f = check_fraction("blend_fraction", blend_fraction)
    prices = pack.dropin.cost_usd_per_gallon
    if fuel not in prices:
        raise ValidationError(f"unknown drop-in fuel {fuel!r}; expected one of {sorted(prices)}")
    return f * prices[fuel] + (1.0 - f) * prices["diesel"]


def dropin_lco(
    blend_fraction: float,
    fuel: str,
    pack: ParameterPack,
    intensity_btu_per_tonmile: float,
) -> LevelizedCost:
    """Refueling-only levelized cost of a drop-in blend."""
    price = blended_fuel_price(blend_fraction, fuel, pack)
    gallons_per_tonmile = intensity_btu_per_tonmile / pack.dropin.diesel_lhv_btu_per_gallon
    return LevelizedCost(
        components={"fuel": price * gallons_per_tonmile * 100.0},
        basis="$/gallon",
        basis_cost=price,
    )


def diesel_lco(pack: ParameterPack, intensity_btu_per_tonmile: float) -> LevelizedCost:
    return dropin_lco(0.0, "diesel", pack, intensity_btu_per_tonmile)


def _station_contribution(
    sol: SizingSolution,
    costcurve: FacilityCostCurve | None,
    tech: str,
    unit_capital: float,
    rate: float,
    lifetime: float,
) -> float:
    """Levelized station cost in the energy basis ($/kWh or $/kgH2).

    With a cost curve: facility contributions weighted by dispensed energy.
    Without: transparent fallback, amortized unit capital over annual energy.
    """
    total = sol.total_avg_energy_per_day
    if total <= 0:
        raise ValidationError("zero dispensed energy: station term undefined")
    if not sol.loads:
        raise ValidationError("facility metrics required before levelized cost")
    if costcurve is not None:
        return sum(
            (load.avg_energy_per_day / total)
            * costcurve.contribution(tech, load.units, load.locomotives_per_day)
            for load in sol.loads
            if load.avg_energy_per_day > 0
        )
    units = sum(load.units for load in sol.loads)
    annual_energy = total * DAYS_PER_YEAR
    return units * unit_capital * crf(rate, lifetime) / annual_energy


def battery_lco(
    sizing: SizingSolution,
    costcurve: FacilityCostCurve | None,
    pack: ParameterPack,
    railroad: str,
    grid: GridIntensityTable,
    tenders: int = 1,
    year: int | None = None,
) -> LevelizedCost:
    """Battery term + charging-station contribution + state electricity price."""
    total = sizing.total_avg_energy_per_day
    if total <= 0 or sizing.tonmiles_per_day <= 0:
        raise ValidationError("empty sizing: battery levelized cost undefined")
    kwh_per_tonmile = total / sizing.tonmiles_per_day

    battery_cents = pack.ops(railroad).marginal_battery_cents_per_tonmile * tenders

    station_per_kwh = _station_contribution(
        sizing, costcurve, "battery",
        pack.engine.charger_capital_usd,
        pack.battery.discount_rate, pack.engine.station_lifetime_years,
    )

    electricity_per_kwh = 0.0
    for f, kwh in sorted(sizing.facility_avg.items()):
        if kwh == 0:
            continue
        state = sizing.facility_states.get(f)
        if not state:
            raise ValidationError(f"facility {f!r} has no state for electricity price")
        electricity_per_kwh += (kwh / total) * grid.price_usd_per_kwh(state, year)

    per_kwh = station_per_kwh + electricity_per_kwh
    return LevelizedCost(
        components={
            "energy_storage": battery_cents,
            "station": station_per_kwh * kwh_per_tonmile * 100.0,
            "electricity": electricity_per_kwh * kwh_per_tonmile * 100.0,
        },
        basis="$/kWh",
        basis_cost=per_kwh,
    )


def hydrogen_lco(
    sizing: SizingSolution,
    costcurve: FacilityCostCurve | None,
    pack: ParameterPack,
    railroad: str,
    tenders: int = 1,
) -> LevelizedCost:
    """Tender-car term + refueling-station contribution + production price."""
    total = sizing.total_avg_energy_per_day
    if total <= 0 or sizing.tonmiles_per_day <= 0:
        raise ValidationError("empty sizing: hydrogen levelized cost undefined")
    kg_per_tonmile = total / sizing.tonmiles_per_day

    tender_cents = pack.ops(railroad).marginal_h2_tender_cents_per_tonmile * tenders
    station_per_kg = _station_contribution(
        sizing, costcurve, "hydrogen",
        pack.engine.pump_capital_usd,
        pack.battery.discount_rate, pack.engine.station_lifetime_years,
    )
    fuel_per_kg = pack.hydrogen.fuel_cost_usd_per_kg

    return LevelizedCost(
        components={
            "energy_storage": tender_cents,
            "station": station_per_kg * kg_per_tonmile * 100.0,
            "fuel": fuel_per_kg * kg_per_tonmile * 100.0,
        },
        basis="$/kgH2",
        basis_cost=station_per_kg + fuel_per_kg,
    )


def cae(
    lco_alt_usd_per_tonmile: float,
    lco_diesel_usd_per_tonmile: float,
    wtw_alt_kg_per_tonmile: float,
    wtw_diesel_kg_per_tonmile: float,
) -> float:
    """Cost of avoided emissions, $/kgCO2; positive when the alternative
    costs more. Undefined unless emissions are actually avoided."""
    avoided = wtw_diesel_kg_per_tonmile - wtw_alt_kg_per_tonmile
    if avoided <= 0:
        raise NonPositiveAvoidanceError(
            f"alternative emits {wtw_alt_kg_per_tonmile:g} vs diesel "
            f"{wtw_diesel_kg_per_tonmile:g} kgCO2/ton-mile: nothing avoided"
        )
    return (lco_alt_usd_per_tonmile - lco_diesel_usd_per_tonmile) / avoided
