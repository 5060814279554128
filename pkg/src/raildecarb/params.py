"""Parameter registry: train operations, technology, and fuel constants.

Every number a scenario needs lives in one :class:`ParameterPack`, which
mirrors the four sections of the source registry (train operations by
railroad group, battery-electric, hydrogen, drop-in fuels) plus engine
knobs. Packs serialize to a single human-editable JSON file.

Placeholders that are not sourced constants (per-charger/per-pump capital,
pump rate, peak-to-average factor, default grid intensity) are flagged in
the field comments and can be overridden from the JSON pack.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .validation import ValidationError, check_fraction, check_positive

BTU_PER_KWH = 3412.0
DAYS_PER_YEAR = 365.0

COMMODITIES = (
    "AgriculturalFood",
    "ChemicalPetroleum",
    "Coal",
    "ForestProducts",
    "Intermodal",
    "MetalsOres",
    "MotorVehicles",
    "NonmetallicProducts",
    "Others",
)

RAILROAD_GROUPS = ("western", "eastern")


@dataclass
class RailroadOps:
    """Per-railroad-group operating statistics and energy intensities."""

    locomotives_per_train: float
    cars_per_train: float
    tons_per_locomotive: float
    marginal_battery_cents_per_tonmile: float
    marginal_h2_tender_cents_per_tonmile: float
    h2_locomotive_range_miles: float
    # Diesel energy requirement, BTU per ton-mile, by commodity group.
    energy_intensity_btu_per_tonmile: dict[str, float] = field(default_factory=dict)

    def intensity(self, commodity: str) -> float:
        try:
            return self.energy_intensity_btu_per_tonmile[commodity]
        except KeyError:
            raise ValidationError(
                f"unknown commodity {commodity!r}; expected one of {list(COMMODITIES)}"
            ) from None


@dataclass
class BatteryParams:
    tender_weight_tons: float = 150.0
    capacity_mwh: float = 14.0
    charging_speed_mw: float = 3.0
    charging_depth: float = 0.8
    roundtrip_efficiency: float = 0.95
    capital_cost_usd: float = 1_271_816.0
    future_capital_cost_usd: float = 452_908.0  # alternative, not defaulted anywhere
    maintenance_usd_per_day: float = 100.0
    lifetime_years: float = 13.0
    efficiency_ratio_vs_diesel: float = 2.44
    discount_rate: float = 0.03
    horizon_years: float = 26.0
    default_charging_cost_usd_per_kwh: float = 0.15

    @property
    def event_energy_kwh(self) -> float:
        """Usable energy per charge event: capacity x charging depth."""
        return self.capacity_mwh * 1000.0 * self.charging_depth

    @property
    def event_duration_hours(self) -> float:
        return self.event_energy_kwh / (self.charging_speed_mw * 1000.0)


@dataclass
class HydrogenParams:
    tender_capacity_kg: float = 4000.0
    tender_capital_usd_per_kg: float = 80.0
    tender_lifetime_years: float = 20.0
    efficiency_ratio_vs_diesel: float = 1.5
    emissions_kgco2_per_kg: float = 14.77
    fuel_cost_usd_per_kg: float = 2.00
    # BTU per kg of hydrogen (lower heating value); the single constant all
    # hydrogen energy conversions route through.
    lower_heating_value_btu_per_kg: float = 113_964.0
    # Dispensing rate per pump; placeholder, not a sourced constant.
    pump_rate_kg_per_hour: float = 1000.0

    @property
    def event_energy_kg(self) -> float:
        return self.tender_capacity_kg

    @property
    def event_duration_hours(self) -> float:
        return self.tender_capacity_kg / self.pump_rate_kg_per_hour


@dataclass
class DropInParams:
    diesel_lhv_btu_per_gallon: float = 129_488.0
    efficiency_ratio_vs_diesel: float = 1.0
    emissions_kgco2_per_gallon: dict[str, float] = field(
        default_factory=lambda: {"diesel": 12.36, "biodiesel": 3.50, "efuel": 0.07}
    )
    cost_usd_per_gallon: dict[str, float] = field(
        default_factory=lambda: {"diesel": 2.47, "biodiesel": 3.60, "efuel": 5.19}
    )


@dataclass
class EngineParams:
    """Knobs that are modeling choices rather than sourced constants."""

    peak_to_average_factor: float = 1.2  # placeholder ratio, config-documented
    max_station_utilization: float = 0.8
    charger_capital_usd: float = 1_500_000.0  # fallback station model, placeholder
    pump_capital_usd: float = 2_000_000.0  # fallback station model, placeholder
    station_lifetime_years: float = 26.0
    exact_siting_limit: int = 24  # candidates at or below: exhaustive search
    deployment_tolerance: float = 0.02
    default_grid_g_per_kwh: float = 400.0  # placeholder US-average intensity
    supernode_radius_miles: float = 0.0  # 0 disables clustering
    require_endpoint_facilities: bool = False


def _default_ops() -> dict[str, RailroadOps]:
    western = RailroadOps(
        locomotives_per_train=3.15,
        cars_per_train=74.6,
        tons_per_locomotive=1319.0,
        marginal_battery_cents_per_tonmile=0.12,
        marginal_h2_tender_cents_per_tonmile=0.05,
        h2_locomotive_range_miles=1039.0,
        energy_intensity_btu_per_tonmile={
            "AgriculturalFood": 152.0,
            "ChemicalPetroleum": 150.0,
            "Coal": 107.0,
            "ForestProducts": 219.0,
            "Intermodal": 875.0,
            "MetalsOres": 152.0,
            "MotorVehicles": 710.0,
            "NonmetallicProducts": 128.0,
            "Others": 553.0,
        },
    )
    eastern = RailroadOps(
        locomotives_per_train=2.18,
        cars_per_train=68.5,
        tons_per_locomotive=1403.0,
        marginal_battery_cents_per_tonmile=0.19,
        marginal_h2_tender_cents_per_tonmile=0.08,
        h2_locomotive_range_miles=977.0,
        energy_intensity_btu_per_tonmile={
            "AgriculturalFood": 155.0,
            "ChemicalPetroleum": 153.0,
            "Coal": 109.0,
            "ForestProducts": 224.0,
            "Intermodal": 893.0,
            "MetalsOres": 155.0,
            "MotorVehicles": 725.0,
            "NonmetallicProducts": 131.0,
            "Others": 565.0,
        },
    )
    return {"western": western, "eastern": eastern}


@dataclass
class ParameterPack:
    operations: dict[str, RailroadOps] = field(default_factory=_default_ops)
    battery: BatteryParams = field(default_factory=BatteryParams)
    hydrogen: HydrogenParams = field(default_factory=HydrogenParams)
    dropin: DropInParams = field(default_factory=DropInParams)
    engine: EngineParams = field(default_factory=EngineParams)

    def ops(self, railroad: str) -> RailroadOps:
        try:
            return self.operations[railroad]
        except KeyError:
            raise ValidationError(
                f"unknown railroad group {railroad!r}; "
                f"expected one of {sorted(self.operations)}"
            ) from None

    def validate(self) -> None:
        for name, ops in self.operations.items():
            check_positive(f"operations.{name}.tons_per_locomotive", ops.tons_per_locomotive)
            missing = [c for c in COMMODITIES if c not in ops.energy_intensity_btu_per_tonmile]
            if missing:
                raise ValidationError(
                    f"operations.{name}: missing energy intensities for {missing}"
                )
            for c, v in ops.energy_intensity_btu_per_tonmile.items():
                check_positive(f"operations.{name}.intensity[{c}]", v)
        check_fraction("battery.charging_depth", self.battery.charging_depth)
        check_positive("battery.capacity_mwh", self.battery.capacity_mwh)
        check_positive("battery.charging_speed_mw", self.battery.charging_speed_mw)
        check_positive("battery.lifetime_years", self.battery.lifetime_years)
        check_positive("battery.efficiency_ratio_vs_diesel", self.battery.efficiency_ratio_vs_diesel)
        if not 0.0 < self.battery.discount_rate < 1.0:
            raise ValidationError("battery.discount_rate must be in (0, 1)")
        check_positive("hydrogen.tender_capacity_kg", self.hydrogen.tender_capacity_kg)
        check_positive("hydrogen.lower_heating_value_btu_per_kg", self.hydrogen.lower_heating_value_btu_per_kg)
        check_positive("hydrogen.pump_rate_kg_per_hour", self.hydrogen.pump_rate_kg_per_hour)
        check_positive("dropin.diesel_lhv_btu_per_gallon", self.dropin.diesel_lhv_btu_per_gallon)
        for key in ("diesel", "biodiesel", "efuel"):
            if key not in self.dropin.emissions_kgco2_per_gallon:
                raise ValidationError(f"dropin.emissions_kgco2_per_gallon missing {key!r}")
            if key not in self.dropin.cost_usd_per_gallon:
                raise ValidationError(f"dropin.cost_usd_per_gallon missing {key!r}")
        if self.engine.peak_to_average_factor < 1.0:
            raise ValidationError("engine.peak_to_average_factor must be >= 1")
        check_fraction("engine.max_station_utilization", self.engine.max_station_utilization)
        check_positive("engine.max_station_utilization", self.engine.max_station_utilization)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def from_dict(cls, data: dict) -> "ParameterPack":
        pack = cls()
        if "operations" in data:
            pack.operations = {
                name: RailroadOps(**ops) for name, ops in data["operations"].items()
            }
        for section, klass in (
            ("battery", BatteryParams),
            ("hydrogen", HydrogenParams),
            ("dropin", DropInParams),
            ("engine", EngineParams),
        ):
            if section in data:
                setattr(pack, section, klass(**data[section]))
        pack.validate()
        return pack

    @classmethod
    def from_json(cls, path: str | Path) -> "ParameterPack":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"parameter pack {path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


class GridIntensityTable:
    """State-level grid carbon intensity (gCO2/kWh) and electricity price.

    Entries are keyed by (state, year); a year of None is the unscoped
    fallback for the state. A table-wide default covers states without
    entries only when ``default_g_per_kwh`` is given.
    """

    def __init__(
        self,
        entries: dict[tuple[str, int | None], tuple[float, float]] | None = None,
        default_g_per_kwh: float | None = None,
        default_price_usd_per_kwh: float | None = None,
    ):
        self.entries = dict(entries or {})
        self.default_g_per_kwh = default_g_per_kwh
        self.default_price_usd_per_kwh = default_price_usd_per_kwh

    def _lookup(self, state: str, year: int | None) -> tuple[float, float] | None:
        if year is not None and (state, year) in self.entries:
            return self.entries[(state, year)]
        if (state, None) in self.entries:
            return self.entries[(state, None)]
        return None

    def g_per_kwh(self, state: str, year: int | None = None) -> float:
        hit = self._lookup(state, year)
        if hit is not None:
            return hit[0]
        if self.default_g_per_kwh is not None:
            return self.default_g_per_kwh
        raise ValidationError(f"no grid intensity entry for state {state!r}")

    def price_usd_per_kwh(self, state: str, year: int | None = None) -> float:
        hit = self._lookup(state, year)
        if hit is not None and hit[1] is not None:
            return hit[1]
        if self.default_price_usd_per_kwh is not None:
            return self.default_price_usd_per_kwh
        raise ValidationError(f"no electricity price entry for state {state!r}")

    @classmethod
    def from_csv(
        cls,
        path: str | Path,
        default_g_per_kwh: float | None = None,
        default_price_usd_per_kwh: float | None = None,
    ) -> "GridIntensityTable":
        entries: dict[tuple[str, int | None], tuple[float, float]] = {}
        with open(path, newline="") as fh:
            rows = csv.DictReader(line for line in fh if not line.startswith("#"))
            required = {"state", "year", "g_per_kwh", "price_per_kwh"}
            if rows.fieldnames is None or not required.issubset(rows.fieldnames):
                raise ValidationError(
                    f"grid table {path}: header must contain {sorted(required)}"
                )
            for i, row in enumerate(rows, start=2):
                year = int(row["year"]) if row["year"].strip() else None
                price = float(row["price_per_kwh"]) if row["price_per_kwh"].strip() else None
                entries[(row["state"].strip(), year)] = (float(row["g_per_kwh"]), price)
        return cls(entries, default_g_per_kwh, default_price_usd_per_kwh)


class FacilityCostCurve:
    """Levelized station contribution by (technology, unit count, throughput).

    Data-driven replacement for external bottom-up station cost tools:
    rows give the levelized $/kWh or $/kgH2 contribution for a station with
    a given charger/pump count serving a given locomotives/day throughput.
    Lookup interpolates linearly in locomotives/day at fixed unit count
    (clamped at the ends) and falls back to the nearest available count.
    """

    def __init__(self, rows: dict[tuple[str, int], list[tuple[float, float]]]):
        # rows: (tech, count) -> sorted [(locos_per_day, contribution)]
        self.rows = {}
        for key, pts in rows.items():
            pts = sorted(pts)
            values = [v for _, v in pts]
            if any(b > a for a, b in zip(values, values[1:])):
                raise ValidationError(
                    f"cost curve {key}: contribution must be nonincreasing in locomotives/day"
                )
            if any(v <= 0 for v in values):
                raise ValidationError(f"cost curve {key}: contributions must be positive")
            self.rows[key] = pts

    def contribution(self, tech: str, units: int, locos_per_day: float) -> float:
        counts = sorted({c for t, c in self.rows if t == tech})
        if not counts:
            raise ValidationError(f"cost curve has no rows for technology {tech!r}")
        count = min(counts, key=lambda c: (abs(c - units), -c))
        pts = self.rows[(tech, count)]
        if locos_per_day <= pts[0][0]:
            return pts[0][1]
        if locos_per_day >= pts[-1][0]:
            return pts[-1][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= locos_per_day <= x1:
                w = (locos_per_day - x0) / (x1 - x0)
                return y0 + w * (y1 - y0)
        raise AssertionError("unreachable")

    @classmethod
    def from_csv(cls, path: str | Path) -> "FacilityCostCurve":
        rows: dict[tuple[str, int], list[tuple[float, float]]] = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(line for line in fh if not line.startswith("#"))
            required = {"tech", "chargers", "locos_per_day", "levelized_contribution"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValidationError(
                    f"cost curve {path}: header must contain {sorted(required)}"
                )
            for row in reader:
                key = (row["tech"].strip(), int(row["chargers"]))
                rows.setdefault(key, []).append(
                    (float(row["locos_per_day"]), float(row["levelized_contribution"]))
                )
        return cls(rows)
