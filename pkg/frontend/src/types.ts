/** Payload shapes of the scenario engine's HTTP JSON API. */

export type Technology = "diesel" | "biodiesel" | "efuel" | "battery" | "hydrogen";

export interface ScenarioRequest {
  railroad?: string;
  technology: Technology | string;
  blend_fraction?: number;
  range_miles?: number | null;
  target_deployment?: number;
  od_coverage_ratio?: number | null;
  policy?: string;
  reroute_max_increase?: number;
  tolerance?: number;
  siting_solver?: string;
  year?: number | null;
  seed?: number;
}

export interface EmissionsBlock {
  diesel_kt_per_year: number;
  alt_kt_per_year: number;
  scenario_g_per_tonmile: number;
  baseline_g_per_tonmile: number;
  reduction_fraction: number;
}

export interface LcoBlock {
  alternative: {
    components_cents_per_tonmile: Record<string, number>;
    total_cents_per_tonmile: number;
  } | null;
  diesel_cents_per_tonmile: number;
  scenario_average_cents_per_tonmile: number;
}

export interface FacilityRow {
  id: string;
  state: string;
  avg: number | null;
  peak: number | null;
  locos_per_day: number | null;
  chargers: number;
  utilization: number | null;
}

export interface LinkRow {
  from: string;
  to: string;
  network: "diesel" | "alt";
  commodity: string;
  tons: number;
}

export interface EvaluationReport {
  schema_version: number;
  config: Record<string, unknown>;
  config_hash: string;
  penetration: number;
  emissions: EmissionsBlock;
  lco: LcoBlock;
  cae_usd_per_kg: number | null;
  facilities: FacilityRow[];
  sited_facilities: string[];
  enabled_arcs: [string, string][];
  links: LinkRow[];
  od_selection: { pairs_selected: number; coverage_ratio: number };
  flags: { undershoot: boolean; cae_defined: boolean };
  infeasible_paths: string[];
  notes: string[];
  tenders_per_locomotive: number | null;
  totals: Record<string, number>;
}

export interface NetworkNode {
  id: string;
  name: string;
  state: string;
  lat: number;
  lon: number;
  candidate: boolean;
}

export interface NetworkEdge {
  from: string;
  to: string;
  miles: number;
  owner: string;
}

export interface NetworkPayload {
  nodes: NetworkNode[];
  edges: NetworkEdge[];
}

export interface FacilitiesPayload {
  status: string;
  facilities: (FacilityRow & { over_utilized: boolean })[];
  max_station_utilization: number;
}

export type RunStatus =
  | { status: "running" }
  | { status: "done"; report: EvaluationReport }
  | { status: "error"; message: string };

export interface FieldError {
  field: string;
  message: string;
}
