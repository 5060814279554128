/** Client-side scenario validation, mirroring the server's 422 rules.
 *
 * The contract test replays recorded API cases and requires this module to
 * reject exactly the bodies the server rejects, naming the same fields.
 */

import type { FieldError, ScenarioRequest } from "./types.js";

export const TECHNOLOGIES = ["diesel", "biodiesel", "efuel", "battery", "hydrogen"] as const;
export const STORAGE_TECHNOLOGIES = ["battery", "hydrogen"] as const;
export const RAILROADS = ["western", "eastern"] as const;
export const POLICIES = ["no_reroute", "reroute", "endpoints"] as const;
export const SITING_SOLVERS = ["auto", "exact", "greedy"] as const;

function fraction(errors: FieldError[], field: string, value: number | null | undefined): void {
  if (value === undefined || value === null) return;
  if (typeof value !== "number" || Number.isNaN(value) || value < 0 || value > 1) {
    errors.push({ field, message: `${field} must be between 0 and 1` });
  }
}

export function validateScenario(body: ScenarioRequest): FieldError[] {
  const errors: FieldError[] = [];

  if (body.railroad !== undefined && !RAILROADS.includes(body.railroad as never)) {
    errors.push({ field: "railroad", message: `railroad must be one of ${RAILROADS.join(", ")}` });
  }

  if (!TECHNOLOGIES.includes(body.technology as never)) {
    errors.push({
      field: "technology",
      message: `technology must be one of ${TECHNOLOGIES.join(", ")}`,
    });
  }

  fraction(errors, "blend_fraction", body.blend_fraction);
  fraction(errors, "target_deployment", body.target_deployment);
  fraction(errors, "od_coverage_ratio", body.od_coverage_ratio);
  fraction(errors, "tolerance", body.tolerance);

  if (body.range_miles !== undefined && body.range_miles !== null && body.range_miles <= 0) {
    errors.push({ field: "range_miles", message: "range_miles must be greater than 0" });
  }
  const isStorage = STORAGE_TECHNOLOGIES.includes(body.technology as never);
  if (isStorage && (body.range_miles === undefined || body.range_miles === null)) {
    errors.push({
      field: "range_miles",
      message: "range_miles is required for storage technologies",
    });
  }

  if (body.policy !== undefined && !POLICIES.includes(body.policy as never)) {
    errors.push({ field: "policy", message: `policy must be one of ${POLICIES.join(", ")}` });
  }

  if (body.reroute_max_increase !== undefined && body.reroute_max_increase < 0) {
    errors.push({ field: "reroute_max_increase", message: "reroute_max_increase must be >= 0" });
  }

  if (body.siting_solver !== undefined && !SITING_SOLVERS.includes(body.siting_solver as never)) {
    errors.push({
      field: "siting_solver",
      message: `siting_solver must be one of ${SITING_SOLVERS.join(", ")}`,
    });
  }

  return errors;
}

/** True when the request would be accepted by the API. */
export function isValidScenario(body: ScenarioRequest): boolean {
  return validateScenario(body).length === 0;
}
