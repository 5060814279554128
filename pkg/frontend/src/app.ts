/** Browser wiring: form submission, polling, report panels, map hovers,
 * and the side-by-side comparison of completed runs. */

import { ApiValidationError, DashboardApi } from "./api.js";
import {
  renderComparePanel,
  renderFacilityPopover,
  renderFacilityTable,
  renderReport,
  type CompareEntry,
} from "./render.js";
import type {
  EvaluationReport,
  FacilitiesPayload,
  NetworkPayload,
  ScenarioRequest,
} from "./types.js";
import { STORAGE_TECHNOLOGIES, validateScenario } from "./validation.js";

interface CompletedRun {
  id: string;
  label: string;
  report: EvaluationReport;
  facilities: FacilitiesPayload;
}

function readForm(form: HTMLFormElement): ScenarioRequest {
  const data = new FormData(form);
  const str = (name: string) => {
    const v = data.get(name);
    return v === null || v === "" ? undefined : String(v);
  };
  const num = (name: string) => {
    const v = str(name);
    return v === undefined ? undefined : Number(v);
  };
  const technology = str("technology") ?? "battery";
  const body: ScenarioRequest = { technology };
  const railroad = str("railroad");
  if (railroad) body.railroad = railroad;
  if (!STORAGE_TECHNOLOGIES.includes(technology as never)) {
    const blend = num("blend_fraction");
    if (blend !== undefined) body.blend_fraction = blend;
  } else {
    const range = num("range_miles");
    if (range !== undefined) body.range_miles = range;
    const target = num("target_deployment");
    if (target !== undefined) body.target_deployment = target;
    const policy = str("policy");
    if (policy) body.policy = policy;
  }
  const seed = num("seed");
  if (seed !== undefined) body.seed = seed;
  return body;
}

function showErrors(container: HTMLElement, errors: { field: string; message: string }[]): void {
  container.innerHTML = errors.length
    ? `<ul class="errors">${errors
        .map((e) => `<li data-field="${e.field}">${e.field}: ${e.message}</li>`)
        .join("")}</ul>`
    : "";
}

export function initApp(root: Document): void {
  const api = new DashboardApi("");
  const form = root.getElementById("scenario-form") as HTMLFormElement | null;
  const errorsEl = root.getElementById("form-errors");
  const reportEl = root.getElementById("report");
  const compareEl = root.getElementById("compare");
  const facilitiesEl = root.getElementById("facilities");
  const popoverEl = root.getElementById("popover");
  const statusEl = root.getElementById("status");
  if (!form || !errorsEl || !reportEl || !compareEl || !facilitiesEl || !popoverEl || !statusEl) {
    return;
  }

  let network: NetworkPayload | null = null;
  const completed: CompletedRun[] = [];

  void api.getNetwork().then((n) => {
    network = n;
  });

  function bindHovers(run: CompletedRun): void {
    for (const dot of Array.from(reportEl!.querySelectorAll<SVGCircleElement>(".node"))) {
      const nodeId = dot.dataset.nodeId ?? "";
      dot.addEventListener("mouseenter", () => {
        const facility = run.facilities.facilities.find((f) => f.id === nodeId);
        const html = renderFacilityPopover(facility, run.facilities.max_station_utilization);
        popoverEl!.innerHTML = html ?? "";
      });
      dot.addEventListener("mouseleave", () => {
        popoverEl!.innerHTML = "";
      });
    }
  }

  function refresh(run: CompletedRun): void {
    reportEl!.innerHTML = renderReport(run.report, network);
    facilitiesEl!.innerHTML = renderFacilityTable(run.facilities);
    compareEl!.innerHTML = renderComparePanel(
      completed.map((r): CompareEntry => ({ label: r.label, report: r.report })),
    );
    bindHovers(run);
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const body = readForm(form);
    const errors = validateScenario(body);
    showErrors(errorsEl as HTMLElement, errors);
    if (errors.length) return; // no request leaves the client
    statusEl.textContent = "running...";
    void (async () => {
      try {
        const id = await api.submitScenario(body);
        const status = await api.pollScenario(id);
        if (status.status === "error") {
          statusEl.textContent = `run failed: ${status.message}`;
          return;
        }
        if (status.status !== "done") return;
        const facilities = await api.getFacilities(id);
        const label = `${body.technology}${body.range_miles ? `@${body.range_miles}mi` : ""} #${completed.length + 1}`;
        const run: CompletedRun = { id, label, report: status.report, facilities };
        completed.push(run); // earlier runs stay available for comparison
        statusEl.textContent = `done (${id})`;
        refresh(run);
      } catch (err) {
        if (err instanceof ApiValidationError) {
          showErrors(errorsEl as HTMLElement, err.errors);
          statusEl.textContent = "";
        } else {
          statusEl.textContent = String(err);
        }
      }
    })();
  });
}

declare const document: Document | undefined;
if (typeof document !== "undefined" && document.getElementById("scenario-form")) {
  initApp(document);
}
