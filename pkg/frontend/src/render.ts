/** Pure HTML/SVG renderers over API payloads.
 *
 * Every displayed quantity is emitted as
 * `<span class="metric" data-metric="..." data-raw="...">` where data-raw is
 * the verbatim report value; nothing here recomputes emissions, costs, or
 * penetration. Geometry (bar widths, pie angles, map projection) is
 * presentation only.
 */

import { asPercent, escapeHtml, raw } from "./format.js";
import type {
  EvaluationReport,
  FacilitiesPayload,
  FacilityRow,
  NetworkPayload,
} from "./types.js";

function metric(
  name: string,
  value: number | string | null,
  display?: string,
): string {
  const shown = display ?? (value === null ? "n/a" : String(value));
  return (
    `<span class="metric" data-metric="${escapeHtml(name)}" ` +
    `data-raw="${escapeHtml(raw(value))}">${escapeHtml(shown)}</span>`
  );
}

function bar(cls: string, widthPct: number, label: string): string {
  const w = Math.max(0, Math.min(100, widthPct));
  return `<div class="bar ${cls}" style="width:${w.toFixed(1)}%">${label}</div>`;
}

export function renderEmissionsBars(report: EvaluationReport): string {
  const e = report.emissions;
  const top = Math.max(e.diesel_kt_per_year, e.alt_kt_per_year, 1e-12);
  return `
<section class="panel emissions">
  <h3>Well-to-wheel emissions (kt CO2/yr)</h3>
  <div class="bars">
    ${bar("diesel", (e.diesel_kt_per_year / top) * 100,
          "diesel " + metric("emissions.diesel_kt_per_year", e.diesel_kt_per_year))}
    ${bar("alt", (e.alt_kt_per_year / top) * 100,
          "alternative " + metric("emissions.alt_kt_per_year", e.alt_kt_per_year))}
  </div>
  <p class="overlay">intensity:
    ${metric("emissions.scenario_g_per_tonmile", e.scenario_g_per_tonmile)} g/ton-mi
    vs baseline ${metric("emissions.baseline_g_per_tonmile", e.baseline_g_per_tonmile)} g/ton-mi;
    reduction ${metric("emissions.reduction_fraction", e.reduction_fraction,
                       asPercent(e.reduction_fraction))}
  </p>
</section>`;
}

export function renderLcoBars(report: EvaluationReport): string {
  const lco = report.lco;
  const alt = lco.alternative;
  const rows: string[] = [];
  if (alt) {
    const total = Math.max(alt.total_cents_per_tonmile, 1e-12);
    const segments = Object.entries(alt.components_cents_per_tonmile)
      .map(([name, cents]) =>
        `<div class="segment ${escapeHtml(name)}" style="width:${((cents / total) * 100).toFixed(1)}%"
              title="${escapeHtml(name)}">${metric(`lco.components.${name}`, cents)}</div>`)
      .join("");
    rows.push(`<div class="stack alt">${segments}</div>
      <p>alternative total ${metric("lco.alternative_total", alt.total_cents_per_tonmile)} c/ton-mi</p>`);
  } else {
    rows.push(`<p class="muted">no alternative-side cost (nothing served)</p>`);
  }
  rows.push(
    `<p>diesel ${metric("lco.diesel_cents_per_tonmile", lco.diesel_cents_per_tonmile)} c/ton-mi;
     scenario average ${metric("lco.scenario_average_cents_per_tonmile",
                               lco.scenario_average_cents_per_tonmile)} c/ton-mi</p>`,
  );
  return `<section class="panel lco"><h3>Levelized cost of operation</h3>${rows.join("\n")}</section>`;
}

export function renderPenetrationPie(report: EvaluationReport): string {
  const p = report.penetration;
  const circumference = 2 * Math.PI * 45;
  const altArc = circumference * Math.max(0, Math.min(1, p));
  return `
<section class="panel penetration">
  <h3>Ton-miles served</h3>
  <svg viewBox="0 0 120 120" class="pie" role="img">
    <circle class="pie-diesel" cx="60" cy="60" r="45"></circle>
    <circle class="pie-alt" cx="60" cy="60" r="45"
            stroke-dasharray="${altArc.toFixed(2)} ${circumference.toFixed(2)}"></circle>
  </svg>
  <p>alternative ${metric("penetration", p, asPercent(p))}</p>
</section>`;
}

export function renderCae(report: EvaluationReport): string {
  const value = report.cae_usd_per_kg;
  const shown = value === null ? "n/a" : `$${value} / kg CO2`;
  return `
<section class="panel cae">
  <h3>Cost of avoided emissions</h3>
  <p class="big">${metric("cae_usd_per_kg", value, shown)}</p>
  ${report.flags.undershoot ? `<p class="badge warn">target undershoot</p>` : ""}
</section>`;
}

export function renderNetworkMap(
  network: NetworkPayload,
  report: EvaluationReport | null,
): string {
  const nodes = network.nodes;
  if (nodes.length === 0) return `<svg class="map" viewBox="0 0 600 400"></svg>`;
  const lons = nodes.map((n) => n.lon);
  const lats = nodes.map((n) => n.lat);
  const [minLon, maxLon] = [Math.min(...lons), Math.max(...lons)];
  const [minLat, maxLat] = [Math.min(...lats), Math.max(...lats)];
  const pad = 30;
  const sx = (lon: number) =>
    pad + ((lon - minLon) / Math.max(maxLon - minLon, 1e-9)) * (600 - 2 * pad);
  const sy = (lat: number) =>
    400 - pad - ((lat - minLat) / Math.max(maxLat - minLat, 1e-9)) * (400 - 2 * pad);

  const byId = new Map(nodes.map((n) => [n.id, n]));
  const enabled = new Set(
    (report?.enabled_arcs ?? []).map(([u, v]) => (u <= v ? `${u}|${v}` : `${v}|${u}`)),
  );
  const facilities = new Set(report?.sited_facilities ?? []);

  const edges = network.edges
    .map((e) => {
      const a = byId.get(e.from);
      const b = byId.get(e.to);
      if (!a || !b) return "";
      const key = e.from <= e.to ? `${e.from}|${e.to}` : `${e.to}|${e.from}`;
      const cls = enabled.has(key) ? "arc enabled" : "arc";
      return (
        `<line class="${cls}" x1="${sx(a.lon).toFixed(1)}" y1="${sy(a.lat).toFixed(1)}" ` +
        `x2="${sx(b.lon).toFixed(1)}" y2="${sy(b.lat).toFixed(1)}" data-arc="${escapeHtml(key)}"></line>`
      );
    })
    .join("\n");

  const dots = nodes
    .map((n) => {
      const cls = facilities.has(n.id) ? "node facility" : n.candidate ? "node candidate" : "node";
      return (
        `<circle class="${cls}" cx="${sx(n.lon).toFixed(1)}" cy="${sy(n.lat).toFixed(1)}" ` +
        `r="${facilities.has(n.id) ? 7 : 4}" data-node-id="${escapeHtml(n.id)}"></circle>`
      );
    })
    .join("\n");

  return `<svg class="map" viewBox="0 0 600 400" role="img">${edges}\n${dots}</svg>`;
}

export function renderFacilityPopover(
  facility: (FacilityRow & { over_utilized?: boolean }) | undefined,
  maxUtilization: number,
): string | null {
  if (!facility) return null;
  const over =
    facility.over_utilized ??
    (facility.utilization !== null && facility.utilization >= maxUtilization);
  return `
<div class="popover" data-facility="${escapeHtml(facility.id)}">
  <h4>${escapeHtml(facility.id)} (${escapeHtml(facility.state)})</h4>
  <dl>
    <dt>traffic</dt><dd>${metric(`facility.${facility.id}.avg`, facility.avg)} /day avg,
      ${metric(`facility.${facility.id}.peak`, facility.peak)} /day peak</dd>
    <dt>locomotives/day</dt><dd>${metric(`facility.${facility.id}.locos_per_day`, facility.locos_per_day)}</dd>
    <dt>chargers/pumps</dt><dd>${metric(`facility.${facility.id}.chargers`, facility.chargers)}</dd>
    <dt>utilization</dt><dd>${metric(`facility.${facility.id}.utilization`,
                                     facility.utilization,
                                     asPercent(facility.utilization))}</dd>
  </dl>
  ${over ? `<p class="badge warn">utilization at or above bound</p>` : ""}
</div>`;
}

export function renderFacilityTable(payload: FacilitiesPayload): string {
  if (!payload.facilities.length) return `<p class="muted">no facilities</p>`;
  const rows = payload.facilities
    .map(
      (f) => `<tr data-facility-row="${escapeHtml(f.id)}">
        <td>${escapeHtml(f.id)}</td><td>${escapeHtml(f.state)}</td>
        <td>${metric(`facility.${f.id}.avg`, f.avg)}</td>
        <td>${metric(`facility.${f.id}.chargers`, f.chargers)}</td>
        <td>${metric(`facility.${f.id}.utilization`, f.utilization, asPercent(f.utilization))}
            ${f.over_utilized ? `<span class="badge warn">!</span>` : ""}</td>
      </tr>`,
    )
    .join("\n");
  return `<table class="facilities">
  <thead><tr><th>facility</th><th>state</th><th>avg/day</th><th>chargers</th><th>utilization</th></tr></thead>
  <tbody>${rows}</tbody></table>`;
}

export interface CompareEntry {
  label: string;
  report: EvaluationReport;
}

export function renderComparePanel(entries: CompareEntry[]): string {
  if (entries.length === 0) {
    return `<section class="panel compare disabled"><h3>Scenario comparison</h3>
      <p class="muted">run at least one scenario to compare</p></section>`;
  }
  const header = entries
    .map((e) => `<th>${escapeHtml(e.label)}</th>`)
    .join("");
  const row = (
    label: string,
    cell: (e: CompareEntry) => string,
  ) => `<tr><th>${escapeHtml(label)}</th>${entries.map((e) => `<td>${cell(e)}</td>`).join("")}</tr>`;

  return `<section class="panel compare"><h3>Scenario comparison</h3>
<table>
  <thead><tr><th></th>${header}</tr></thead>
  <tbody>
    ${row("penetration", (e) =>
      metric(`compare.${e.label}.penetration`, e.report.penetration,
             asPercent(e.report.penetration)))}
    ${row("emissions reduction", (e) =>
      metric(`compare.${e.label}.reduction`, e.report.emissions.reduction_fraction,
             asPercent(e.report.emissions.reduction_fraction)))}
    ${row("scenario LCO (c/ton-mi)", (e) =>
      metric(`compare.${e.label}.lco`, e.report.lco.scenario_average_cents_per_tonmile))}
    ${row("CAE ($/kg CO2)", (e) =>
      metric(`compare.${e.label}.cae`, e.report.cae_usd_per_kg))}
    ${row("facilities", (e) =>
      metric(`compare.${e.label}.facilities`, e.report.facilities.length))}
  </tbody>
</table></section>`;
}

export function renderReport(report: EvaluationReport, network: NetworkPayload | null): string {
  const sections = [
    renderEmissionsBars(report),
    renderLcoBars(report),
    renderPenetrationPie(report),
    renderCae(report),
  ];
  if (network) {
    sections.push(`<section class="panel map-panel"><h3>Network</h3>
      ${renderNetworkMap(network, report)}</section>`);
  }
  return sections.join("\n");
}
