/** Presentation-only formatting. No physics: values render verbatim from the
 * report; these helpers only choose how a raw value is displayed. */

/** Verbatim string form of a report value, used for data-raw attributes. */
export function raw(value: number | string | null | undefined): string {
  if (value === null || value === undefined) return "null";
  return String(value);
}

/** Fraction -> percent label for display next to the verbatim value. */
export function asPercent(fraction: number | null): string {
  if (fraction === null || fraction === undefined || Number.isNaN(fraction)) return "n/a";
  return `${(fraction * 100).toFixed(2)}%`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
