import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

// Fixtures live next to the TypeScript sources; tests run from dist/tests.
const fixtureDir = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "tests", "fixtures");

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(fixtureDir, name), "utf-8")) as T;
}

/** data-metric -> data-raw pairs extracted from rendered HTML. */
export function extractMetrics(html: string): Map<string, string> {
  const out = new Map<string, string>();
  const pattern = /data-metric="([^"]*)"\s+data-raw="([^"]*)"/g;
  for (const match of html.matchAll(pattern)) {
    out.set(match[1]!, match[2]!);
  }
  return out;
}

/** Verbatim string form used by the renderer for report values. */
export function verbatim(value: number | string | null): string {
  return value === null ? "null" : String(value);
}
