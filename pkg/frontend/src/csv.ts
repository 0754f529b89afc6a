/**
 * Reader for the experiment-log CSV written by the simulation harness.
 *
 * Expected columns: N, N_A, k, basis, target, realization, t, delta.
 * Parsing never mutates the file; errors name the file and the offending
 * column so broken hand-edited logs are easy to diagnose.
 */
import { readFileSync } from "fs";

export interface LogRow {
  n: number;
  nA: number;
  k: number;
  basis: string;
  target: string;
  realization: number;
  t: number;
  delta: number;
}

export const REQUIRED_COLUMNS = [
  "N",
  "N_A",
  "k",
  "basis",
  "target",
  "realization",
  "t",
  "delta",
] as const;

function splitLine(line: string): string[] {
  return line.split(",").map((cell) => cell.trim());
}

export function parseLogCsv(text: string, source = "<csv>"): LogRow[] {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${source}: empty CSV (no header)`);
  }
  const header = splitLine(lines[0]);
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  for (const column of REQUIRED_COLUMNS) {
    if (!index.has(column)) {
      throw new Error(`${source}: missing column ${column}`);
    }
  }
  if (lines.length === 1) {
    throw new Error(`${source}: empty CSV (no data rows)`);
  }
  const rows: LogRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = splitLine(lines[i]);
    const cell = (name: string) => cells[index.get(name)!];
    const numeric = (name: string): number => {
      const value = Number(cell(name));
      if (!Number.isFinite(value)) {
        throw new Error(
          `${source}: row ${i + 1}: column ${name} is not numeric (${cell(name)})`
        );
      }
      return value;
    };
    rows.push({
      n: numeric("N"),
      nA: numeric("N_A"),
      k: numeric("k"),
      basis: cell("basis"),
      target: cell("target"),
      realization: numeric("realization"),
      t: numeric("t"),
      delta: numeric("delta"),
    });
  }
  return rows;
}

export function readLogCsv(path: string): LogRow[] {
  return parseLogCsv(readFileSync(path, "utf8"), path);
}

export interface SeriesByN {
  n: number;
  target: string;
  times: number[];
  mean: number[];
  /** per-time spread over realizations; zero-length when one realization */
  spread: number[];
  realizations: number;
}

/** Group rows into one realization-averaged time series per (N, target). */
export function collectSeries(rows: LogRow[]): SeriesByN[] {
  const buckets = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    const key = `${row.n}|${row.target}`;
    if (!buckets.has(key)) buckets.set(key, new Map());
    const byTime = buckets.get(key)!;
    if (!byTime.has(row.t)) byTime.set(row.t, []);
    byTime.get(row.t)!.push(row.delta);
  }
  const out: SeriesByN[] = [];
  for (const [key, byTime] of buckets) {
    const [nText, target] = key.split("|", 2);
    const times = [...byTime.keys()].sort((a, b) => a - b);
    const mean: number[] = [];
    const spread: number[] = [];
    let realizations = 0;
    for (const t of times) {
      const values = byTime.get(t)!;
      realizations = Math.max(realizations, values.length);
      const avg = values.reduce((s, v) => s + v, 0) / values.length;
      mean.push(avg);
      const variance =
        values.reduce((s, v) => s + (v - avg) ** 2, 0) / values.length;
      spread.push(Math.sqrt(variance));
    }
    out.push({
      n: Number(nText),
      target,
      times,
      mean,
      spread: realizations > 1 ? spread : [],
      realizations,
    });
  }
  out.sort((a, b) => a.n - b.n || a.target.localeCompare(b.target));
  return out;
}

/** Late-time average over the last third of the series (harness default). */
export function plateauOf(series: SeriesByN): number {
  const count = Math.max(1, Math.floor(series.times.length / 3));
  const tail = series.mean.slice(series.mean.length - count);
  return tail.reduce((s, v) => s + v, 0) / tail.length;
}
