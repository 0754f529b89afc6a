/**
 * Figure assembly: distance-vs-time panels with a plateau-scaling inset,
 * and standalone plateau-scaling panels with fit overlays.
 *
 * Plateau points are recomputed from the CSV series (mean over
 * realizations, last-third window); fit overlays and their labels come
 * from the harness metadata JSON, so the printed rate always matches the
 * harness fit.
 */
import { SeriesByN, collectSeries, plateauOf, LogRow } from "./csv.js";
import { FitInfo, RunMeta } from "./meta.js";
import {
  Box,
  LinearScale,
  Log10Scale,
  PALETTE,
  Svg,
  drawFrame,
  fmt,
  niceLogRange,
} from "./svg.js";

export interface FigureOptions {
  /** restrict to one target (required when the CSV holds several) */
  target?: string;
  /** draw the fit overlay when the metadata carries one (default true) */
  fitOverlay?: boolean;
  /** embed a generation timestamp comment (off by default: reproducible output) */
  timestamp?: boolean;
}

export function fitLabel(fit: FitInfo): string {
  if (fit.kind === "power") {
    return `exponent = ${fit.exponent!.toFixed(2)}`;
  }
  return `c = ${fit.rate!.toFixed(2)} bits/qubit`;
}

function selectTarget(rows: LogRow[], wanted?: string): LogRow[] {
  const targets = [...new Set(rows.map((r) => r.target))].sort();
  if (wanted === undefined) {
    if (targets.length > 1) {
      throw new Error(
        `CSV holds several targets (${targets.join(", ")}); pass --target`
      );
    }
    return rows;
  }
  const picked = rows.filter((r) => r.target === wanted);
  if (picked.length === 0) {
    throw new Error(`no rows with target ${wanted} (have: ${targets.join(", ")})`);
  }
  return picked;
}

function legendFor(series: SeriesByN, meta?: RunMeta): string {
  const fingerprint = meta?.runFingerprints.get(series.n);
  return fingerprint ? `N=${series.n} [${fingerprint}]` : `N=${series.n}`;
}

function maybeTimestamp(svg: Svg, options: FigureOptions): void {
  if (options.timestamp) {
    svg.raw(`<!-- generated ${new Date().toISOString()} -->`);
  }
}

function drawFitOverlay(
  svg: Svg,
  fit: FitInfo,
  xScale: LinearScale,
  yScale: Log10Scale,
  nValues: number[],
  labelX: number,
  labelY: number
): void {
  const predict = (n: number): number =>
    fit.kind === "power"
      ? (fit.prefactor ?? 1) * n ** (fit.exponent ?? 0)
      : (fit.prefactor ?? 1) * 2 ** (-(fit.rate ?? 0) * n);
  const lo = Math.min(...nValues);
  const hi = Math.max(...nValues);
  const points: Array<[number, number]> = [];
  for (let i = 0; i <= 32; i++) {
    const n = lo + ((hi - lo) * i) / 32;
    const value = predict(n);
    if (value > 0 && value >= yScale.lo && value <= yScale.hi) {
      points.push([xScale.at(n), yScale.at(value)]);
    }
  }
  if (points.length >= 2) {
    svg.path(
      points,
      'class="fit-line" stroke="black" stroke-dasharray="6 3" fill="none"'
    );
  }
  svg.text(labelX, labelY, fitLabel(fit), 'class="fit-label" font-size="11"');
}

function drawScalingPanel(
  svg: Svg,
  box: Box,
  series: SeriesByN[],
  fit: FitInfo | undefined,
  pointClass: string
): void {
  const nValues = series.map((s) => s.n);
  const plateaus = series.map((s) => plateauOf(s));
  const [lo, hi] = niceLogRange(plateaus);
  const xScale = new LinearScale(
    Math.min(...nValues) - 1,
    Math.max(...nValues) + 1,
    box.x,
    box.x + box.width
  );
  const yScale = new Log10Scale(lo, hi, box.y + box.height, box.y);
  drawFrame(svg, box, xScale, yScale, "N", "plateau", nValues);
  series.forEach((s, i) => {
    svg.circle(
      xScale.at(s.n),
      yScale.at(plateauOf(s)),
      3,
      `class="${pointClass}" fill="${PALETTE[i % PALETTE.length]}" data-n="${s.n}"`
    );
  });
  if (fit) {
    drawFitOverlay(svg, fit, xScale, yScale, nValues, box.x + 8, box.y + 14);
  }
}

/** Distance-vs-time figure: one semilog-y curve per N, scaling inset. */
export function plotTimeseries(
  rows: LogRow[],
  meta?: RunMeta,
  options: FigureOptions = {}
): string {
  const picked = selectTarget(rows, options.target);
  const series = collectSeries(picked);
  if (series.length === 0) throw new Error("no series to plot");
  const target = picked[0].target;

  const width = 640;
  const height = 460;
  const box: Box = { x: 70, y: 30, width: width - 100, height: height - 90 };
  const svg = new Svg(width, height);
  maybeTimestamp(svg, options);

  const allTimes = series.flatMap((s) => s.times);
  const allValues = series.flatMap((s) => s.mean).concat(
    series.flatMap((s) => s.mean.map((m, i) => m + (s.spread[i] ?? 0)))
  );
  const [lo, hi] = niceLogRange(allValues);
  const xScale = new LinearScale(
    Math.min(...allTimes),
    Math.max(...allTimes),
    box.x,
    box.x + box.width
  );
  const yScale = new Log10Scale(lo, hi, box.y + box.height, box.y);
  const xTicks = [...new Set(series[0].times.filter((t, i) => i % Math.ceil(series[0].times.length / 8) === 0))];
  drawFrame(svg, box, xScale, yScale, "t", "distance", xTicks);
  svg.text(box.x + box.width / 2, box.y - 10, `target: ${target}`, 'text-anchor="middle" font-size="12" class="title"');

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const clip = (v: number) => Math.max(v, yScale.lo);
    if (s.spread.length > 0) {
      const upper = s.times.map((t, j): [number, number] => [
        xScale.at(t),
        yScale.at(clip(s.mean[j] + s.spread[j])),
      ]);
      const lower = s.times
        .map((t, j): [number, number] => [
          xScale.at(t),
          yScale.at(clip(Math.max(s.mean[j] - s.spread[j], yScale.lo))),
        ])
        .reverse();
      svg.polygon(
        [...upper, ...lower],
        `class="band" fill="${color}" fill-opacity="0.15" stroke="none" data-n="${s.n}"`
      );
    }
    svg.path(
      s.times.map((t, j): [number, number] => [
        xScale.at(t),
        yScale.at(clip(s.mean[j])),
      ]),
      `class="series" stroke="${color}" fill="none" stroke-width="1.5" data-n="${s.n}"`
    );
    svg.text(
      box.x + box.width + 6,
      box.y + 14 + 16 * i,
      legendFor(s, meta),
      `class="legend" font-size="10" fill="${color}"`
    );
  });

  if (series.length > 1) {
    const inset: Box = {
      x: box.x + box.width - 190,
      y: box.y + 20,
      width: 160,
      height: 130,
    };
    svg.raw(`<g class="inset">`);
    svg.raw(
      `<rect x="${fmt(inset.x - 50)}" y="${fmt(inset.y - 14)}" width="${fmt(
        inset.width + 70
      )}" height="${fmt(inset.height + 54)}" fill="white" stroke="#cccccc"/>`
    );
    const fit =
      options.fitOverlay === false ? undefined : meta?.fits.get(target);
    drawScalingPanel(svg, inset, series, fit, "plateau-point");
    svg.raw(`</g>`);
  }
  return svg.render();
}

/** Plateau-vs-N scaling figure with the harness fit overlay. */
export function plotScaling(
  rows: LogRow[],
  meta?: RunMeta,
  options: FigureOptions = {}
): string {
  const picked = selectTarget(rows, options.target);
  const series = collectSeries(picked);
  if (series.length === 0) throw new Error("no series to plot");
  const target = picked[0].target;

  const width = 480;
  const height = 400;
  const box: Box = { x: 70, y: 40, width: width - 110, height: height - 110 };
  const svg = new Svg(width, height);
  maybeTimestamp(svg, options);
  svg.text(box.x + box.width / 2, box.y - 14, `plateau scaling: ${target}`, 'text-anchor="middle" font-size="12" class="title"');
  const fit = options.fitOverlay === false ? undefined : meta?.fits.get(target);
  drawScalingPanel(svg, box, series, fit, "plateau-point");
  series.forEach((s, i) => {
    svg.text(
      box.x + box.width + 6,
      box.y + 14 + 16 * i,
      legendFor(s, meta),
      `class="legend" font-size="10" fill="${PALETTE[i % PALETTE.length]}"`
    );
  });
  return svg.render();
}
