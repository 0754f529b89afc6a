/**
 * Minimal deterministic SVG scene builder: linear/log axes, polylines,
 * bands, markers, text.  No timestamps or random ids, so identical inputs
 * produce byte-identical output.
 */

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#17becf",
];

export function fmt(value: number): string {
  if (!Number.isFinite(value)) throw new Error(`non-finite coordinate ${value}`);
  return value.toFixed(2).replace(/-0\.00/, "0.00");
}

export class LinearScale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pxLo: number,
    readonly pxHi: number
  ) {}

  at(value: number): number {
    const f = (value - this.lo) / (this.hi - this.lo || 1);
    return this.pxLo + f * (this.pxHi - this.pxLo);
  }
}

export class Log10Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pxLo: number,
    readonly pxHi: number
  ) {
    if (lo <= 0 || hi <= 0) throw new Error("log scale needs positive limits");
  }

  at(value: number): number {
    if (value <= 0) throw new Error(`log scale got non-positive value ${value}`);
    const f =
      (Math.log10(value) - Math.log10(this.lo)) /
      (Math.log10(this.hi) - Math.log10(this.lo) || 1);
    return this.pxLo + f * (this.pxHi - this.pxLo);
  }

  ticks(): number[] {
    const out: number[] = [];
    for (
      let p = Math.ceil(Math.log10(this.lo) - 1e-9);
      p <= Math.floor(Math.log10(this.hi) + 1e-9);
      p++
    ) {
      out.push(10 ** p);
    }
    return out;
  }
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs = ""): void {
    this.raw(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${attrs}/>`
    );
  }

  path(points: Array<[number, number]>, attrs = ""): void {
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join(" ");
    this.raw(`<path d="${d}" ${attrs}/>`);
  }

  polygon(points: Array<[number, number]>, attrs = ""): void {
    const d =
      points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`).join(" ") +
      " Z";
    this.raw(`<path d="${d}" ${attrs}/>`);
  }

  circle(cx: number, cy: number, r: number, attrs = ""): void {
    this.raw(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" ${attrs}/>`);
  }

  text(x: number, y: number, content: string, attrs = ""): void {
    const escaped = content
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")
      .replace(/>/g, "&gt;");
    this.raw(`<text x="${fmt(x)}" y="${fmt(y)}" ${attrs}>${escaped}</text>`);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

/** Framed plot area with a log-10 y axis and a linear x axis. */
export function drawFrame(
  svg: Svg,
  box: Box,
  x: LinearScale,
  y: Log10Scale,
  xLabel: string,
  yLabel: string,
  xTicks: number[]
): void {
  svg.raw(`<g class="frame">`);
  svg.line(box.x, box.y, box.x, box.y + box.height, 'stroke="black"');
  svg.line(
    box.x,
    box.y + box.height,
    box.x + box.width,
    box.y + box.height,
    'stroke="black"'
  );
  for (const tick of xTicks) {
    const px = x.at(tick);
    svg.line(px, box.y + box.height, px, box.y + box.height + 5, 'stroke="black"');
    svg.text(px, box.y + box.height + 18, String(tick), 'text-anchor="middle" font-size="11"');
  }
  for (const tick of y.ticks()) {
    const py = y.at(tick);
    svg.line(box.x - 5, py, box.x, py, 'stroke="black"');
    const exp = Math.round(Math.log10(tick));
    svg.text(box.x - 8, py + 4, `1e${exp}`, 'text-anchor="end" font-size="11"');
  }
  svg.text(
    box.x + box.width / 2,
    box.y + box.height + 34,
    xLabel,
    'text-anchor="middle" font-size="12"'
  );
  svg.text(
    box.x - 44,
    box.y + box.height / 2,
    yLabel,
    `text-anchor="middle" font-size="12" transform="rotate(-90 ${fmt(box.x - 44)} ${fmt(
      box.y + box.height / 2
    )})"`
  );
  svg.raw(`</g>`);
}

export function niceLogRange(values: number[]): [number, number] {
  const positives = values.filter((v) => v > 0);
  if (positives.length === 0) throw new Error("no positive values to plot");
  const lo = 10 ** Math.floor(Math.log10(Math.min(...positives)));
  const hi = 10 ** Math.ceil(Math.log10(Math.max(...positives)));
  return [lo, hi === lo ? lo * 10 : hi];
}
