export { parseLogCsv, readLogCsv, collectSeries, plateauOf } from "./csv.js";
export type { LogRow, SeriesByN } from "./csv.js";
export { parseMeta, readMeta } from "./meta.js";
export type { FitInfo, RunMeta } from "./meta.js";
export { plotTimeseries, plotScaling, fitLabel } from "./figures.js";
export type { FigureOptions } from "./figures.js";
export { run as runCli } from "./cli.js";
