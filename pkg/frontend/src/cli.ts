#!/usr/bin/env node
/**
 * plot timeseries|scaling --csv run.csv [--meta run.json] --out fig.svg
 *                         [--target NAME] [--no-fit] [--timestamp]
 *
 * Reads harness CSV/JSON logs and writes a deterministic SVG figure.
 */
import { writeFileSync } from "fs";
import { readLogCsv } from "./csv.js";
import { plotScaling, plotTimeseries, FigureOptions } from "./figures.js";
import { readMeta, RunMeta } from "./meta.js";

interface Args {
  command: string;
  csv?: string;
  meta?: string;
  out?: string;
  target?: string;
  fitOverlay: boolean;
  timestamp: boolean;
}

export function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  const args: Args = { command: command ?? "", fitOverlay: true, timestamp: false };
  for (let i = 0; i < rest.length; i++) {
    const flag = rest[i];
    const next = () => {
      if (i + 1 >= rest.length) throw new Error(`flag ${flag} needs a value`);
      return rest[++i];
    };
    switch (flag) {
      case "--csv":
        args.csv = next();
        break;
      case "--meta":
        args.meta = next();
        break;
      case "--out":
        args.out = next();
        break;
      case "--target":
        args.target = next();
        break;
      case "--no-fit":
        args.fitOverlay = false;
        break;
      case "--timestamp":
        args.timestamp = true;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  if (args.command !== "timeseries" && args.command !== "scaling") {
    console.error("usage: plot timeseries|scaling --csv FILE --out FILE [--meta FILE]");
    return 2;
  }
  if (!args.csv || !args.out) {
    console.error("--csv and --out are required");
    return 2;
  }
  try {
    const rows = readLogCsv(args.csv);
    const meta: RunMeta | undefined = args.meta ? readMeta(args.meta) : undefined;
    const options: FigureOptions = {
      target: args.target,
      fitOverlay: args.fitOverlay,
      timestamp: args.timestamp,
    };
    const svg =
      args.command === "timeseries"
        ? plotTimeseries(rows, meta, options)
        : plotScaling(rows, meta, options);
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
