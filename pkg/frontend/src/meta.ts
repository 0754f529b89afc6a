/** Reader for the harness metadata JSON (config, fingerprints, fits). */
import { readFileSync } from "fs";

export interface FitInfo {
  kind: "exponential" | "power";
  /** bits per unit x for exponential fits */
  rate?: number;
  exponent?: number;
  prefactor?: number;
}

export interface RunMeta {
  /** fingerprint of the whole sweep or run */
  fingerprint: string;
  /** per-N fingerprints keyed by system size, when present */
  runFingerprints: Map<number, string>;
  /** per-target fit info, when present */
  fits: Map<string, FitInfo>;
}

export function parseMeta(text: string, source = "<json>"): RunMeta {
  let data: any;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new Error(`${source}: not valid JSON (${(err as Error).message})`);
  }
  const runFingerprints = new Map<number, string>();
  if (Array.isArray(data.runs)) {
    for (const run of data.runs) {
      if (run?.config?.n !== undefined && run?.fingerprint) {
        runFingerprints.set(Number(run.config.n), String(run.fingerprint));
      }
    }
  } else if (data?.config?.n !== undefined && data?.fingerprint) {
    runFingerprints.set(Number(data.config.n), String(data.fingerprint));
  }
  const fits = new Map<string, FitInfo>();
  const kind = data.fit_kind === "power" ? "power" : "exponential";
  if (data.fits && typeof data.fits === "object") {
    for (const [target, fit] of Object.entries<any>(data.fits)) {
      if (fit && (fit.rate !== undefined || fit.exponent !== undefined)) {
        fits.set(target, {
          kind,
          rate: fit.rate,
          exponent: fit.exponent,
          prefactor: fit.prefactor,
        });
      }
    }
  }
  return { fingerprint: String(data.fingerprint ?? ""), runFingerprints, fits };
}

export function readMeta(path: string): RunMeta {
  return parseMeta(readFileSync(path, "utf8"), path);
}
