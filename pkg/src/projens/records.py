"""Result containers and on-disk formats for experiment runs.

One experiment produces a CSV of per-realization distance-vs-time rows plus
a JSON metadata file (config, fingerprint, plateaus, fits).  Moment
matrices dumped by the CLI use a small self-describing text header followed
by row-major (re, im) pairs.
"""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .ensembles import MomentOperator

__all__ = [
    "fingerprint_of",
    "ResultRecord",
    "SweepRecord",
    "write_run_csv",
    "write_sweep_csv",
    "write_meta_json",
    "write_matrix",
    "read_matrix",
]


def fingerprint_of(config_dict: dict) -> str:
    """Short stable hash of a canonicalized config dictionary."""
    blob = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass
class ResultRecord:
    """Everything produced by one experiment run.

    deltas maps each target label to an array of shape
    (realizations, n_times); means are taken over realizations after the
    per-realization distance computation.
    """

    config_dict: dict
    fingerprint: str
    times: np.ndarray
    deltas: dict
    plateau_window: tuple
    failures: list = field(default_factory=list)

    def mean_delta(self, target: str) -> np.ndarray:
        return self.deltas[target].mean(axis=0)

    def plateau(self, target: str) -> tuple:
        lo, hi = self.plateau_window
        mask = (self.times >= lo) & (self.times <= hi)
        vals = self.mean_delta(target)[mask]
        return float(vals.mean()), float(vals.std())

    @property
    def targets(self) -> list:
        return list(self.deltas)


@dataclass
class SweepRecord:
    """A scan over system sizes with fits of the plateau scaling."""

    base_config_dict: dict
    fingerprint: str
    n_values: list
    records: list
    fit_kind: str
    fits: dict  # target label -> dict with rate/exponent, prefactor, residual


def _run_rows(record: ResultRecord):
    cfg = record.config_dict
    for target, mat in record.deltas.items():
        for r in range(mat.shape[0]):
            for ti, t in enumerate(record.times):
                yield {
                    "N": cfg["n"],
                    "N_A": cfg["n_a"],
                    "k": cfg["k"],
                    "basis": cfg["basis"],
                    "target": target,
                    "realization": r,
                    "t": int(t),
                    "delta": f"{mat[r, ti]:.12e}",
                }


_CSV_FIELDS = ["N", "N_A", "k", "basis", "target", "realization", "t", "delta"]


def write_run_csv(record: ResultRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        writer.writeheader()
        writer.writerows(_run_rows(record))


def write_sweep_csv(sweep: SweepRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        writer.writeheader()
        for record in sweep.records:
            writer.writerows(_run_rows(record))


def _record_meta(record: ResultRecord) -> dict:
    return {
        "config": record.config_dict,
        "fingerprint": record.fingerprint,
        "plateau_window": list(record.plateau_window),
        "plateaus": {
            target: dict(zip(("mean", "std"), record.plateau(target)))
            for target in record.targets
        },
        "failures": record.failures,
    }


def write_meta_json(obj, path) -> None:
    """Write run or sweep metadata (config, fingerprints, plateaus, fits)."""
    if isinstance(obj, ResultRecord):
        meta = _record_meta(obj)
    elif isinstance(obj, SweepRecord):
        meta = {
            "config": obj.base_config_dict,
            "fingerprint": obj.fingerprint,
            "n_values": list(obj.n_values),
            "fit_kind": obj.fit_kind,
            "fits": obj.fits,
            "runs": [_record_meta(r) for r in obj.records],
        }
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_matrix(mom: MomentOperator, path) -> None:
    """Dump a moment matrix as row-major (re, im) pairs with a header."""
    mat = mom.matrix
    with open(path, "w") as fh:
        fh.write("# projens moment matrix v1\n")
        fh.write(f"# dim={mat.shape[0]} n_a={mom.n_a} k={mom.k}\n")
        fh.write("# row-major, one entry per line: re im\n")
        for value in mat.ravel():
            fh.write(f"{value.real:.17e} {value.imag:.17e}\n")


def read_matrix(path) -> MomentOperator:
    header = {}
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if "=" in token:
                        key, _, val = token.partition("=")
                        header[key] = val
                continue
            re_s, im_s = line.split()
            values.append(complex(float(re_s), float(im_s)))
    dim = int(header.get("dim", round(len(values) ** 0.5)))
    if dim * dim != len(values):
        raise ValueError(f"matrix file {path} has {len(values)} entries, not {dim}^2")
    n_a = None if header.get("n_a", "None") == "None" else int(header["n_a"])
    k = int(header.get("k", 1))
    return MomentOperator(n_a=n_a, k=k, matrix=np.array(values).reshape(dim, dim))
