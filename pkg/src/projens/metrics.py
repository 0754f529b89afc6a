"""Distances between moment operators, plateau extraction, and scaling fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import MomentOperator

__all__ = [
    "HERMITICITY_TOL",
    "TimeSeries",
    "trace_distance",
    "plateau_average",
    "exponential_fit",
    "power_fit",
]

HERMITICITY_TOL = 1e-8


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, MomentOperator):
        return x.matrix
    return np.asarray(x, dtype=complex)


def trace_distance(a, b) -> float:
    """(1/2) * trace norm of (a - b) for Hermitian operators.

    Inputs are symmetrized before the eigensolve; asymmetry beyond
    HERMITICITY_TOL (accumulation roundoff scale) is an error.
    """
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    diff = ma - mb
    asym = np.abs(diff - diff.conj().T).max()
    if asym > HERMITICITY_TOL:
        raise ValueError(f"inputs not Hermitian: asymmetry {asym}")
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


@dataclass
class TimeSeries:
    """One distance-vs-time trace with its provenance."""

    times: np.ndarray
    values: np.ndarray
    realization: int | None = None
    fingerprint: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have matching shapes")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


def default_plateau_window(times) -> tuple:
    """Last third of the series (the saturated region at t_max = 4N)."""
    times = np.asarray(times)
    lo = times[max(0, len(times) - max(1, len(times) // 3))]
    return int(lo), int(times[-1])


def plateau_average(
    series: TimeSeries, window: tuple | None = None, min_points: int = 5
) -> tuple:
    """Mean and standard deviation of the values inside a time window.

    The window must contain at least min_points samples; a plateau
    estimated from fewer is not meaningful.
    """
    if window is None:
        window = default_plateau_window(series.times)
    lo, hi = window
    mask = (series.times >= lo) & (series.times <= hi)
    if not mask.any():
        raise ValueError(f"window {window} contains no samples")
    if mask.sum() < min_points:
        raise ValueError(
            f"window {window} holds {int(mask.sum())} samples, need >= {min_points}"
        )
    vals = series.values[mask]
    return float(vals.mean()), float(vals.std())


def exponential_fit(x, y) -> tuple:
    """Fit y ~ prefactor * 2^(-rate * x); returns (rate, prefactor, residual).

    Least squares on log2(y); the residual is the RMS misfit in log2 space.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0):
        raise ValueError("exponential fit needs positive values")
    logy = np.log2(y)
    slope, intercept = np.polyfit(x, logy, 1)
    resid = float(np.sqrt(np.mean((logy - (slope * x + intercept)) ** 2)))
    return float(-slope), float(2.0**intercept), resid


def power_fit(x, y) -> tuple:
    """Fit y ~ prefactor * x^exponent; returns (exponent, prefactor, residual)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("power-law fit needs positive values")
    logx, logy = np.log2(x), np.log2(y)
    slope, intercept = np.polyfit(logx, logy, 1)
    resid = float(np.sqrt(np.mean((logy - (slope * logx + intercept)) ** 2)))
    return float(slope), float(2.0**intercept), resid
