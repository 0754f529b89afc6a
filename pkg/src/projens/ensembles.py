"""Projected ensembles and their replica-space moment operators.

A projected ensemble is the Born-weighted family of conditional pure states
left on subsystem A after a product-basis measurement of the bath; its k-th
moment operator lives on the k-fold replicated A space and captures all
k-point statistics of the ensemble.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sectors import sector_table
from .simulator import StateVector, rotate_measurement_frame

__all__ = [
    "ZERO_WEIGHT_CUTOFF",
    "DEFAULT_MOMENT_BUDGET",
    "ProjectedEnsemble",
    "MomentOperator",
    "project",
    "moment",
    "reduced_density_matrix",
    "conditional_variance",
    "replica_kron",
]

# outcomes below this Born weight carry no usable conditional state
ZERO_WEIGHT_CUTOFF = 1e-14

# covers N_A <= 4 at k = 2 and N_A = 2 at k = 4
DEFAULT_MOMENT_BUDGET = 4096

_CHUNK_ROWS = 1 << 14


@dataclass
class ProjectedEnsemble:
    """Conditional states on A indexed by retained bath outcomes.

    weights are raw Born probabilities (not renormalized); together with
    dropped_weight they account for the full unit of probability.  Outcome
    metadata records each bath bitstring (in the rotated frame) and its
    Hamming-weight charge.
    """

    n_a: int
    weights: np.ndarray
    states: np.ndarray  # (d_A, n_retained), unit-norm columns
    outcomes: np.ndarray
    bath_charges: np.ndarray
    dropped_weight: float

    @property
    def dim(self) -> int:
        return 1 << self.n_a


@dataclass
class MomentOperator:
    """Hermitian, PSD, unit-trace operator on the k-fold replicated A space."""

    n_a: int
    k: int
    matrix: np.ndarray
    samples: int | None = None  # Monte Carlo sample count, when applicable
    trace_defect: float | None = None  # pre-renormalization defect, when applicable

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _basis_axes(n_b: int, basis) -> np.ndarray | None:
    """Per-bath-qubit (theta, phi) rows, or None for the z basis."""
    if isinstance(basis, str):
        if basis == "z":
            return None
        if basis == "x":
            return np.tile([np.pi / 2, 0.0], (n_b, 1))
        raise ValueError(f"unknown basis {basis!r}")
    axes = np.atleast_2d(np.asarray(basis, dtype=float))
    if axes.shape != (n_b, 2):
        raise ValueError(f"need {n_b} (theta, phi) rows, got shape {axes.shape}")
    return axes


def project(state: StateVector, n_a: int, basis="z") -> ProjectedEnsemble:
    """Measure the bath in a product basis and collect conditional states on A.

    basis is "z", "x", or an (N_B, 2) array of per-bath-qubit measurement
    axes (theta, phi).  The state itself is left untouched.
    """
    n = state.n_qubits
    if not 0 < n_a < n:
        raise ValueError(f"need 0 < N_A < N, got N_A={n_a}, N={n}")
    n_b = n - n_a
    axes = _basis_axes(n_b, basis)
    work = state.copy()
    if axes is not None:
        rotate_measurement_frame(work, axes, range(n_a, n))
    mat = work.amps.reshape(1 << n_b, 1 << n_a)
    weights = np.einsum("bi,bi->b", mat, mat.conj()).real
    keep = np.flatnonzero(weights >= ZERO_WEIGHT_CUTOFF)
    dropped = float(weights.sum() - weights[keep].sum())
    states = mat[keep].T / np.sqrt(weights[keep])
    charges = sector_table(n_b).charges[keep]
    return ProjectedEnsemble(
        n_a=n_a,
        weights=weights[keep],
        states=states,
        outcomes=keep,
        bath_charges=charges,
        dropped_weight=dropped,
    )


def replica_kron(columns: np.ndarray, k: int) -> np.ndarray:
    """Row-wise k-fold Kronecker power: (m, d) -> (m, d**k)."""
    out = columns
    for _ in range(k - 1):
        out = np.einsum("bi,bj->bij", out, columns).reshape(out.shape[0], -1)
    return out


def moment(
    ensemble: ProjectedEnsemble, k: int, memory_budget: int = DEFAULT_MOMENT_BUDGET
) -> MomentOperator:
    """k-th moment operator sum_b p(b) (|psi_b><psi_b|)^(x k).

    Outcomes are accumulated in ascending outcome order (fixed chunk size),
    so the result is bit-reproducible for a given ensemble.
    """
    if k < 1:
        raise ValueError("moment order must be >= 1")
    dim = ensemble.dim**k
    if dim > memory_budget:
        raise MemoryError(
            f"replica dimension {ensemble.dim}**{k} = {dim} exceeds the "
            f"memory budget {memory_budget}"
        )
    rho = np.zeros((dim, dim), dtype=complex)
    cols = ensemble.states.T  # (n_outcomes, d_A)
    for lo in range(0, cols.shape[0], _CHUNK_ROWS):
        chunk = cols[lo : lo + _CHUNK_ROWS]
        w = ensemble.weights[lo : lo + _CHUNK_ROWS]
        phi = replica_kron(chunk, k)
        rho += (phi * w[:, None]).T @ phi.conj()
    rho /= ensemble.weights.sum()
    return MomentOperator(n_a=ensemble.n_a, k=k, matrix=0.5 * (rho + rho.conj().T))


def reduced_density_matrix(state: StateVector, n_a: int) -> np.ndarray:
    """Partial trace over the bath qubits (qubits N_A .. N-1)."""
    n = state.n_qubits
    if not 0 <= n_a <= n:
        raise ValueError(f"bad subsystem size {n_a}")
    mat = state.amps.reshape(1 << (n - n_a), 1 << n_a)
    return mat.T @ mat.conj()


def conditional_variance(ensemble: ProjectedEnsemble, observable: np.ndarray) -> float:
    """Variance over outcomes of the conditional expectation <psi_b|O|psi_b>."""
    obs = np.asarray(observable, dtype=complex)
    if not np.allclose(obs, obs.conj().T, atol=1e-10):
        raise ValueError("observable must be Hermitian")
    vals = np.einsum("ib,ij,jb->b", ensemble.states.conj(), obs, ensemble.states).real
    total = ensemble.weights.sum()
    mean = float(ensemble.weights @ vals) / total
    second = float(ensemble.weights @ vals**2) / total
    return second - mean**2
