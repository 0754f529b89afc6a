"""Dense state-vector simulation of charge-conserving brickwork circuits.

The two-qubit gates are block-diagonal in the local charge grading
{|00>}, {|01>, |10>}, {|11>}: random phases on the one-dimensional blocks
and a Haar-random 2x2 unitary on the two-dimensional block, so every gate
commutes with the local charge operator and the total charge distribution
is a constant of the dynamics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sectors import ChargeDistribution, sector_table

__all__ = [
    "StateVector",
    "U1Gate",
    "haar_unitary",
    "random_u1_gate",
    "apply_single_qubit_gate",
    "apply_two_qubit_gate",
    "brickwork_step",
    "brickwork_pairs",
    "prepare_theta_state",
    "prepare_bitstring_state",
    "haar_random_sector_state",
    "frame_unitary",
    "rotate_measurement_frame",
    "charge_distribution_of_state",
]


@dataclass
class StateVector:
    """Normalized amplitudes over the 2**n_qubits computational basis."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex)
        if a.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {a.shape}"
            )
        self.amps = a

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())


@dataclass
class U1Gate:
    """Charge-conserving two-qubit gate.

    phi0 / phi1 are the phases imparted to |00> / |11>; u is the 2x2 unitary
    acting on span{|01>, |10>} (basis ordered |01> then |10>, first index =
    the first qubit the gate is applied to).
    """

    phi0: float
    phi1: float
    u: np.ndarray

    def matrix(self) -> np.ndarray:
        g = np.zeros((4, 4), dtype=complex)
        g[0, 0] = np.exp(1j * self.phi0)
        g[3, 3] = np.exp(1j * self.phi1)
        g[1:3, 1:3] = self.u
        return g


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_u1_gate(rng: np.random.Generator) -> U1Gate:
    phi0, phi1 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    return U1Gate(phi0, phi1, haar_unitary(2, rng))


def _axis_of(qubit: int, n_qubits: int) -> int:
    # amps.reshape([2]*n) puts the most significant bit first
    return n_qubits - 1 - qubit


def apply_single_qubit_gate(state: StateVector, u2: np.ndarray, qubit: int) -> StateVector:
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range")
    psi = state.amps.reshape([2] * n)
    psi = np.moveaxis(psi, _axis_of(qubit, n), 0).reshape(2, -1)
    psi = u2 @ psi
    psi = np.moveaxis(psi.reshape([2] * n), 0, _axis_of(qubit, n))
    state.amps = np.ascontiguousarray(psi).reshape(-1)
    return state


def apply_two_qubit_gate(state: StateVector, gate: U1Gate, i: int, j: int) -> StateVector:
    """Apply the 4x4 gate to qubits (i, j); qubit i is the first gate index."""
    n = state.n_qubits
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"bad qubit pair ({i}, {j}) for {n} qubits")
    psi = state.amps.reshape([2] * n)
    psi = np.moveaxis(psi, (_axis_of(i, n), _axis_of(j, n)), (0, 1)).reshape(4, -1)
    psi = gate.matrix() @ psi
    psi = np.moveaxis(
        psi.reshape([2] * n), (0, 1), (_axis_of(i, n), _axis_of(j, n))
    )
    state.amps = np.ascontiguousarray(psi).reshape(-1)
    return state


def brickwork_pairs(n_qubits: int, parity: int) -> list:
    """Nearest-neighbor pairs of one half-layer (open boundary)."""
    return [(i, i + 1) for i in range(parity, n_qubits - 1, 2)]


def brickwork_step(state: StateVector, rng: np.random.Generator) -> StateVector:
    """One unit of time: an even half-layer then an odd half-layer.

    Gates are freshly sampled in a fixed order (even pairs ascending, then
    odd pairs ascending), so a given generator state fixes the whole layer.
    """
    for parity in (0, 1):
        for i, j in brickwork_pairs(state.n_qubits, parity):
            apply_two_qubit_gate(state, random_u1_gate(rng), i, j)
    return state


def prepare_theta_state(n_qubits: int, theta: float) -> StateVector:
    """Two-site product family (cos t|0> + sin t|1>)(sin t|0> + cos t|1>) repeated.

    theta = 0 is the Neel state |0101...>, theta = pi/4 the all-|+> state;
    the average charge is N/2 for every theta.
    """
    if n_qubits % 2:
        raise ValueError("theta-family states need an even qubit count")
    if not 0.0 <= theta < math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2)")
    c, s = math.cos(theta), math.sin(theta)
    even = np.array([c, s], dtype=complex)
    odd = np.array([s, c], dtype=complex)
    amps = np.array([1.0 + 0.0j])
    for q in range(n_qubits):
        amps = np.kron(even if q % 2 == 0 else odd, amps)  # qubit q on the high side
    amps /= np.linalg.norm(amps)
    return StateVector(n_qubits, amps)


def prepare_bitstring_state(pattern: str) -> StateVector:
    """Computational basis state; pattern[i] is the value of qubit i."""
    n = len(pattern)
    if set(pattern) - {"0", "1"}:
        raise ValueError(f"pattern must be binary, got {pattern!r}")
    index = sum(1 << q for q, ch in enumerate(pattern) if ch == "1")
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def haar_random_sector_state(
    n_qubits: int, q0: int, rng: np.random.Generator
) -> StateVector:
    """Haar-random state supported on the charge-Q0 sector."""
    table = sector_table(n_qubits)
    if not 0 <= q0 <= n_qubits:
        raise ValueError(f"charge {q0} out of range")
    sec = table.sectors[q0]
    amps = np.zeros(1 << n_qubits, dtype=complex)
    g = rng.standard_normal(len(sec)) + 1j * rng.standard_normal(len(sec))
    amps[sec] = g / np.linalg.norm(g)
    return StateVector(n_qubits, amps)


def frame_unitary(theta: float, phi: float) -> np.ndarray:
    """Single-qubit map sending the (theta, phi) measurement axis to z.

    Implemented as the reflection (z_hat + n_hat).sigma / |z_hat + n_hat|,
    which is Hermitian and involutory, so applying it twice is exactly the
    identity.  theta = 0 short-circuits to the identity and theta = pi to X.
    """
    if abs(theta) < 1e-12:
        return np.eye(2, dtype=complex)
    if abs(theta - math.pi) < 1e-12:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    nx = math.sin(theta) * math.cos(phi)
    ny = math.sin(theta) * math.sin(phi)
    nz = math.cos(theta) + 1.0
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    nx, ny, nz = nx / norm, ny / norm, nz / norm
    return np.array([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]], dtype=complex)


def rotate_measurement_frame(state: StateVector, axes, qubits) -> StateVector:
    """Rotate the listed qubits so a later z measurement reads out the given axes.

    axes is one row (theta, phi) per listed qubit, or a single (theta, phi)
    pair applied to all of them.
    """
    qubits = list(qubits)
    axes = np.atleast_2d(np.asarray(axes, dtype=float))
    if axes.shape == (1, 2) and len(qubits) > 1:
        axes = np.repeat(axes, len(qubits), axis=0)
    if axes.shape != (len(qubits), 2):
        raise ValueError("need one (theta, phi) pair per rotated qubit")
    for (theta, phi), q in zip(axes, qubits):
        u = frame_unitary(theta, phi)
        if u[0, 1] != 0 or u[0, 0] != 1:  # skip exact no-ops
            apply_single_qubit_gate(state, u, q)
    return state


def charge_distribution_of_state(state: StateVector) -> ChargeDistribution:
    """p(Q) = total Born weight of the charge-Q sector."""
    table = sector_table(state.n_qubits)
    weights = np.abs(state.amps) ** 2
    probs = np.bincount(table.charges, weights=weights, minlength=state.n_qubits + 1)
    return ChargeDistribution(state.n_qubits, probs / probs.sum())
