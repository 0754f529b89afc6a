"""Exact combinatorics of charge sectors on qubit chains.

Conventions used throughout the package:

* qubit ``i`` is bit ``i`` of the computational basis index, with qubit 0
  the least significant bit.  Subsystem A is qubits ``0 .. N_A-1``, so a
  basis index factors as ``index = index_A + 2**N_A * index_B``.
* the conserved charge of a basis state is its Hamming weight,
  ``Q = sum_i (1 + Z_i) / 2``, taking values 0..N.

Binomial coefficients are kept as exact Python integers and converted to
floating point only when forming final ratios, so priors/posteriors built
from huge sector dimensions do not suffer catastrophic cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "binomial",
    "binary_entropy_base2",
    "binary_entropy_nats",
    "ChargeDistribution",
    "SectorTable",
    "sector_table",
    "sector_prior",
    "bath_charge_distribution",
    "posterior_charge_distribution",
    "equilibrium_distribution",
    "product_state_charge_distribution",
    "delta_distribution",
    "alternating_excitation_probs",
]

WEIGHT_TOL = 1e-12


def binomial(n: int, k: int) -> int:
    """C(n, k) in exact integer arithmetic; 0 outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def binary_entropy_base2(sigma: float) -> float:
    """Binary entropy H2(sigma) in bits, with 0 log 0 = 0."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"binary entropy defined on [0, 1], got {sigma}")
    h = 0.0
    if sigma > 0.0:
        h -= sigma * math.log2(sigma)
    if sigma < 1.0:
        h -= (1.0 - sigma) * math.log2(1.0 - sigma)
    return h


def binary_entropy_nats(sigma: float) -> float:
    """Binary entropy in natural-log units (used by concentration bounds)."""
    return binary_entropy_base2(sigma) * math.log(2.0)


@dataclass
class ChargeDistribution:
    """Probability distribution p(Q) of the total charge, Q = 0..n_qubits."""

    n_qubits: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.n_qubits + 1,):
            raise ValueError(
                f"expected {self.n_qubits + 1} probabilities, got shape {p.shape}"
            )
        if np.any(p < -WEIGHT_TOL):
            raise ValueError("charge probabilities must be nonnegative")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"charge probabilities sum to {total}, expected 1")
        self.probs = np.clip(p, 0.0, None)

    def mean(self) -> float:
        q = np.arange(self.n_qubits + 1)
        return float(q @ self.probs)

    def var(self) -> float:
        q = np.arange(self.n_qubits + 1)
        m = q @ self.probs
        return float((q - m) ** 2 @ self.probs)


@dataclass(frozen=True)
class SectorTable:
    """Charge-sector layout of the 2**n computational basis.

    ``sectors[q]`` lists the basis indices of Hamming weight q in ascending
    order; ``charges`` and ``positions`` give the inverse lookup: basis index
    ``i`` sits at ``sectors[charges[i]][positions[i]]``.
    """

    n_qubits: int
    charges: np.ndarray
    sectors: tuple
    positions: np.ndarray

    def sector_dim(self, q: int) -> int:
        return len(self.sectors[q])


@lru_cache(maxsize=None)
def sector_table(n_qubits: int) -> SectorTable:
    """Build (and cache) the sector layout for an n-qubit chain."""
    if n_qubits < 0:
        raise ValueError("n_qubits must be nonnegative")
    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.int64)
    charges = np.zeros(dim, dtype=np.int64)
    tmp = idx.copy()
    for _ in range(n_qubits):
        charges += tmp & 1
        tmp >>= 1
    sectors = tuple(np.flatnonzero(charges == q) for q in range(n_qubits + 1))
    positions = np.zeros(dim, dtype=np.int64)
    for sec in sectors:
        positions[sec] = np.arange(len(sec))
    for q, sec in enumerate(sectors):
        assert len(sec) == binomial(n_qubits, q)
    return SectorTable(n_qubits, charges, sectors, positions)


def sector_prior(n_qubits: int, n_a: int, q0: int) -> np.ndarray:
    """Prior pi(Q_A | Q0) over the subsystem charge for a definite total charge.

    pi(Q_A|Q0) = C(N_A, Q_A) C(N-N_A, Q0-Q_A) / C(N, Q0); the entries sum to
    1 exactly by the Vandermonde identity (asserted in integer arithmetic).
    """
    if not 0 <= q0 <= n_qubits:
        raise ValueError(f"charge {q0} out of range for {n_qubits} qubits")
    if not 0 <= n_a <= n_qubits:
        raise ValueError(f"subsystem size {n_a} out of range")
    n_b = n_qubits - n_a
    counts = [binomial(n_a, qa) * binomial(n_b, q0 - qa) for qa in range(n_a + 1)]
    denom = binomial(n_qubits, q0)
    assert sum(counts) == denom
    return np.array([c / denom for c in counts])


def bath_charge_distribution(p: ChargeDistribution, n_a: int) -> np.ndarray:
    """Marginal distribution pi_p(Q_B) of the bath charge under full scrambling.

    pi_p(Q_B) = sum_Q pi(Q_B|Q) p(Q) with
    pi(Q_B|Q) = C(N_A, Q-Q_B) C(N_B, Q_B) / C(N, Q).
    """
    n = p.n_qubits
    if not 0 <= n_a < n:
        raise ValueError("need 0 <= N_A < N for a nonempty bath")
    n_b = n - n_a
    out = np.zeros(n_b + 1)
    for q_b in range(n_b + 1):
        c_b = binomial(n_b, q_b)
        acc = 0.0
        for q in range(n + 1):
            if p.probs[q] == 0.0:
                continue
            num = binomial(n_a, q - q_b) * c_b
            if num:
                acc += (num / binomial(n, q)) * p.probs[q]
        out[q_b] = acc
    return out / out.sum()


def posterior_charge_distribution(
    p: ChargeDistribution, n_a: int, q_b: int
) -> np.ndarray:
    """Posterior pi_p(Q | Q_B) over the total charge given the bath charge."""
    n = p.n_qubits
    n_b = n - n_a
    if not 0 <= q_b <= n_b:
        raise ValueError(f"bath charge {q_b} out of range for {n_b} bath qubits")
    marginal = bath_charge_distribution(p, n_a)[q_b]
    if marginal <= 0.0:
        raise ValueError(f"bath charge {q_b} has zero probability")
    c_b = binomial(n_b, q_b)
    out = np.zeros(n + 1)
    for q in range(n + 1):
        num = binomial(n_a, q - q_b) * c_b
        if num and p.probs[q] > 0.0:
            out[q] = (num / binomial(n, q)) * p.probs[q]
    return out / out.sum()


def equilibrium_distribution(z: float, n_qubits: int) -> ChargeDistribution:
    """Thermal charge distribution p(Q) = z^Q C(N, Q) / (1+z)^N at fugacity z."""
    if z <= 0.0:
        raise ValueError("fugacity must be positive")
    q = np.arange(n_qubits + 1)
    logs = (
        q * math.log(z)
        + np.array([math.lgamma(n_qubits + 1) - math.lgamma(k + 1) - math.lgamma(n_qubits - k + 1) for k in q])
        - n_qubits * math.log1p(z)
    )
    probs = np.exp(logs)
    return ChargeDistribution(n_qubits, probs / probs.sum())


def product_state_charge_distribution(
    per_qubit_excitation_probs,
) -> ChargeDistribution:
    """Poisson-binomial charge distribution of a product state.

    Each qubit is excited independently with its own probability; p(Q) is the
    convolution of the per-qubit Bernoulli distributions.
    """
    probs = np.asarray(per_qubit_excitation_probs, dtype=float)
    if np.any((probs < 0.0) | (probs > 1.0)):
        raise ValueError("excitation probabilities must lie in [0, 1]")
    dist = np.array([1.0])
    for pi in probs:
        dist = np.convolve(dist, [1.0 - pi, pi])
    return ChargeDistribution(len(probs), dist / dist.sum())


def delta_distribution(n_qubits: int, q0: int) -> ChargeDistribution:
    """Definite-charge distribution p(Q) = delta_{Q, Q0}."""
    if not 0 <= q0 <= n_qubits:
        raise ValueError(f"charge {q0} out of range for {n_qubits} qubits")
    probs = np.zeros(n_qubits + 1)
    probs[q0] = 1.0
    return ChargeDistribution(n_qubits, probs)


def alternating_excitation_probs(n_qubits: int, theta: float) -> np.ndarray:
    """Excitation profile (sin^2, cos^2, sin^2, ...) of the two-site product family.

    The variance of the resulting charge distribution is (N/4) sin^2(2 theta).
    """
    if n_qubits % 2:
        raise ValueError("the alternating family needs an even qubit count")
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    probs = np.empty(n_qubits)
    probs[0::2] = s2
    probs[1::2] = c2
    return probs
