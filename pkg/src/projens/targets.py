"""Universal target ensembles for projected-ensemble convergence tests.

Provides exact Haar and sector-Haar moments, the direct sum of sector Haar
ensembles, Scrooge ensembles (density-matrix distortions of the Haar
measure) sampled by rejection or integrated exactly, the generalized
Scrooge ensemble (GSE) built from a charge distribution, and the
type-resolved average weights that underpin the replica-limit form of the
GSE moments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np
from scipy.integrate import quad

from .ensembles import DEFAULT_MOMENT_BUDGET, MomentOperator, replica_kron
from .sectors import (
    ChargeDistribution,
    bath_charge_distribution,
    binomial,
    posterior_charge_distribution,
    sector_prior,
    sector_table,
)

__all__ = [
    "TargetSpec",
    "type_vectors",
    "multinomial",
    "symmetric_projector",
    "haar_moment",
    "sector_haar_moment",
    "direct_sum_moment",
    "scrooge_sample",
    "scrooge_states",
    "scrooge_moment_mc",
    "scrooge_moment_exact",
    "gse_rho_bar",
    "gse_moment_mc",
    "gse_moment_exact",
    "gse_moment_analytic",
    "xbasis_scrooge_rho",
    "finite_n_rho",
    "type_weight_exact",
    "type_weight_mc",
    "type_weight_mc_batch",
    "type_weight_replica_z",
    "type_weight_replica_x",
]

_MC_CHUNK = 1 << 15


# ---------------------------------------------------------------------------
# type vectors and replica permutations


@lru_cache(maxsize=None)
def type_vectors(k: int, n_bins: int) -> tuple:
    """All multiplicity vectors of length n_bins summing to k, lexicographic."""
    if n_bins == 1:
        return ((k,),)
    out = []
    for first in range(k + 1):
        for rest in type_vectors(k - first, n_bins - 1):
            out.append((first,) + rest)
    return tuple(out)


def multinomial(k: int, t_vec) -> int:
    total = math.factorial(k)
    for t in t_vec:
        total //= math.factorial(t)
    return total


@lru_cache(maxsize=None)
def _digit_table(d: int, k: int) -> np.ndarray:
    """Base-d digits of 0..d**k-1, most significant replica first."""
    idx = np.arange(d**k)
    digits = np.empty((d**k, k), dtype=np.int64)
    for m in range(k):
        digits[:, m] = (idx // d ** (k - 1 - m)) % d
    return digits


def _perm_dest(d: int, k: int, perm) -> np.ndarray:
    """Destination index of each basis index under a replica permutation."""
    digits = _digit_table(d, k)
    powers = d ** (k - 1 - np.arange(k))
    return digits[:, list(perm)] @ powers


def symmetric_projector(
    d: int, k: int, memory_budget: int = DEFAULT_MOMENT_BUDGET
) -> np.ndarray:
    """Projector onto the symmetric subspace of (C^d)^(x k).

    (1/k!) sum over replica permutation operators; idempotent with trace
    C(d+k-1, k).
    """
    dim = d**k
    if dim > memory_budget:
        raise MemoryError(f"replica dimension {dim} exceeds budget {memory_budget}")
    proj = np.zeros((dim, dim))
    src = np.arange(dim)
    for perm in permutations(range(k)):
        proj[_perm_dest(d, k, perm), src] += 1.0
    return proj / math.factorial(k)


@lru_cache(maxsize=None)
def _haar_moment_matrix(d: int, k: int) -> np.ndarray:
    return symmetric_projector(d, k) / binomial(d + k - 1, k)


def haar_moment(d: int, k: int, memory_budget: int = DEFAULT_MOMENT_BUDGET) -> MomentOperator:
    """k-th moment of the Haar ensemble on a d-dimensional space."""
    if d**k > memory_budget:
        raise MemoryError(f"replica dimension {d**k} exceeds budget {memory_budget}")
    n_a = d.bit_length() - 1 if d & (d - 1) == 0 else None
    return MomentOperator(n_a=n_a, k=k, matrix=_haar_moment_matrix(d, k).astype(complex))


@lru_cache(maxsize=None)
def _sector_haar_matrix(n_a: int, q_a: int, k: int) -> np.ndarray:
    """Sector Haar moment embedded at the sector's basis positions in (C^{2^n_a})^(x k)."""
    table = sector_table(n_a)
    sec = table.sectors[q_a]
    d_a = 1 << n_a
    inner = _haar_moment_matrix(len(sec), k)
    idx = sec.copy()
    for _ in range(k - 1):
        idx = (idx[:, None] * d_a + sec[None, :]).ravel()
    full = np.zeros((d_a**k, d_a**k))
    full[np.ix_(idx, idx)] = inner
    return full


def sector_haar_moment(n_a: int, q_a: int, k: int) -> MomentOperator:
    """k-th Haar moment on the charge-q_a sector of an n_a-qubit subsystem."""
    if not 0 <= q_a <= n_a:
        raise ValueError(f"sector charge {q_a} out of range for {n_a} qubits")
    return MomentOperator(n_a=n_a, k=k, matrix=_sector_haar_matrix(n_a, q_a, k).astype(complex))


def direct_sum_moment(n_qubits: int, n_a: int, q0: int, k: int) -> MomentOperator:
    """Moment of the direct sum of sector Haar ensembles, weighted by pi(Q_A|Q0)."""
    prior = sector_prior(n_qubits, n_a, q0)
    dim = (1 << n_a) ** k
    matrix = np.zeros((dim, dim), dtype=complex)
    for q_a, w in enumerate(prior):
        if w > 0.0:
            matrix += w * _sector_haar_matrix(n_a, q_a, k)
    return MomentOperator(n_a=n_a, k=k, matrix=matrix)


# ---------------------------------------------------------------------------
# Scrooge ensembles


def _check_density_matrix(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if not np.allclose(rho, rho.conj().T, atol=1e-10):
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    return 0.5 * (rho + rho.conj().T)


def _sqrt_psd(rho: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh(rho)
    if lam.min() < -1e-12:
        raise ValueError(f"density matrix has negative eigenvalue {lam.min()}")
    lam = np.clip(lam, 0.0, None)
    return (vecs * np.sqrt(lam)) @ vecs.conj().T


def scrooge_states(rho: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw m Scrooge-ensemble states (rows) for the given density matrix.

    Haar draws are accepted with probability <psi|rho|psi> / lambda_max
    (rejection against the top eigenvalue), then distorted by rho^(1/2)
    and renormalized.
    """
    rho = _check_density_matrix(rho)
    d = rho.shape[0]
    lam_max = float(np.linalg.eigvalsh(rho)[-1])
    sqrt_rho = _sqrt_psd(rho)
    out = np.empty((m, d), dtype=complex)
    got = 0
    # expected acceptance rate is 1/(d * lam_max)
    batch = max(256, min(_MC_CHUNK, int(2.0 * m * d * lam_max) + 16))
    while got < m:
        g = rng.standard_normal((batch, d)) + 1j * rng.standard_normal((batch, d))
        g /= np.linalg.norm(g, axis=1)[:, None]
        overlap = np.einsum("bi,ij,bj->b", g.conj(), rho, g).real
        keep = g[rng.random(batch) * lam_max < overlap]
        take = min(m - got, keep.shape[0])
        out[got : got + take] = keep[:take]
        got += take
    psi = out @ sqrt_rho.T
    psi /= np.linalg.norm(psi, axis=1)[:, None]
    return psi


def scrooge_sample(rho: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One Scrooge draw; see scrooge_states."""
    return scrooge_states(rho, 1, rng)[0]


def scrooge_moment_mc(
    rho: np.ndarray,
    k: int,
    m_samples: int,
    rng: np.random.Generator,
    memory_budget: int = DEFAULT_MOMENT_BUDGET,
) -> MomentOperator:
    """Monte Carlo estimate of the k-th Scrooge moment from m_samples draws."""
    if m_samples < 1:
        raise ValueError("need at least one sample")
    d = rho.shape[0]
    if d**k > memory_budget:
        raise MemoryError(f"replica dimension {d**k} exceeds budget {memory_budget}")
    acc = np.zeros((d**k, d**k), dtype=complex)
    left = m_samples
    while left > 0:
        m = min(left, _MC_CHUNK)
        psi = scrooge_states(rho, m, rng)
        phi = replica_kron(psi, k)
        acc += phi.T @ phi.conj()
        left -= m
    acc /= m_samples
    n_a = d.bit_length() - 1 if d & (d - 1) == 0 else None
    return MomentOperator(
        n_a=n_a, k=k, matrix=0.5 * (acc + acc.conj().T), samples=m_samples
    )


def _scrooge_radial_coeff(lam: np.ndarray, picks: tuple, k: int) -> float:
    """Radial integral weighting one replica digit-multiset of eigenvalues.

    Writing a Scrooge draw as a Gaussian vector with covariance rho
    (size-biased, then projected to the sphere), Wick contractions reduce
    the k-th moment to one scalar integral per eigenvalue multiset:
    int_0^inf dt t^(k-2)/(k-2)! * prod_l (1+t lam_l)^(-1)
                                * prod_(i in picks) lam_i/(1+t lam_i).
    """
    lam_picks = lam[list(picks)]
    if np.any(lam_picks == 0.0):
        return 0.0
    gamma = math.factorial(k - 2)

    def integrand(t):
        val = t ** (k - 2) / gamma
        val /= np.prod(1.0 + t * lam)
        val *= np.prod(lam_picks / (1.0 + t * lam_picks))
        return val

    val, _ = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def scrooge_moment_exact(
    rho: np.ndarray, k: int, memory_budget: int = DEFAULT_MOMENT_BUDGET
) -> MomentOperator:
    """k-th Scrooge moment by exact quadrature (no sampling error).

    Equals the m -> infinity limit of scrooge_moment_mc up to 1e-12-level
    quadrature error; reduces to the Haar moment for rho = I/d.
    """
    rho = _check_density_matrix(rho)
    d = rho.shape[0]
    dim = d**k
    if dim > memory_budget:
        raise MemoryError(f"replica dimension {dim} exceeds budget {memory_budget}")
    if k == 1:
        n_a = d.bit_length() - 1 if d & (d - 1) == 0 else None
        return MomentOperator(n_a=n_a, k=1, matrix=rho.copy())
    diag = np.diagonal(rho)
    if np.allclose(rho, np.diag(diag), atol=1e-14):
        lam, vecs = diag.real.copy(), None
    else:
        lam, vecs = np.linalg.eigh(rho)
        lam = np.clip(lam, 0.0, None)
    digits = _digit_table(d, k)
    coeff_cache: dict = {}
    cvals = np.empty(dim)
    for i in range(dim):
        key = tuple(sorted(digits[i]))
        if key not in coeff_cache:
            coeff_cache[key] = _scrooge_radial_coeff(lam, key, k)
        cvals[i] = coeff_cache[key]
    matrix = np.zeros((dim, dim), dtype=complex)
    src = np.arange(dim)
    for perm in permutations(range(k)):
        matrix[_perm_dest(d, k, perm), src] += cvals
    if vecs is not None:
        w = vecs
        for _ in range(k - 1):
            w = np.kron(w, vecs)
        matrix = w @ matrix @ w.conj().T
    n_a = d.bit_length() - 1 if d & (d - 1) == 0 else None
    return MomentOperator(n_a=n_a, k=k, matrix=matrix)


# ---------------------------------------------------------------------------
# generalized Scrooge ensemble


def gse_rho_bar(p: ChargeDistribution, n_a: int, q_b: int) -> np.ndarray:
    """Average state on A conditioned on bath charge q_b.

    Block-diagonal across charge sectors: the posterior weight of sector
    Q_A spread uniformly over the maximally mixed state of that sector.
    """
    posterior = posterior_charge_distribution(p, n_a, q_b)
    table = sector_table(n_a)
    diag = np.zeros(1 << n_a)
    for q_a in range(n_a + 1):
        q = q_a + q_b
        if q <= p.n_qubits and posterior[q] > 0.0:
            sec = table.sectors[q_a]
            diag[sec] = posterior[q] / len(sec)
    return np.diag(diag).astype(complex)


def gse_moment_mc(
    p: ChargeDistribution,
    n_a: int,
    k: int,
    m_samples: int,
    rng: np.random.Generator,
    memory_budget: int = DEFAULT_MOMENT_BUDGET,
) -> MomentOperator:
    """Monte Carlo GSE moment: draw Q_B from its marginal, then Scrooge states.

    The m_samples pairs are allocated to bath charges by a single
    multinomial draw, which is distribution-identical to sampling pairs
    one at a time.
    """
    if m_samples < 1:
        raise ValueError("need at least one sample")
    dim = (1 << n_a) ** k
    if dim > memory_budget:
        raise MemoryError(f"replica dimension {dim} exceeds budget {memory_budget}")
    marginal = bath_charge_distribution(p, n_a)
    counts = rng.multinomial(m_samples, marginal)
    acc = np.zeros((dim, dim), dtype=complex)
    for q_b, count in enumerate(counts):
        if count == 0:
            continue
        rho_bar = gse_rho_bar(p, n_a, q_b)
        sub = scrooge_moment_mc(rho_bar, k, int(count), rng, memory_budget)
        acc += (count / m_samples) * sub.matrix
    return MomentOperator(n_a=n_a, k=k, matrix=acc, samples=m_samples)


def gse_moment_exact(
    p: ChargeDistribution,
    n_a: int,
    k: int,
    memory_budget: int = DEFAULT_MOMENT_BUDGET,
) -> MomentOperator:
    """GSE moment with each Scrooge constituent integrated exactly."""
    marginal = bath_charge_distribution(p, n_a)
    dim = (1 << n_a) ** k
    acc = np.zeros((dim, dim), dtype=complex)
    for q_b, w in enumerate(marginal):
        if w <= 0.0:
            continue
        acc += w * scrooge_moment_exact(gse_rho_bar(p, n_a, q_b), k, memory_budget).matrix
    return MomentOperator(n_a=n_a, k=k, matrix=acc)


def gse_moment_analytic(
    p: ChargeDistribution,
    n_a: int,
    k: int,
    memory_budget: int = DEFAULT_MOMENT_BUDGET,
) -> MomentOperator:
    """GSE moment in the large-sector type-sum form.

    For each bath charge, sums over replica type vectors the squared
    multinomial weight times the tensor product of sector Haar moments,
    sandwiched between symmetric-subspace projectors.  The result is
    renormalized to unit trace and the (tiny) trace defect recorded.
    Exactly reproduces direct_sum_moment when p is a point mass.
    """
    d_a = 1 << n_a
    dim = d_a**k
    if dim > memory_budget:
        raise MemoryError(f"replica dimension {dim} exceeds budget {memory_budget}")
    marginal = bath_charge_distribution(p, n_a)
    p_sym = symmetric_projector(d_a, k, memory_budget)
    acc = np.zeros((dim, dim), dtype=complex)
    for q_b, w_b in enumerate(marginal):
        if w_b <= 0.0:
            continue
        posterior = posterior_charge_distribution(p, n_a, q_b)
        post_a = np.array(
            [posterior[q_a + q_b] if q_a + q_b <= p.n_qubits else 0.0 for q_a in range(n_a + 1)]
        )
        inner = np.zeros((dim, dim))
        for t_vec in type_vectors(k, n_a + 1):
            weight = float(multinomial(k, t_vec)) ** 2
            op = None
            for q_a, t in enumerate(t_vec):
                if t == 0:
                    continue
                if post_a[q_a] == 0.0:
                    weight = 0.0
                    break
                weight *= post_a[q_a] ** t
                block = _sector_haar_matrix(n_a, q_a, t)
                op = block if op is None else np.kron(op, block)
            if weight > 0.0:
                inner += weight * op
        acc += w_b * (p_sym @ inner @ p_sym)
    trace = float(np.trace(acc).real)
    return MomentOperator(
        n_a=n_a, k=k, matrix=acc / trace, trace_defect=abs(trace - 1.0)
    )


# ---------------------------------------------------------------------------
# charge-non-revealing (x basis) targets


def xbasis_scrooge_rho(n_qubits: int, n_a: int, q0: int) -> np.ndarray:
    """Density matrix steering the Scrooge target under x-basis measurements.

    Diagonal with entry C(N_B, Q0-Q_A)/C(N, Q0) on every basis state of
    subsystem charge Q_A; equivalently the prior-weighted mixture of
    maximally mixed sector states.
    """
    prior = sector_prior(n_qubits, n_a, q0)
    table = sector_table(n_a)
    diag = np.zeros(1 << n_a)
    for q_a in range(n_a + 1):
        if prior[q_a] > 0.0:
            sec = table.sectors[q_a]
            diag[sec] = prior[q_a] / len(sec)
    return np.diag(diag).astype(complex)


def finite_n_rho(n_qubits: int, n_a: int, q0: int) -> np.ndarray:
    """Size-dependent average reduced density matrix; same formula as
    xbasis_scrooge_rho, under the name used when it serves as the
    finite-size Scrooge target."""
    return xbasis_scrooge_rho(n_qubits, n_a, q0)


# ---------------------------------------------------------------------------
# type-resolved average outcome weights (replica machinery)


def _rising(x: int, ell: int) -> int:
    out = 1
    for j in range(ell):
        out *= x + j
    return out


def type_weight_exact(p: ChargeDistribution, t_vec, q_b: int, n: int) -> float:
    """Sector-Haar average of p(z)^n * prod_qa p(Q_A, z)^T_Qa, exactly.

    z is any fixed bath string of charge q_b (the value depends on z only
    through its charge).  Evaluated as an exact sum over length-n type
    vectors with big-integer factorial ratios, converted to float per term.
    """
    if n < 1:
        raise ValueError("replica power n must be >= 1")
    n_qubits = p.n_qubits
    n_a = len(t_vec) - 1
    total = 0.0
    for t_extra in type_vectors(n, n_a + 1):
        term = float(multinomial(n, t_extra))
        for q_a in range(n_a + 1):
            ell = t_vec[q_a] + t_extra[q_a]
            if ell == 0:
                continue
            q = q_a + q_b
            d_q = binomial(n_qubits, q) if 0 <= q <= n_qubits else 0
            d_qa = binomial(n_a, q_a)
            pq = p.probs[q] if 0 <= q <= n_qubits else 0.0
            if d_q == 0 or d_qa == 0 or pq == 0.0:
                term = 0.0
                break
            term *= pq**ell * (_rising(d_qa, ell) / _rising(d_q, ell))
        total += term
    return total


def type_weight_mc_batch(
    p: ChargeDistribution,
    n_a: int,
    q_b: int,
    cells,
    samples: int,
    rng: np.random.Generator,
) -> list:
    """Monte Carlo oracle for type_weight_exact over many (t_vec, n) cells.

    Assembles random states with the given charge distribution from Haar
    draws in each sector, projects onto a fixed bath string of charge q_b,
    and averages (sum_qa p)^n * prod_qa p^T_qa over the draws.  All cells
    share the same draws; returns one (mean, standard error) per cell.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    n_qubits = p.n_qubits
    n_b = n_qubits - n_a
    if not 0 <= q_b <= n_b:
        raise ValueError(f"bath charge {q_b} out of range")
    table = sector_table(n_qubits)
    table_a = sector_table(n_a)
    z_index = int(sector_table(n_b).sectors[q_b][0])
    d_a = 1 << n_a
    live = [q for q in range(n_qubits + 1) if p.probs[q] > 0.0]
    vals = np.empty((len(cells), samples))
    done = 0
    while done < samples:
        m = min(samples - done, _MC_CHUNK)
        amps = np.zeros((m, 1 << n_qubits), dtype=complex)
        for q in live:
            sec = table.sectors[q]
            g = rng.standard_normal((m, len(sec))) + 1j * rng.standard_normal(
                (m, len(sec))
            )
            g /= np.linalg.norm(g, axis=1)[:, None]
            amps[:, sec] = math.sqrt(p.probs[q]) * g
        proj = amps.reshape(m, 1 << n_b, d_a)[:, z_index, :]
        weights2 = np.abs(proj) ** 2
        p_qa = np.stack(
            [weights2[:, table_a.sectors[q_a]].sum(axis=1) for q_a in range(n_a + 1)],
            axis=1,
        )
        p_tot = p_qa.sum(axis=1)
        for ci, (t_vec, n) in enumerate(cells):
            chunk_vals = p_tot**n if n else np.ones(m)
            for q_a, t in enumerate(t_vec):
                if t:
                    chunk_vals = chunk_vals * p_qa[:, q_a] ** t
            vals[ci, done : done + m] = chunk_vals
        done += m
    out = []
    for ci in range(len(cells)):
        mean = float(vals[ci].mean())
        se = float(vals[ci].std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
        out.append((mean, se))
    return out


def type_weight_mc(
    p: ChargeDistribution,
    t_vec,
    q_b: int,
    n: int,
    samples: int,
    rng: np.random.Generator,
) -> tuple:
    """Monte Carlo oracle for a single type weight: (mean, standard error)."""
    n_a = len(t_vec) - 1
    return type_weight_mc_batch(p, n_a, q_b, [(tuple(t_vec), n)], samples, rng)[0]


def type_weight_replica_z(p: ChargeDistribution, t_vec, q_b: int) -> float:
    """Replica-limit weight for z-basis outcomes: the large-sector form
    C(N_B, Q_B)^(-1) pi_p(Q_B) prod_qa posterior(Q_A+Q_B|Q_B)^T_Qa."""
    n_a = len(t_vec) - 1
    n_b = p.n_qubits - n_a
    marginal = bath_charge_distribution(p, n_a)
    if not 0 <= q_b <= n_b or marginal[q_b] <= 0.0:
        raise ValueError(f"bath charge {q_b} has zero probability")
    posterior = posterior_charge_distribution(p, n_a, q_b)
    out = marginal[q_b] / binomial(n_b, q_b)
    for q_a, t in enumerate(t_vec):
        if t:
            q = q_a + q_b
            post = posterior[q] if q <= p.n_qubits else 0.0
            out *= post**t
    return out


def type_weight_replica_x(n_qubits: int, n_a: int, q0: int, t_vec) -> float:
    """Replica-limit weight for x-basis outcomes on a definite-charge state:
    2^(-N_B) prod_qa pi(Q_A|Q0)^T_Qa."""
    prior = sector_prior(n_qubits, n_a, q0)
    out = 2.0 ** -(n_qubits - n_a)
    for q_a, t in enumerate(t_vec):
        if t:
            out *= prior[q_a] ** t
    return out


# ---------------------------------------------------------------------------
# target resolution


@dataclass
class TargetSpec:
    """One target ensemble: a variant tag plus its parameters.

    Variants (string forms accepted by parse, parameter after a colon):
      haar | sector-haar:QA | direct-sum[:Q0] | gse | gse-mc | gse-replica |
      finite-n-scrooge[:Q0] | finite-n-scrooge-mc[:Q0] | scrooge (explicit rho)
    Q0 defaults to the definite charge of the experiment's initial state.
    """

    variant: str
    q_a: int | None = None
    q0: int | None = None
    rho: np.ndarray | None = None

    @classmethod
    def parse(cls, text: str) -> "TargetSpec":
        name, _, arg = text.partition(":")
        name = name.strip()
        arg = arg.strip()
        if name == "sector-haar":
            if not arg:
                raise ValueError("sector-haar target needs a sector charge")
            return cls(name, q_a=int(arg))
        if name in ("direct-sum", "finite-n-scrooge", "finite-n-scrooge-mc"):
            return cls(name, q0=int(arg) if arg else None)
        if name in ("haar", "gse", "gse-mc", "gse-replica", "scrooge"):
            if arg:
                raise ValueError(f"target {name!r} takes no parameter")
            return cls(name)
        raise ValueError(f"unknown target {text!r}")

    def label(self) -> str:
        if self.variant == "sector-haar":
            return f"sector-haar:{self.q_a}"
        if self.q0 is not None and self.variant in (
            "direct-sum",
            "finite-n-scrooge",
            "finite-n-scrooge-mc",
        ):
            return f"{self.variant}:{self.q0}"
        return self.variant

    def resolve(
        self,
        n_qubits: int,
        n_a: int,
        k: int,
        p: ChargeDistribution | None = None,
        default_q0: int | None = None,
        mc_samples: int = 10**6,
        rng: np.random.Generator | None = None,
        memory_budget: int = DEFAULT_MOMENT_BUDGET,
    ) -> MomentOperator:
        q0 = self.q0 if self.q0 is not None else default_q0
        if self.variant == "haar":
            return haar_moment(1 << n_a, k, memory_budget)
        if self.variant == "sector-haar":
            return sector_haar_moment(n_a, self.q_a, k)
        if self.variant == "direct-sum":
            if q0 is None:
                raise ValueError("direct-sum target needs a definite total charge")
            return direct_sum_moment(n_qubits, n_a, q0, k)
        if self.variant == "scrooge":
            if self.rho is None:
                raise ValueError("scrooge target needs an explicit density matrix")
            return scrooge_moment_exact(self.rho, k, memory_budget)
        if self.variant == "finite-n-scrooge":
            if q0 is None:
                raise ValueError("finite-n-scrooge target needs a total charge")
            return scrooge_moment_exact(finite_n_rho(n_qubits, n_a, q0), k, memory_budget)
        if self.variant == "finite-n-scrooge-mc":
            if q0 is None:
                raise ValueError("finite-n-scrooge-mc target needs a total charge")
            if rng is None:
                raise ValueError("Monte Carlo target needs an RNG")
            return scrooge_moment_mc(
                finite_n_rho(n_qubits, n_a, q0), k, mc_samples, rng, memory_budget
            )
        if p is None:
            raise ValueError(f"target {self.variant!r} needs a charge distribution")
        if self.variant == "gse":
            return gse_moment_exact(p, n_a, k, memory_budget)
        if self.variant == "gse-replica":
            return gse_moment_analytic(p, n_a, k, memory_budget)
        if self.variant == "gse-mc":
            if rng is None:
                raise ValueError("Monte Carlo target needs an RNG")
            return gse_moment_mc(p, n_a, k, mc_samples, rng, memory_budget)
        raise ValueError(f"unknown target variant {self.variant!r}")
