"""Experiment orchestration: configs, realization sweeps, and verification runs.

Seeding scheme: every random draw derives from the master seed through a
numpy SeedSequence with a namespaced spawn key -- (0, realization) for
initial-state draws, (1, realization, t) for the gates of step t,
(2, index) for Monte Carlo target construction, (3,) for replica
verification -- so realizations are independent streams and results do not
depend on execution order or worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .ensembles import DEFAULT_MOMENT_BUDGET, moment, project
from .metrics import default_plateau_window, exponential_fit, power_fit, trace_distance
from .records import ResultRecord, SweepRecord, fingerprint_of
from .sectors import ChargeDistribution, binomial, delta_distribution
from .simulator import (
    brickwork_step,
    charge_distribution_of_state,
    haar_random_sector_state,
    prepare_bitstring_state,
    prepare_theta_state,
)
from .targets import (
    TargetSpec,
    direct_sum_moment,
    type_vectors,
    type_weight_exact,
    type_weight_mc_batch,
)

__all__ = [
    "ExperimentConfig",
    "run_experiment",
    "run_scaling_sweep",
    "verify_theorem1",
    "verify_replica",
    "initial_state_rng",
    "step_rng",
    "target_rng",
]

_NS_INITIAL, _NS_STEP, _NS_TARGET, _NS_REPLICA = 0, 1, 2, 3


def initial_state_rng(seed: int, realization: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_NS_INITIAL, realization))
    )


def step_rng(seed: int, realization: int, t: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_NS_STEP, realization, t))
    )


def target_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_NS_TARGET, index))
    )


@dataclass
class ExperimentConfig:
    """Full description of one run.

    initial: "theta:<radians>" | "bits:<pattern>" | "haar-sector:<Q0>"
    basis:   "z" | "x" | "axes:theta,phi;..." (one pair per bath qubit)
    targets: target strings understood by TargetSpec.parse; the first one
             is the primary target for plateaus and fits.
    """

    n: int
    n_a: int = 2
    k: int = 2
    initial: str = "theta:0"
    basis: str = "z"
    targets: tuple = ("haar",)
    t_max: int | None = None  # defaults to 4N
    realizations: int = 32
    seed: int = 0
    plateau_window: tuple | None = None  # defaults to the last third
    mc_samples: int = 10**6
    memory_budget: int = DEFAULT_MOMENT_BUDGET
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.targets, str):
            self.targets = (self.targets,)
        self.targets = tuple(self.targets)
        if self.plateau_window is not None:
            self.plateau_window = tuple(int(v) for v in self.plateau_window)
        for spec in self.targets:
            TargetSpec.parse(spec)
        if self.n_a >= self.n:
            raise ValueError("need N_A < N")
        if (1 << self.n_a) ** self.k > self.memory_budget:
            raise ValueError("replica dimension exceeds the memory budget")

    @property
    def effective_t_max(self) -> int:
        return 4 * self.n if self.t_max is None else self.t_max

    def to_dict(self) -> dict:
        d = asdict(self)
        d["targets"] = list(self.targets)
        if self.plateau_window is not None:
            d["plateau_window"] = list(self.plateau_window)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "targets" in d:
            d["targets"] = tuple(d["targets"])
        if d.get("plateau_window") is not None:
            d["plateau_window"] = tuple(d["plateau_window"])
        return cls(**d)


def parse_basis(basis: str, n_b: int):
    """Translate a config basis string into a project() basis argument."""
    if basis in ("z", "x"):
        return basis
    if basis.startswith("axes:"):
        pairs = [chunk.split(",") for chunk in basis[5:].split(";") if chunk]
        axes = np.array([[float(a), float(b)] for a, b in pairs])
        if axes.shape != (n_b, 2):
            raise ValueError(f"basis lists {axes.shape[0]} axes, bath has {n_b} qubits")
        return axes
    raise ValueError(f"unknown basis {basis!r}")


def format_axes(axes) -> str:
    return "axes:" + ";".join(f"{t:.12g},{p:.12g}" for t, p in np.atleast_2d(axes))


def _parse_initial(config: ExperimentConfig):
    """Return (maker(realization) -> StateVector, charge distribution, Q0 or None)."""
    kind, _, arg = config.initial.partition(":")
    if kind == "theta":
        state = prepare_theta_state(config.n, float(arg))
        p = charge_distribution_of_state(state)
        q0 = config.n // 2 if float(arg) == 0.0 else None
        return (lambda r: state.copy()), p, q0
    if kind == "bits":
        pattern = arg * (config.n // len(arg)) if len(arg) < config.n else arg
        if len(pattern) != config.n:
            raise ValueError(f"pattern {arg!r} does not tile {config.n} qubits")
        state = prepare_bitstring_state(pattern)
        q0 = pattern.count("1")
        return (lambda r: state.copy()), delta_distribution(config.n, q0), q0
    if kind == "haar-sector":
        q0 = int(arg)
        maker = lambda r: haar_random_sector_state(
            config.n, q0, initial_state_rng(config.seed, r)
        )
        return maker, delta_distribution(config.n, q0), q0
    raise ValueError(f"unknown initial state {config.initial!r}")


def resolve_targets(config: ExperimentConfig, p: ChargeDistribution, q0) -> dict:
    """Resolve every configured target moment once; keyed by target string."""
    resolved = {}
    for index, spec_text in enumerate(config.targets):
        spec = TargetSpec.parse(spec_text)
        resolved[spec_text] = spec.resolve(
            config.n,
            config.n_a,
            config.k,
            p=p,
            default_q0=q0,
            mc_samples=config.mc_samples,
            rng=target_rng(config.seed, index),
            memory_budget=config.memory_budget,
        )
    return resolved


def _one_realization(config: ExperimentConfig, targets: dict, maker, r: int):
    """Distance series for one realization: array (n_targets, t_max+1)."""
    state = maker(r)
    basis = parse_basis(config.basis, config.n - config.n_a)
    labels = list(targets)
    out = np.empty((len(labels), config.effective_t_max + 1))
    for t in range(config.effective_t_max + 1):
        if t > 0:
            brickwork_step(state, step_rng(config.seed, r, t))
        mom = moment(
            project(state, config.n_a, basis), config.k, config.memory_budget
        )
        for ti, label in enumerate(labels):
            out[ti, t] = trace_distance(mom, targets[label])
    return out


def _realization_job(args):
    config_dict, target_items, r = args
    config = ExperimentConfig.from_dict(config_dict)
    maker, _, _ = _parse_initial(config)
    try:
        return r, _one_realization(config, dict(target_items), maker, r), None
    except Exception as exc:  # recorded by the caller's failure policy
        return r, None, f"{type(exc).__name__}: {exc}"


def run_experiment(config: ExperimentConfig) -> ResultRecord:
    """Evolve, project, and measure distances to every configured target.

    Realizations are independent streams; aggregation happens after the
    per-realization distance computation, in realization-index order.
    A run aborts if more than 10% of realizations fail.
    """
    maker, p, q0 = _parse_initial(config)
    targets = resolve_targets(config, p, q0)
    times = np.arange(config.effective_t_max + 1)
    deltas = {
        label: np.full((config.realizations, len(times)), np.nan) for label in targets
    }
    failures = []

    def store(r, series):
        for ti, label in enumerate(targets):
            deltas[label][r] = series[ti]

    if config.workers > 1:
        jobs = [
            (config.to_dict(), tuple(targets.items()), r)
            for r in range(config.realizations)
        ]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for r, series, error in pool.map(_realization_job, jobs):
                if error is None:
                    store(r, series)
                else:
                    failures.append([r, error])
    else:
        for r in range(config.realizations):
            try:
                store(r, _one_realization(config, targets, maker, r))
            except Exception as exc:  # recorded and re-checked below
                failures.append([r, f"{type(exc).__name__}: {exc}"])
    if failures:
        if len(failures) > 0.1 * config.realizations:
            raise RuntimeError(
                f"{len(failures)} of {config.realizations} realizations failed: {failures}"
            )
        failed = {r for r, _ in failures}
        keep = [r for r in range(config.realizations) if r not in failed]
        for label in deltas:
            deltas[label] = deltas[label][keep]
    window = config.plateau_window or default_plateau_window(times)
    return ResultRecord(
        config_dict=config.to_dict(),
        fingerprint=fingerprint_of(config.to_dict()),
        times=times,
        deltas=deltas,
        plateau_window=window,
        failures=failures,
    )


def run_scaling_sweep(
    base_config: ExperimentConfig, n_values, fit_kind: str = "exponential"
) -> SweepRecord:
    """Run per-N experiments and fit the plateau scaling across N.

    fit_kind "exponential" fits plateau ~ 2^(-rate N); "power" fits
    plateau ~ N^exponent.  A single-N sweep reports plateaus only.
    """
    n_values = list(n_values)
    records = []
    for n in n_values:
        config = replace(base_config, n=n)
        records.append(run_experiment(config))
    fits = {}
    for label in records[0].targets:
        plateaus = [rec.plateau(label)[0] for rec in records]
        entry = {"plateaus": plateaus}
        if len(n_values) < 2:
            entry["degenerate"] = True
        elif fit_kind == "exponential":
            rate, prefactor, resid = exponential_fit(n_values, plateaus)
            entry.update(rate=rate, prefactor=prefactor, residual=resid)
        elif fit_kind == "power":
            exponent, prefactor, resid = power_fit(n_values, plateaus)
            entry.update(exponent=exponent, prefactor=prefactor, residual=resid)
        else:
            raise ValueError(f"unknown fit kind {fit_kind!r}")
        fits[label] = entry
    return SweepRecord(
        base_config_dict=base_config.to_dict(),
        fingerprint=fingerprint_of(base_config.to_dict()),
        n_values=n_values,
        records=records,
        fit_kind=fit_kind,
        fits=fits,
    )


def verify_theorem1(
    n: int, n_a: int, q0: int, k: int, samples: int, rng: np.random.Generator
) -> dict:
    """Distance statistics of projected ensembles of random sector states.

    Draws Haar-random definite-charge states (no circuit), measures the
    z-basis distance of their k-th projected moment to the direct-sum
    target, and reports the scale against the concentration heuristic
    C(N, Q0)^(-1/2).
    """
    target = direct_sum_moment(n, n_a, q0, k)
    dists = np.empty(samples)
    for i in range(samples):
        state = haar_random_sector_state(n, q0, rng)
        if n_a == 0:
            dists[i] = 0.0
            continue
        dists[i] = trace_distance(moment(project(state, n_a, "z"), k), target)
    scale = 1.0 / math.sqrt(binomial(n, q0))
    return {
        "n": n,
        "n_a": n_a,
        "q0": q0,
        "k": k,
        "samples": samples,
        "mean": float(dists.mean()),
        "max": float(dists.max()),
        "std": float(dists.std()),
        "sector_scale": scale,
        "mean_over_scale": float(dists.mean() / scale),
    }


def verify_replica(
    p_by_n: dict | None = None,
    max_n_a: int = 2,
    max_replica: int = 2,
    max_k: int = 2,
    samples: int = 10**5,
    seed: int = 0,
    z_threshold: float = 4.0,
) -> dict:
    """Cross-check the exact type weights against their Monte Carlo oracle.

    Tabulates every cell (N, N_A <= max_n_a, n <= max_replica, k <= max_k,
    type vector, reachable bath charge) and its z-score; the report fails
    if any |z| exceeds z_threshold.  p_by_n maps system sizes to charge
    distributions (defaults to a weakly fluctuating product profile on
    N = 4 and 6).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if p_by_n is None:
        from .sectors import alternating_excitation_probs, product_state_charge_distribution

        p_by_n = {
            n: product_state_charge_distribution(
                alternating_excitation_probs(n, math.pi / 8)
            )
            for n in (4, 6)
        }
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(_NS_REPLICA,))
    )
    rows = []
    for n, p in sorted(p_by_n.items()):
        for n_a in range(1, max_n_a + 1):
            n_b = n - n_a
            cells = [
                (t_vec, nn)
                for k in range(1, max_k + 1)
                for t_vec in type_vectors(k, n_a + 1)
                for nn in range(1, max_replica + 1)
            ]
            for q_b in range(n_b + 1):
                results = type_weight_mc_batch(p, n_a, q_b, cells, samples, rng)
                for (t_vec, nn), (mc_mean, mc_se) in zip(cells, results):
                    exact = type_weight_exact(p, t_vec, q_b, nn)
                    z = (mc_mean - exact) / mc_se if mc_se > 0 else 0.0
                    rows.append(
                        {
                            "n": n,
                            "n_a": n_a,
                            "q_b": q_b,
                            "t_vec": list(t_vec),
                            "replica_n": nn,
                            "exact": exact,
                            "mc": mc_mean,
                            "mc_se": mc_se,
                            "z": z,
                        }
                    )
    worst = max(abs(row["z"]) for row in rows)
    return {"rows": rows, "worst_z": worst, "passed": worst <= z_threshold}
