import itertools
import math

import numpy as np
import pytest

from projens.ensembles import replica_kron
from projens.metrics import trace_distance
from projens.sectors import (
    ChargeDistribution,
    alternating_excitation_probs,
    bath_charge_distribution,
    binomial,
    delta_distribution,
    equilibrium_distribution,
    posterior_charge_distribution,
    product_state_charge_distribution,
    sector_table,
)
from projens.targets import (
    TargetSpec,
    direct_sum_moment,
    finite_n_rho,
    gse_moment_analytic,
    gse_moment_exact,
    gse_moment_mc,
    gse_rho_bar,
    haar_moment,
    multinomial,
    scrooge_moment_exact,
    scrooge_moment_mc,
    scrooge_sample,
    scrooge_states,
    sector_haar_moment,
    symmetric_projector,
    type_vectors,
    type_weight_exact,
    type_weight_mc,
    type_weight_replica_x,
    type_weight_replica_z,
    xbasis_scrooge_rho,
)


def symmetric_projector_oracle(d, k):
    """Independent construction: orthonormalized symmetrized multiset vectors."""
    dim = d**k
    vecs = []
    for combo in itertools.combinations_with_replacement(range(d), k):
        v = np.zeros(dim)
        for perm in itertools.permutations(combo):
            idx = 0
            for digit in perm:
                idx = idx * d + digit
            v[idx] += 1.0
        vecs.append(v / np.linalg.norm(v))
    basis = np.array(vecs).T
    return basis @ basis.T


class TestSymmetricProjector:
    def test_k1_identity(self):
        assert np.allclose(symmetric_projector(5, 1), np.eye(5))

    def test_d2_k2_triplet(self):
        p = symmetric_projector(2, 2)
        assert np.trace(p) == pytest.approx(3.0)
        assert np.linalg.matrix_rank(p) == 3

    def test_d4_k3_trace(self):
        p = symmetric_projector(4, 3)
        assert np.trace(p) == pytest.approx(binomial(6, 3))
        assert np.abs(p @ p - p).max() < 1e-12

    @pytest.mark.parametrize("d,k", [(2, 2), (2, 3), (3, 2), (4, 2), (2, 4)])
    def test_against_multiset_oracle(self, d, k):
        assert np.abs(
            symmetric_projector(d, k) - symmetric_projector_oracle(d, k)
        ).max() < 1e-12

    def test_budget(self):
        with pytest.raises(MemoryError):
            symmetric_projector(16, 4)


class TestHaarMoment:
    def test_k1(self):
        assert np.allclose(haar_moment(4, 1).matrix, np.eye(4) / 4)

    def test_d2_k2(self):
        assert np.allclose(
            haar_moment(2, 2).matrix, symmetric_projector(2, 2) / 3, atol=1e-14
        )

    def test_monte_carlo_oracle(self):
        # Gaussian-normalized Haar states, 1e5 draws
        rng = np.random.default_rng(0)
        d, k, draws = 4, 2, 10**5
        g = rng.standard_normal((draws, d)) + 1j * rng.standard_normal((draws, d))
        g /= np.linalg.norm(g, axis=1)[:, None]
        phi = replica_kron(g, k)
        emp = phi.T @ phi.conj() / draws
        assert trace_distance(emp, haar_moment(d, k)) < 5 / math.sqrt(draws) * d


class TestSectorHaarMoment:
    def test_k1_half_filling(self):
        m = sector_haar_moment(2, 1, 1).matrix
        expected = np.zeros((4, 4))
        expected[1, 1] = expected[2, 2] = 0.5
        assert np.allclose(m, expected)

    def test_k2_permutation_sum_oracle(self):
        # embed the 2-dim sector projector by hand
        m = sector_haar_moment(2, 1, 2).matrix
        sec = [1, 2]
        idx = [a * 4 + b for a in sec for b in sec]
        inner = symmetric_projector_oracle(2, 2) / 3
        expected = np.zeros((16, 16))
        expected[np.ix_(idx, idx)] = inner
        assert np.abs(m - expected).max() < 1e-12

    def test_one_dimensional_sector(self):
        for k in (1, 2, 3):
            m = sector_haar_moment(2, 0, k).matrix
            assert m[0, 0] == pytest.approx(1.0)
            assert np.trace(m).real == pytest.approx(1.0)


class TestDirectSum:
    def test_small_case(self):
        m = direct_sum_moment(4, 2, 2, 1).matrix
        assert np.allclose(np.diagonal(m).real, [1 / 6, 1 / 3, 1 / 3, 1 / 6])

    def test_zero_charge(self):
        m = direct_sum_moment(6, 2, 0, 2).matrix
        assert m[0, 0] == pytest.approx(1.0)

    @pytest.mark.parametrize("q0,k", [(1, 1), (2, 2), (3, 2), (5, 1)])
    def test_unit_trace(self, q0, k):
        m = direct_sum_moment(6, 2, q0, k).matrix
        assert np.trace(m).real == pytest.approx(1.0, abs=1e-12)


class TestScrooge:
    def test_pure_rho_returns_that_state(self):
        rng = np.random.default_rng(1)
        v = np.array([0.6, 0.8j], dtype=complex)
        rho = np.outer(v, v.conj())
        psi = scrooge_sample(rho, rng)
        assert abs(abs(np.vdot(v, psi)) - 1.0) < 1e-12

    def test_identity_rho_first_moment(self):
        rng = np.random.default_rng(2)
        psi = scrooge_states(np.eye(4) / 4, 20000, rng)
        mean = psi.T @ psi.conj() / psi.shape[0]
        assert trace_distance(mean, np.eye(4) / 4) < 0.02

    def test_biased_rho_first_moment(self):
        rng = np.random.default_rng(3)
        rho = np.diag([0.9, 0.1]).astype(complex)
        psi = scrooge_states(rho, 10**5, rng)
        mean = psi.T @ psi.conj() / psi.shape[0]
        assert trace_distance(mean, rho) < 0.02

    def test_rejects_bad_inputs(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ValueError):
            scrooge_sample(np.diag([0.9, 0.3]), rng)  # trace != 1
        with pytest.raises(ValueError):
            scrooge_sample(np.array([[0.5, 0.5], [0.4, 0.5]]), rng)  # not Hermitian

    def test_mc_moment_identity_rho_matches_haar(self):
        rng = np.random.default_rng(5)
        d, m = 4, 10**4
        mom = scrooge_moment_mc(np.eye(d) / d, 2, m, rng)
        assert mom.samples == m
        assert trace_distance(mom, haar_moment(d, 2)) < 3 * d / math.sqrt(m)

    def test_mc_single_sample(self):
        rng = np.random.default_rng(6)
        mom = scrooge_moment_mc(np.diag([0.7, 0.3]).astype(complex), 2, 1, rng)
        eigs = np.linalg.eigvalsh(mom.matrix)
        assert np.trace(mom.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert eigs[-1] == pytest.approx(1.0, abs=1e-12)  # rank one


class TestScroogeExact:
    def test_identity_rho_is_haar(self):
        for d, k in ((2, 2), (4, 2), (4, 3), (2, 4)):
            mom = scrooge_moment_exact(np.eye(d) / d, k)
            assert trace_distance(mom, haar_moment(d, k)) < 1e-10

    def test_k1_is_rho(self):
        rho = np.diag([0.5, 0.3, 0.15, 0.05]).astype(complex)
        assert np.abs(scrooge_moment_exact(rho, 1).matrix - rho).max() < 1e-14

    def test_matches_mc(self):
        rng = np.random.default_rng(7)
        rho = np.diag([0.5, 0.25, 0.15, 0.1]).astype(complex)
        exact = scrooge_moment_exact(rho, 2)
        m = 2 * 10**5
        mc = scrooge_moment_mc(rho, 2, m, rng)
        assert trace_distance(exact, mc) < 3 * 4 / math.sqrt(m)

    def test_non_diagonal_rho(self):
        # unitary covariance: rotate a diagonal rho and compare
        rng = np.random.default_rng(8)
        from projens.simulator import haar_unitary

        u = haar_unitary(3, rng)
        lam = np.diag([0.6, 0.3, 0.1])
        exact_diag = scrooge_moment_exact(lam.astype(complex), 2).matrix
        exact_rot = scrooge_moment_exact(u @ lam @ u.conj().T, 2).matrix
        w = np.kron(u, u)
        assert np.abs(exact_rot - w @ exact_diag @ w.conj().T).max() < 1e-10

    def test_moment_invariants(self):
        rho = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
        for k in (2, 3):
            mat = scrooge_moment_exact(rho, k).matrix
            assert np.abs(mat - mat.conj().T).max() < 1e-12
            assert np.trace(mat).real == pytest.approx(1.0, abs=1e-10)
            assert np.linalg.eigvalsh(mat).min() > -1e-12
            p_sym = symmetric_projector(4, k)
            assert np.abs(p_sym @ mat @ p_sym - mat).max() < 1e-10


class TestGseRhoBar:
    def test_delta_gives_sector_mixed(self):
        p = delta_distribution(6, 3)
        rho = gse_rho_bar(p, 2, 1)  # Q_A must be 2
        table = sector_table(2)
        expected = np.zeros(4)
        expected[table.sectors[2]] = 1.0
        assert np.allclose(np.diagonal(rho).real, expected)

    def test_equilibrium_is_thermal_and_qb_independent(self):
        z, n, n_a = 1.8, 8, 2
        p = equilibrium_distribution(z, n)
        expected_diag = np.array(
            [z ** bin(i).count("1") for i in range(4)]
        )
        expected_diag /= expected_diag.sum()
        for q_b in range(n - n_a + 1):
            rho = gse_rho_bar(p, n_a, q_b)
            assert np.allclose(np.diagonal(rho).real, expected_diag, atol=1e-12)

    def test_generic_direct_bayes(self):
        n, n_a, q_b = 6, 2, 2
        p = product_state_charge_distribution(
            alternating_excitation_probs(6, np.pi / 20)
        )
        rho = gse_rho_bar(p, n_a, q_b)
        post = posterior_charge_distribution(p, n_a, q_b)
        table = sector_table(n_a)
        expected = np.zeros(4)
        for q_a in range(n_a + 1):
            sec = table.sectors[q_a]
            expected[sec] = post[q_a + q_b] / len(sec)
        assert np.allclose(np.diagonal(rho).real, expected, atol=1e-12)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)

    def test_zero_probability_qb_rejected(self):
        p = delta_distribution(6, 0)
        with pytest.raises(ValueError):
            gse_rho_bar(p, 2, 4)


class TestGseMoments:
    def test_mc_delta_matches_direct_sum(self):
        rng = np.random.default_rng(9)
        p = delta_distribution(8, 4)
        m = 10**4
        mom = gse_moment_mc(p, 2, 2, m, rng)
        assert trace_distance(mom, direct_sum_moment(8, 2, 4, 2)) < 3 * 4 / math.sqrt(m)

    def test_mc_equilibrium_matches_haar(self):
        rng = np.random.default_rng(10)
        p = equilibrium_distribution(1.0, 8)
        m = 10**4
        mom = gse_moment_mc(p, 2, 2, m, rng)
        assert trace_distance(mom, haar_moment(4, 2)) < 3 * 4 / math.sqrt(m)

    def test_exact_delta_equals_direct_sum(self):
        p = delta_distribution(8, 4)
        mom = gse_moment_exact(p, 2, 2)
        assert np.abs(mom.matrix - direct_sum_moment(8, 2, 4, 2).matrix).max() < 1e-10

    def test_exact_equilibrium_equals_haar(self):
        for n in (8, 12):
            p = equilibrium_distribution(1.0, n)
            mom = gse_moment_exact(p, 2, 2)
            assert trace_distance(mom, haar_moment(4, 2)) < 1e-10

    def test_exact_first_moment_is_mixture_of_rho_bars(self):
        p = product_state_charge_distribution(
            alternating_excitation_probs(8, np.pi / 20)
        )
        marg = bath_charge_distribution(p, 2)
        expected = sum(
            w * gse_rho_bar(p, 2, q_b) for q_b, w in enumerate(marg) if w > 0
        )
        assert np.abs(gse_moment_exact(p, 2, 1).matrix - expected).max() < 1e-12

    def test_exact_vs_mc_intermediate_theta(self):
        rng = np.random.default_rng(11)
        p = product_state_charge_distribution(
            alternating_excitation_probs(10, np.pi / 20)
        )
        m = 10**5
        mc = gse_moment_mc(p, 2, 2, m, rng)
        exact = gse_moment_exact(p, 2, 2)
        assert trace_distance(exact, mc) < 2 * 4 / math.sqrt(m)


class TestGseAnalytic:
    def test_delta_reduction_exact(self):
        for q0, k in ((4, 1), (4, 2), (3, 2), (4, 3)):
            p = delta_distribution(8, q0)
            got = gse_moment_analytic(p, 2, k)
            want = direct_sum_moment(8, 2, q0, k)
            assert np.abs(got.matrix - want.matrix).max() < 1e-10
            assert got.trace_defect < 1e-12

    def test_k1_is_mixture_of_rho_bars(self):
        p = product_state_charge_distribution(
            alternating_excitation_probs(8, np.pi / 20)
        )
        marg = bath_charge_distribution(p, 2)
        expected = sum(
            w * gse_rho_bar(p, 2, q_b) for q_b, w in enumerate(marg) if w > 0
        )
        assert np.abs(gse_moment_analytic(p, 2, 1).matrix - expected).max() < 1e-10

    def test_matches_own_sampling_recipe(self):
        # oracle: draw Q_B, then a Haar state per sector, superpose with
        # posterior amplitudes; the analytic form is this ensemble's moment
        rng = np.random.default_rng(12)
        n, n_a, k, draws = 8, 2, 2, 2 * 10**5
        p = product_state_charge_distribution(
            alternating_excitation_probs(n, np.pi / 20)
        )
        marg = bath_charge_distribution(p, n_a)
        table = sector_table(n_a)
        counts = rng.multinomial(draws, marg)
        acc = np.zeros((16, 16), dtype=complex)
        for q_b, count in enumerate(counts):
            if count == 0:
                continue
            post = posterior_charge_distribution(p, n_a, q_b)
            psi = np.zeros((count, 4), dtype=complex)
            for q_a in range(n_a + 1):
                q = q_a + q_b
                if q <= n and post[q] > 0:
                    sec = table.sectors[q_a]
                    g = rng.standard_normal((count, len(sec))) + 1j * rng.standard_normal(
                        (count, len(sec))
                    )
                    g /= np.linalg.norm(g, axis=1)[:, None]
                    psi[:, sec] = math.sqrt(post[q]) * g
            phi = replica_kron(psi, k)
            acc += phi.T @ phi.conj()
        acc /= draws
        assert trace_distance(gse_moment_analytic(p, n_a, k), acc) < 2 * 4 / math.sqrt(draws)

    def test_known_deviation_from_exact_gse_at_small_subsystem(self):
        # the type-sum form is a large-sector approximation; at N_A = 2 it
        # sits a few percent from the exact Scrooge-mixture moment
        p = product_state_charge_distribution(
            alternating_excitation_probs(10, np.pi / 20)
        )
        gap = trace_distance(gse_moment_analytic(p, 2, 2), gse_moment_exact(p, 2, 2))
        assert 0.02 < gap < 0.12

    def test_unit_trace_before_renormalization(self):
        p = equilibrium_distribution(1.3, 8)
        got = gse_moment_analytic(p, 2, 2)
        assert got.trace_defect < 1e-12


class TestXBasisRho:
    def test_small_case(self):
        rho = xbasis_scrooge_rho(4, 2, 2)
        assert np.allclose(np.diagonal(rho).real, [1 / 6, 1 / 3, 1 / 3, 1 / 6])

    def test_quarter_filling_numeric(self):
        rho = finite_n_rho(8, 2, 2)
        c = binomial(8, 2)
        expected = np.array(
            [binomial(6, 2 - bin(i).count("1")) / c for i in range(4)]
        )
        assert np.allclose(np.diagonal(rho).real, expected, atol=1e-12)

    def test_half_filling_near_identity(self):
        n, n_a = 40, 2
        rho = xbasis_scrooge_rho(n, n_a, n // 2)
        gap = np.abs(np.diagonal(rho).real - 0.25).max()
        assert gap < 0.25 * n_a / n * 2

    def test_asymptotics(self):
        # 2^{N_A} * entry -> 1 with O(1/N) corrections
        prev = None
        for n in (8, 16, 32, 64):
            rho = finite_n_rho(n, 2, n // 2)
            err = np.abs(4 * np.diagonal(rho).real - 1).max()
            if prev is not None:
                assert err < prev
            prev = err
        assert prev < 4 / 64

    def test_alias(self):
        assert np.array_equal(xbasis_scrooge_rho(8, 2, 4), finite_n_rho(8, 2, 4))

    def test_unit_trace(self):
        for q0 in (0, 2, 5):
            assert np.trace(xbasis_scrooge_rho(6, 2, q0)).real == pytest.approx(1.0)


class TestTypeWeights:
    def test_exact_vs_mc_small(self):
        rng = np.random.default_rng(13)
        p = delta_distribution(2, 1)
        exact = type_weight_exact(p, (1, 0), 1, 1)
        mc, se = type_weight_mc(p, (1, 0), 1, 1, 20000, rng)
        assert abs(mc - exact) < 4 * se

    def test_mc_trivial_cases(self):
        rng = np.random.default_rng(14)
        p = delta_distribution(4, 2)
        mean, se = type_weight_mc(p, (0, 0), 1, 0, 100, rng)
        assert mean == pytest.approx(1.0, abs=1e-12)
        # impossible subsystem charge: T selects Q_A = 0 while Q = Q_A + Q_B forces 2
        mean, _ = type_weight_mc(p, (1, 0), 0, 1, 100, rng)
        assert mean == pytest.approx(0.0, abs=1e-12)

    def test_exact_zero_outside_support(self):
        p = delta_distribution(4, 0)
        assert type_weight_exact(p, (0, 1), 2, 1) == 0.0

    def test_normalization_when_k_zero(self):
        # sum over bath strings of the n=1, T=0 weight is E[sum_z p(z)] = 1
        n, n_a = 6, 2
        p = product_state_charge_distribution(
            alternating_excitation_probs(n, np.pi / 8)
        )
        n_b = n - n_a
        total = sum(
            binomial(n_b, q_b) * type_weight_exact(p, (0,) * (n_a + 1), q_b, 1)
            for q_b in range(n_b + 1)
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_replica_z_delta_reduces_to_direct_sum_weights(self):
        n, n_a, q0, k = 6, 2, 3, 2
        p = delta_distribution(n, q0)
        n_b = n - n_a
        for q_b in range(n_b + 1):
            q_a = q0 - q_b
            if not 0 <= q_a <= n_a:
                continue
            t_vec = tuple(k if qa == q_a else 0 for qa in range(n_a + 1))
            got = type_weight_replica_z(p, t_vec, q_b)
            from projens.sectors import sector_prior

            want = sector_prior(n, n_a, q0)[q_a] / binomial(n_b, q_b)
            assert got == pytest.approx(want, abs=1e-12)

    def test_replica_z_reconstructs_analytic_moment(self):
        # resumming the replica weights over bath strings and types must
        # rebuild the type-sum moment (same algebra, independent path)
        n, n_a, k = 6, 2, 2
        p = product_state_charge_distribution(
            alternating_excitation_probs(n, np.pi / 8)
        )
        n_b = n - n_a
        d_a = 1 << n_a
        p_sym = symmetric_projector(d_a, k)
        acc = np.zeros((d_a**k, d_a**k), dtype=complex)
        for q_b in range(n_b + 1):
            for t_vec in type_vectors(k, n_a + 1):
                try:
                    w = type_weight_replica_z(p, t_vec, q_b)
                except ValueError:
                    continue
                if w == 0.0:
                    continue
                op = None
                for q_a, t in enumerate(t_vec):
                    if t == 0:
                        continue
                    block = sector_haar_moment(n_a, q_a, t).matrix
                    op = block if op is None else np.kron(op, block)
                acc += (
                    binomial(n_b, q_b)
                    * w
                    * float(multinomial(k, t_vec)) ** 2
                    * (p_sym @ op @ p_sym)
                )
        got = gse_moment_analytic(p, n_a, k).matrix
        assert np.abs(acc / np.trace(acc).real - got).max() < 1e-10

    def test_replica_x_single_sector_type_value(self):
        n, n_a, q0, k = 6, 2, 3, 2
        prior_1 = [
            binomial(n_a, qa) * binomial(n - n_a, q0 - qa) / binomial(n, q0)
            for qa in range(n_a + 1)
        ]
        for q_a in range(n_a + 1):
            t_vec = tuple(k if qa == q_a else 0 for qa in range(n_a + 1))
            got = type_weight_replica_x(n, n_a, q0, t_vec)
            assert got == pytest.approx(prior_1[q_a] ** k * 2.0 ** -(n - n_a))

    def test_replica_x_reconstructs_xbasis_scrooge_first_moment(self):
        # k=1 resummation over x outcomes gives the x-basis density matrix
        n, n_a, q0 = 6, 2, 3
        d_a = 1 << n_a
        acc = np.zeros((d_a, d_a), dtype=complex)
        n_b = n - n_a
        for t_vec in type_vectors(1, n_a + 1):
            w = type_weight_replica_x(n, n_a, q0, t_vec)
            q_a = t_vec.index(1)
            acc += (1 << n_b) * w * sector_haar_moment(n_a, q_a, 1).matrix
        assert np.abs(acc - xbasis_scrooge_rho(n, n_a, q0)).max() < 1e-12


class TestTypeVectors:
    def test_cardinality(self):
        for k, bins in ((2, 3), (3, 3), (4, 3), (2, 5)):
            assert len(type_vectors(k, bins)) == binomial(k + bins - 1, bins - 1)

    def test_sums(self):
        for t in type_vectors(3, 4):
            assert sum(t) == 3 and min(t) >= 0


class TestTargetSpec:
    def test_parse_and_labels(self):
        assert TargetSpec.parse("haar").variant == "haar"
        assert TargetSpec.parse("direct-sum:4").q0 == 4
        assert TargetSpec.parse("sector-haar:1").q_a == 1
        assert TargetSpec.parse("finite-n-scrooge").q0 is None
        with pytest.raises(ValueError):
            TargetSpec.parse("bogus")
        with pytest.raises(ValueError):
            TargetSpec.parse("sector-haar")

    def test_resolve_matrix_shapes(self):
        p = delta_distribution(6, 3)
        rng = np.random.default_rng(15)
        for text in ("haar", "direct-sum", "gse", "gse-replica", "finite-n-scrooge"):
            spec = TargetSpec.parse(text)
            mom = spec.resolve(6, 2, 2, p=p, default_q0=3, mc_samples=100, rng=rng)
            assert mom.matrix.shape == (16, 16)
            assert np.trace(mom.matrix).real == pytest.approx(1.0, abs=1e-10)

    def test_every_variant_satisfies_moment_invariants(self):
        p = product_state_charge_distribution(
            alternating_excitation_probs(6, np.pi / 8)
        )
        rng = np.random.default_rng(16)
        p_sym = symmetric_projector(4, 2)
        for text in (
            "haar",
            "sector-haar:1",
            "direct-sum:3",
            "gse",
            "gse-mc",
            "gse-replica",
            "finite-n-scrooge:3",
            "finite-n-scrooge-mc:3",
        ):
            spec = TargetSpec.parse(text)
            mom = spec.resolve(6, 2, 2, p=p, default_q0=3, mc_samples=2000, rng=rng)
            mat = mom.matrix
            assert np.abs(mat - mat.conj().T).max() < 1e-10
            assert np.linalg.eigvalsh(mat).min() > -1e-10
            assert np.trace(mat).real == pytest.approx(1.0, abs=1e-10)
            assert np.abs(p_sym @ mat @ p_sym - mat).max() < 1e-10
