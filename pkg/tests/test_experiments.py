import numpy as np
import pytest

from hodge_ntk import boundary_matrices, hodge_basis, new_complex
from hodge_ntk.errors import DegenerateSubspace
from hodge_ntk.experiments import (
    HodgeRecoveryConfig,
    SpectralConfig,
    StabilityConfig,
    TriangleCountConfig,
    run_hodge_recovery,
    run_spectral_diagnostic,
    run_stability,
    run_triangle_count,
    sample_hodge_signal,
    separation_test,
    theorem2_bound_check,
)
from hodge_ntk.rng import substream
from hodge_ntk.tables import rows_to_csv


class TestSampleHodgeSignal:
    def test_degenerate_subspace(self):
        hollow = new_complex(3, [(0, 1), (0, 2), (1, 2)])
        basis = hodge_basis(boundary_matrices(hollow))  # coexact empty
        with pytest.raises(DegenerateSubspace):
            sample_hodge_signal(basis, 0)

    def test_components_orthogonal_and_sum(self, full_decomposition_complex):
        _, basis = full_decomposition_complex
        s = sample_hodge_signal(basis, 3)
        assert np.isclose(np.linalg.norm(s.signal), 1.0, atol=1e-10)
        assert np.allclose(sum(s.components), s.signal, atol=1e-10)
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(s.components[i] @ s.components[j]) < 1e-10

    def test_mean_energy_fractions(self, full_decomposition_complex):
        _, basis = full_decomposition_complex
        rng = substream(0, "energy")
        fractions = np.zeros(3)
        n = 1000
        for _ in range(n):
            s = sample_hodge_signal(basis, rng)
            fractions += [np.linalg.norm(c) ** 2 for c in s.components]
        fractions /= n
        expected = np.array(basis.dims) / sum(basis.dims)
        # isotropic Gaussian energy split; 3 standard errors of a ratio
        assert np.all(np.abs(fractions - expected) < 4.0 / np.sqrt(n) + 0.02)


@pytest.fixture(scope="module")
def small_result():
    cfg = TriangleCountConfig(
        n=10, densities=(0.0, 0.5, 1.0), samples_per_density=40, repetitions=2
    )
    return run_triangle_count(cfg, seed=0)


class TestTriangleCount:
    def test_degenerate_densities_have_zero_rmse(self, small_result):
        for r in small_result.records:
            if r["q"] in (0.0, 1.0):
                assert r["test_rmse"] < 1e-8

    def test_lower_rows_constant(self, small_result):
        for r in small_result.records:
            if r["variant"] in ("lower", "graph"):
                assert r["gram_row_spread"] <= 1e-10

    def test_graph_alias_matches_lower(self, small_result):
        for rep in (0, 1):
            for q in (0.0, 0.5, 1.0):
                pair = {
                    r["variant"]: r["test_rmse"]
                    for r in small_result.records
                    if r["q"] == q and r["rep"] == rep and r["variant"] in ("lower", "graph")
                }
                assert pair["lower"] == pair["graph"]

    def test_upper_beats_lower_midrange(self, small_result):
        cell = {
            v: np.mean(
                [r["test_rmse"] for r in small_result.records
                 if r["q"] == 0.5 and r["variant"] == v]
            )
            for v in ("lower", "upper", "full")
        }
        assert cell["upper"] < cell["lower"]
        assert cell["full"] < cell["lower"]

    def test_rows_and_determinism(self, small_result):
        rows = small_result.rows()
        csv_a = rows_to_csv(rows)
        cfg = small_result.config
        again = run_triangle_count(cfg, seed=0)
        assert rows_to_csv(again.rows()) == csv_a
        assert {"q", "variant", "metric", "value", "stderr"} <= set(rows[0])


class TestHodgeRecovery:
    def test_small_run_orderings(self):
        cfg = HodgeRecoveryConfig(n=14, n_train=60, n_test=30, seeds=2)
        res = run_hodge_recovery(cfg, seed=0)
        assert res.mean_rmse("lower", "exact") < res.mean_rmse("upper", "exact")
        assert res.mean_rmse("upper", "coexact") < res.mean_rmse("lower", "coexact")
        rows = res.rows()
        assert len(rows) == 9  # 3 variants x 3 components


class TestSpectralDiagnostic:
    def test_small_run(self):
        res = run_spectral_diagnostic(SpectralConfig(n=16), seed=0)
        rows = res.mode_rows
        assert all(r["decay_residual"] <= 1e-8 for r in rows)
        eigs = [r["eigenvalue"] for r in rows]
        assert all(a >= b for a, b in zip(eigs, eigs[1:]))
        kmax = max(eigs)
        assert min(eigs) >= -1e-8 * kmax
        energies = [r["e_exact"] + r["e_harmonic"] + r["e_coexact"] for r in rows]
        assert np.allclose(energies, 1.0, atol=1e-8)


@pytest.fixture(scope="module")
def records():
    cfg = StabilityConfig(
        n=16, eps_grid=(0.0, 0.1, 0.3), lambdas=(1e-3, 1e-1),
        perturbations_per_run=2, runs=2,
    )
    return run_stability(cfg, seed=0)


class TestStability:
    def test_eps_zero_exact_zero(self, records):
        for r in records:
            if r.eps == 0.0:
                assert r.delta_K == 0.0 and r.delta_L == 0.0 and r.delta_y == 0.0

    def test_deltas_nonnegative_and_consistent(self, records):
        for r in records:
            assert r.delta_K >= 0 and r.delta_L >= 0 and r.delta_y >= 0
            if r.delta_L == 0.0:
                assert r.delta_K == 0.0 and r.delta_y == 0.0

    def test_b2_bound_every_record(self, records):
        for r in records:
            assert r.delta_L_op <= r.b2_norm_sum_op * r.delta_b2_op + 1e-9
            assert r.delta_L <= r.b2_norm_sum_fro * r.delta_b2_fro + 1e-9

    def test_bound_report(self, records):
        rep = theorem2_bound_check(records)
        assert np.isfinite(rep.c_k_hat) and np.isfinite(rep.c_pred_hat)
        assert rep.b2_bound_ok_op and rep.b2_bound_ok_fro
        assert len(rep.rows()) >= 7


class TestBetaZeroStability:
    def test_lower_variant_kernels_identical_under_flips(self):
        # Prop-1 invariance direction: beta = 0 makes Delta_K exactly 0
        from hodge_ntk import architecture_operator, flip_triangles, er_clique_complex
        from hodge_ntk.ntk import ActivationKind, KernelConfig, KernelVariant

        sc = er_clique_complex(10, 0.6, 0.5, 1)
        cfg = KernelConfig(
            activation=ActivationKind.RELU, variant=KernelVariant.LOWER,
            normalize_propagator=True, trace_normalize=False,
        )
        k = architecture_operator(sc, cfg)
        for s in range(3):
            other = flip_triangles(sc, 0.5, s)
            assert np.array_equal(architecture_operator(other, cfg), k)


@pytest.fixture(scope="module")
def report():
    return separation_test(seed=0, n_pairs=12)


class TestSeparation:
    def test_witness_pair(self, report):
        witness = [r for r in report.rows if r["kind"] == "witness"][0]
        assert witness["rel_frob_linear"] > 1e-6
        assert witness["pooled_diff"] != 0.0

    def test_all_pairs_separate(self, report):
        assert report.all_beta_zero_equal
        assert report.min_relative_difference > 1e-6

    def test_cancellations_logged_not_failed(self, report):
        for r in report.rows:
            assert r["pooled_cancelled"] in (0, 1)
