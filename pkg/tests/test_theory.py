import math

import numpy as np
import pytest
from scipy import sparse

from igt_lab.graph_ops import complete_graph, edgeless_graph, normalize_adjacency
from igt_lab.igt import IgtConfig, IgtModel, eigt_forward, igt_forward, init_isometries
from igt_lab.sbm import CommunityFeatureSpec, SbmSpec, sample_features, sample_sbm
from igt_lab.theory import (
    BoundReport,
    ConcentrationPoint,
    check_bounded_orders,
    check_corollary_scaling,
    check_deterministic_blocks,
    check_eigt_analytic,
    check_energy_split,
    check_lipschitz_pairs,
    check_operator_concentration,
    check_sbm_concentration,
    check_tail_decay,
    check_tree_bound,
    check_variance_bound,
    clique_union_graph,
    equality_case_reports,
    erdos_renyi,
    reports_to_csv,
    run_energy_split_sweep,
    suite_counts,
)


def random_model(input_dim, rank, order, smoothing, seed=0):
    cfg = IgtConfig(smoothing, order, rank, seed=seed)
    return IgtModel(cfg, init_isometries(cfg, input_dim))


class TestEnergySplit:
    def test_idempotent_equality_edgeless(self, rng):
        a = normalize_adjacency(edgeless_graph(9))
        rep = check_energy_split(a, rng.standard_normal((9, 2)), 3)
        assert rep.satisfied and abs(rep.margin) <= 1e-9

    def test_idempotent_equality_complete(self, rng):
        a = normalize_adjacency(complete_graph(15))
        rep = check_energy_split(a, rng.standard_normal((15, 2)), 1)
        assert rep.satisfied and abs(rep.margin) <= 1e-9

    def test_diagonal_contraction_exact_half(self, rng):
        a = sparse.csr_array(0.5 * sparse.eye_array(8))
        x = rng.standard_normal((8, 3))
        rep = check_energy_split(a, x, 1)
        assert rep.lhs == pytest.approx(0.5 * rep.rhs, rel=1e-12)

    def test_clique_union_is_projector(self, rng):
        a = normalize_adjacency(clique_union_graph([4, 1, 6, 3]))
        for j in (1, 2, 3, 4):
            rep = check_energy_split(a, rng.standard_normal((14, 2)), j)
            assert rep.satisfied and abs(rep.margin) <= 1e-9

    def test_sweep_all_satisfied(self):
        reports = run_energy_split_sweep(300, seed=5)
        assert len(reports) == 300
        assert all(r.satisfied for r in reports)

    def test_faulty_operator_caught(self):
        reports = run_energy_split_sweep(100, seed=5, operator_scale=1.5)
        assert any(not r.satisfied for r in reports)

    def test_equality_cases(self):
        assert all(r.satisfied for r in equality_case_reports())


class TestLipschitz:
    def test_identical_pair_is_zero(self, rng):
        a = normalize_adjacency(erdos_renyi(40, 0.2, 3))
        model = random_model(3, 2, 2, 1)
        x = rng.standard_normal((40, 3))
        sx = igt_forward(model, x, a).combined
        assert np.linalg.norm(sx - sx) == 0.0

    def test_pairs_bounded(self):
        a = normalize_adjacency(erdos_renyi(60, 0.15, 4))
        model = random_model(4, 2, 3, 2, seed=1)
        rep = check_lipschitz_pairs(model, a, pairs=20, seed=2, input_dim=4)
        assert rep.satisfied and rep.lhs <= 1.0 + 1e-9


class TestTreeBound:
    def _setup(self, seed, n=200, zero_std=False):
        n1 = n2 = n // 2
        spec = CommunityFeatureSpec(
            3,
            mean1=0.0,
            mean2=0.5,
            std1=0.0 if zero_std else 1.0,
            std2=0.0 if zero_std else 1.5,
        )
        model = random_model(3, 2, 2, 1, seed=seed)
        eigt = eigt_forward(model, spec, 5000, seed + 1)
        g = sample_sbm(SbmSpec(n1, n2, math.log(n) / n, 0.0, seed + 2))
        a = normalize_adjacency(g)
        x = sample_features(spec, n1, n2, seed + 3)
        return model, x, a, eigt, (n1, n2)

    def test_sbm_trials_satisfied(self):
        for seed in range(8):
            model, x, a, eigt, comm = self._setup(seed)
            rep = check_tree_bound(model, x, a, eigt, comm)
            assert rep.satisfied, (rep.lhs, rep.rhs)

    def test_degenerate_distribution_near_zero_lhs(self):
        # zero-variance rows on complete blocks: exact averaging per block
        n1 = n2 = 20
        spec = CommunityFeatureSpec(2, mean1=1.0, mean2=-2.0, std1=0.0, std2=0.0)
        model = random_model(2, 2, 2, 1, seed=0)
        eigt = eigt_forward(model, spec, 500, seed=1)
        a = normalize_adjacency(clique_union_graph([n1, n2]))
        x = sample_features(spec, n1, n2, 2)
        rep = check_tree_bound(model, x, a, eigt, (n1, n2))
        assert rep.satisfied
        assert rep.lhs <= 0.5  # self-loop correction only

    def test_order_zero_sqrt2_margin(self, rng):
        n1 = n2 = 30
        spec = CommunityFeatureSpec(2, mean2=1.0)
        model = random_model(2, 2, 0, 1, seed=3)
        eigt = eigt_forward(model, spec, 2000, seed=4)
        a = normalize_adjacency(erdos_renyi(60, 0.15, 5))
        x = sample_features(spec, n1, n2, 6)
        rep = check_tree_bound(model, x, a, eigt, (n1, n2))
        assert rep.rhs == pytest.approx(math.sqrt(2) * rep.lhs, rel=1e-12)

    def test_community_size_mismatch(self, rng):
        model, x, a, eigt, comm = self._setup(0, n=100)
        with pytest.raises(ValueError):
            check_tree_bound(model, x, a, eigt, (10, 10))

    def test_monte_carlo_consistency(self):
        # richer mean estimates move both sides by less than 3 combined SEs
        model, x, a, eigt_small, comm = self._setup(1, n=200)
        spec = CommunityFeatureSpec(3, mean1=0.0, mean2=0.5, std1=1.0, std2=1.5)
        eigt_big = eigt_forward(model, spec, 40_000, 99)
        rep_small = check_tree_bound(model, x, a, eigt_small, comm)
        rep_big = check_tree_bound(model, x, a, eigt_big, comm)
        tol = rep_small.rhs - rep_small.lhs + rep_big.rhs - rep_big.lhs
        assert abs(rep_small.lhs - rep_big.lhs) <= tol
        se_band = 3 * sum(
            math.sqrt(
                comm[0] * float(np.sum(e.stderrs[0][m] ** 2))
                + comm[1] * float(np.sum(e.stderrs[1][m] ** 2))
            )
            for e in (eigt_small, eigt_big)
            for m in range(3)
        ) * (math.sqrt(2) + 1)
        assert abs(rep_small.rhs - rep_big.rhs) <= se_band


class TestCorollaryScaling:
    def test_order_zero_factor_four(self):
        reports = check_corollary_scaling(
            [0],
            SbmSpec(100, 100, 0.03, 0.0, 0),
            CommunityFeatureSpec(2, mean2=0.5),
            trials=5,
            seed=1,
        )
        assert reports[0].rhs >= 4.0 * reports[0].lhs * (1 - 1e-12)

    def test_constant_rows_on_projector_graphs(self):
        # deterministic rows, disconnected complete blocks: the operator
        # averages each community exactly and the deviation collapses
        spec = CommunityFeatureSpec(2, mean1=0.7, mean2=-0.3, std1=0.0, std2=0.0)
        reports = check_corollary_scaling(
            [0, 1], SbmSpec(30, 30, 1.0, 0.0, 0), spec, trials=3, seed=2
        )
        for rep in reports:
            assert rep.satisfied
            assert rep.lhs <= 1e-9

    def test_sbm_family_satisfied(self):
        reports = check_corollary_scaling(
            [1, 2, 3],
            SbmSpec(150, 150, math.log(300) / 300, 0.0, 7),
            CommunityFeatureSpec(2, mean2=0.5, std2=1.5),
            trials=5,
            seed=3,
        )
        assert all(r.satisfied for r in reports)


class TestVarianceBound:
    def test_zero_variance(self):
        n = 60
        a = normalize_adjacency(complete_graph(n))
        spec = CommunityFeatureSpec(2, mean1=0.5, mean2=0.5, std1=0.0, std2=0.0)
        model = random_model(2, 2, 2, 1, seed=0)
        rep = check_variance_bound(a, spec, model, 5, (n // 2, n - n // 2), seed=1)
        assert rep.satisfied and rep.lhs <= 1e-18 and rep.rhs == 0.0

    def test_gaussian_within_two_sigma_sq(self):
        n = 200
        a = normalize_adjacency(complete_graph(n))
        spec = CommunityFeatureSpec(1, std1=1.0, std2=1.0)
        model = random_model(1, 1, 2, 1, seed=2)
        rep = check_variance_bound(a, spec, model, 25, (n // 2, n - n // 2), seed=3)
        assert rep.satisfied
        assert rep.rhs == pytest.approx(2.0 * n, abs=1e-9)

    def test_sigma_doubling_quadruples(self):
        n = 150
        a = normalize_adjacency(complete_graph(n))
        model = random_model(1, 1, 2, 1, seed=4)
        reps = []
        for s in (1.0, 2.0):
            spec = CommunityFeatureSpec(1, std1=s, std2=s)
            reps.append(
                check_variance_bound(a, spec, model, 20, (n // 2, n - n // 2), seed=5)
            )
        ratio = reps[1].lhs / reps[0].lhs
        assert abs(ratio - 4.0) <= 0.8

    def test_non_ergodic_operator_rejected(self):
        # an irregular graph breaks E[A_J X] = EX for nonzero means
        n = 100
        a = normalize_adjacency(erdos_renyi(n, 0.08, 6))
        spec = CommunityFeatureSpec(1, mean1=1.0, mean2=1.0, std1=0.2, std2=0.2)
        model = random_model(1, 1, 1, 1, seed=7)
        with pytest.raises(ValueError, match="ergodicity premise"):
            check_variance_bound(a, spec, model, 20, (n // 2, n - n // 2), seed=8)


class TestTrendChecks:
    def test_operator_concentration_band(self):
        reports = check_operator_concentration([300, 600], trials=4, seed=0)
        assert all(r.satisfied for r in reports)
        band = [r for r in reports if r.name == "operator_concentration_band"]
        assert len(band) == 1

    def test_sbm_concentration_structure(self):
        identical = CommunityFeatureSpec(2)
        distinct = CommunityFeatureSpec(2, mean2=3.0, std1=0.5, std2=0.5)
        grid = [
            ConcentrationPoint(300, 0.0, identical, "decay"),
            ConcentrationPoint(600, 0.0, identical, "decay"),
            ConcentrationPoint(400, 0.0, distinct, "sweep"),
            ConcentrationPoint(400, 0.1, distinct, "sweep"),
            ConcentrationPoint(400, 0.3, distinct, "sweep"),
        ]
        reports = check_sbm_concentration(grid, trials=6, seed=1)
        names = {r.name for r in reports}
        assert "sbm_concentration_decay" in names
        assert "sbm_concentration_c1_band" in names
        assert "sbm_concentration_tau_trend" in names
        assert all(r.satisfied for r in reports)

    def test_deterministic_blocks(self):
        rep = check_deterministic_blocks()
        assert rep.satisfied and rep.lhs <= rep.rhs


class TestNodeLevelChecks:
    def test_eigt_analytic(self):
        rep = check_eigt_analytic(draws=50_000, seed=0)
        assert rep.satisfied

    def test_bounded_orders(self):
        rep = check_bounded_orders(draws=30, max_order=4, seed=0)
        assert rep.satisfied and rep.lhs <= 1.0

    def test_tail_decay_negative_slope(self):
        rep = check_tail_decay(draws=10_000, order=2, seed=0)
        assert rep.satisfied and rep.lhs < 0


class TestReporting:
    def test_report_construction(self):
        rep = BoundReport.from_sides("x", 1.0, 2.0, n=5, seed=3)
        assert rep.satisfied and rep.margin == 1.0

    def test_violation_detected(self):
        rep = BoundReport.from_sides("x", 2.0, 1.0)
        assert not rep.satisfied

    def test_csv_format(self, tmp_path):
        reports = [
            BoundReport.from_sides("alpha", 1.0, 2.0, n=10, p=0.5, tau=0.0, N=2, J=1, seed=7),
            BoundReport.from_sides("beta", 3.0, 1.0),
        ]
        path = tmp_path / "reports.csv"
        reports_to_csv(reports, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "name,n,p,tau,N,J,seed,lhs,rhs,margin,satisfied"
        assert lines[1].startswith("alpha,10,0.5,0,2,1,7,")
        assert lines[1].endswith("true")
        assert lines[2].endswith("false")

    def test_suite_counts_scaling(self):
        full = suite_counts(None)
        smoke = suite_counts(1)
        assert full["energy_triples"] == 1000
        assert smoke["energy_triples"] == 50
        assert smoke["eigt_draws"] >= 100


class TestDefaultSuite:
    def test_every_report_satisfied(self):
        from igt_lab.theory import default_suite

        reports = default_suite(trials=3, seed=0)
        violated = [r for r in reports if not r.satisfied]
        # a violation is a failure with the full trial metadata dumped
        assert not violated, [(r.name, r.lhs, r.rhs, r.meta) for r in violated]

    def test_injected_fault_violates(self):
        from igt_lab.theory import default_suite

        reports = default_suite(trials=1, seed=0, inject_fault=True)
        assert any(not r.satisfied for r in reports if r.name == "energy_split")
