"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Criteria 1-10 form the dataset-free property suite; 11 is the scaled
synthetic reproduction; 12-13 need converted citation datasets under
``datasets/`` (or $IGT_LAB_DATA) and skip when absent; 14 belongs to the
converter and is likewise dataset-gated.

Criterion 11's middle clause (order-0 accuracy within 50 +/- 10 across the
sweep) is expected to fail: the order-0 feature provably carries more signal
than that at large spread gaps (the population-optimal threshold classifier
reaches 0.60-0.77 on it), so a correctly trained head cannot stay below 60.
The test asserts the criterion as written and is marked strict-xfail; see
the decisions ledger for the full analysis.
"""

import csv
import math
import os

import numpy as np
import pytest

from igt_lab.classify import (
    _init_stack,
    gcn_loss_and_grads,
    linear_loss_and_grads,
    mlp_loss_and_grads,
)
from igt_lab.datasets import load_dataset
from igt_lab.experiments import RunConfig, cmd_ablate, cmd_bench, cmd_random_w, cmd_synth
from igt_lab.graph_ops import normalize_adjacency
from igt_lab.igt import IgtConfig, IgtModel, eigt_forward, igt_forward, init_isometries
from igt_lab.numerics import frobenius_norm
from igt_lab.sbm import CommunityFeatureSpec, SbmSpec, sample_features, sample_sbm
from igt_lab.theory import (
    check_bounded_orders,
    check_corollary_scaling,
    check_eigt_analytic,
    check_operator_concentration,
    check_tree_bound,
    check_variance_bound,
    equality_case_reports,
    erdos_renyi,
    run_energy_split_sweep,
)

DATA_ROOT = os.environ.get(
    "IGT_LAB_DATA", os.path.join(os.path.dirname(__file__), "..", "datasets")
)


def report(number, ok, detail):
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def dataset_or_skip(name):
    path = os.path.join(DATA_ROOT, name)
    if not os.path.exists(os.path.join(path, "graph.txt")):
        pytest.skip(f"dataset {name!r} not converted (expected at {path})")
    return path


def _random_model(input_dim, rank, order, smoothing, seed=0):
    cfg = IgtConfig(smoothing, order, rank, seed=seed)
    return IgtModel(cfg, init_isometries(cfg, input_dim))


def test_criterion_1_energy_split():
    reports = run_energy_split_sweep(1000, seed=2024)
    fails = [r for r in reports if not r.satisfied]
    eq = equality_case_reports()
    eq_fails = [r for r in eq if not r.satisfied]
    report(
        1,
        not fails and not eq_fails,
        f"energy split held on {len(reports)}/1000 premise-valid triples, "
        f"{len(eq)} equality cases within 1e-9",
    )


def test_criterion_2_nonexpansiveness():
    rng = np.random.default_rng(7)
    worst_pair, worst_norm = 0.0, 0.0
    pairs = 0
    while pairs < 200:
        n = int(rng.integers(60, 140))
        a = normalize_adjacency(erdos_renyi(n, 8.0 / n, int(rng.integers(1 << 31))))
        model = _random_model(
            4, 2, int(rng.integers(1, 4)), int(rng.integers(1, 5)), seed=pairs
        )
        for _ in range(5):
            x = rng.standard_normal((n, 4))
            y = rng.standard_normal((n, 4))
            sx = igt_forward(model, x, a).combined
            sy = igt_forward(model, y, a).combined
            worst_pair = max(worst_pair, frobenius_norm(sx - sy) / frobenius_norm(x - y))
            worst_norm = max(worst_norm, frobenius_norm(sx) / frobenius_norm(x))
            pairs += 1
    ok = worst_pair <= 1 + 1e-9 and worst_norm <= 1 + 1e-9
    report(2, ok, f"max distance ratio {worst_pair:.6f}, max norm ratio {worst_norm:.6f} over {pairs} pairs")


def test_criterion_3_bounded_orders():
    rep = check_bounded_orders(draws=100, max_order=4, seed=11)
    report(3, rep.satisfied, f"max ||chain_m|| / 2^m = {rep.lhs:.4f} over 100 draws, orders <= 4")


def test_criterion_4_tree_bound():
    n = 1000
    spec = CommunityFeatureSpec(3, mean1=0.0, mean2=0.5, std1=1.0, std2=1.5)
    model = _random_model(3, 2, 2, 1, seed=4)
    eigt = eigt_forward(model, spec, 20_000, seed=5)
    satisfied = 0
    for t in range(20):
        s = SbmSpec(n // 2, n - n // 2, math.log(n) / n, 0.0, 600 + t)
        a = normalize_adjacency(sample_sbm(s))
        x = sample_features(spec, s.n1, s.n2, 700 + t)
        rep = check_tree_bound(model, x, a, eigt, (s.n1, s.n2))
        satisfied += rep.satisfied
    report(4, satisfied == 20, f"tree bound satisfied in {satisfied}/20 SBM trials at n=1000, N=2")


def test_criterion_5_order_scaling():
    reports = check_corollary_scaling(
        [0, 1, 2, 3],
        SbmSpec(250, 250, math.log(500) / 500, 0.0, 13),
        CommunityFeatureSpec(3, mean2=0.5, std2=1.5),
        trials=10,
        seed=14,
    )
    ok = all(r.satisfied for r in reports)
    detail = ", ".join(f"N={r.meta['N']}: {r.lhs:.3f}<={r.rhs:.3f}" for r in reports)
    report(5, ok, detail)


def test_criterion_6_ergodic_variance():
    from igt_lab.graph_ops import complete_graph

    n = 400
    a = normalize_adjacency(complete_graph(n))
    comm = (n // 2, n - n // 2)
    model = _random_model(1, 1, 2, 1, seed=15)
    reps = []
    for s in (1.0, 2.0):
        spec = CommunityFeatureSpec(1, std1=s, std2=s)
        reps.append(check_variance_bound(a, spec, model, 50, comm, seed=16))
    ratio = reps[1].lhs / reps[0].lhs
    ok = reps[0].satisfied and reps[1].satisfied and abs(ratio - 4.0) <= 0.8
    report(
        6,
        ok,
        f"50-trial mean deviation {reps[0].lhs:.1f} <= {reps[0].rhs:.1f}; "
        f"sigma doubling scaled it by {ratio:.3f} (want 4 +/- 0.8)",
    )


def test_criterion_7_operator_concentration_band():
    reports = check_operator_concentration([500, 1000, 2000, 4000], trials=20, seed=17)
    band = [r for r in reports if r.name == "operator_concentration_band"][0]
    ok = all(r.satisfied for r in reports)
    report(
        7,
        ok,
        f"rescaled deviation band: max {band.lhs:.3f} <= 2 x min {band.rhs / 2:.3f} "
        "over n in {500, 1000, 2000, 4000}, 20 trials each",
    )


def test_criterion_8_eigt_analytic():
    rep = check_eigt_analytic(draws=100_000, seed=18)
    report(
        8,
        rep.satisfied,
        f"scalar order-1 fingerprint off sqrt(2/pi) by {rep.lhs:.2e} <= 3 SE = {rep.rhs:.2e}",
    )


def test_criterion_9_gradient_checks():
    rng = np.random.default_rng(19)
    h, tol = 1e-5, 1e-4
    n, d, classes = 30, 5, 3
    x = rng.standard_normal((n, d))
    y = rng.integers(0, classes, n)
    g = erdos_renyi(n, 0.2, 20)
    a = normalize_adjacency(g)
    train = np.arange(0, n, 2)
    y_gcn = rng.integers(0, classes, train.size)

    def max_rel_err(loss_fn, ws, bs, coords=8):
        _, dws, dbs = loss_fn(ws, bs)
        worst = 0.0
        for arrs, grads in ((ws, dws), (bs, dbs)):
            for arr, grad in zip(arrs, grads):
                flat = arr.ravel()
                for i in rng.choice(flat.size, size=min(coords, flat.size), replace=False):
                    orig = flat[i]
                    flat[i] = orig + h
                    up = loss_fn(ws, bs)[0]
                    flat[i] = orig - h
                    down = loss_fn(ws, bs)[0]
                    flat[i] = orig
                    fd = (up - down) / (2 * h)
                    gval = grad.ravel()[i]
                    worst = max(worst, abs(fd - gval) / max(abs(fd), abs(gval), 1e-6))
        return worst

    worst = 0.0
    points = 0
    for p in range(7):
        ws, bs = _init_stack([d, classes], seed=p)
        worst = max(worst, max_rel_err(lambda w, b: linear_loss_and_grads(w, b, x, y, 0.01), ws, bs))
        points += 1
    for p in range(7):
        ws, bs = _init_stack([d, 8, classes], seed=50 + p)
        worst = max(worst, max_rel_err(lambda w, b: mlp_loss_and_grads(w, b, x, y, None), ws, bs))
        points += 1
    for p in range(6):
        ws, bs = _init_stack([d, 6, 6, classes], seed=90 + p)
        worst = max(
            worst,
            max_rel_err(
                lambda w, b: gcn_loss_and_grads(w, b, a, x, y_gcn, train, l2=0.003), ws, bs
            ),
        )
        points += 1
    report(9, worst <= tol, f"max FD relative error {worst:.2e} <= 1e-4 over {points} parameter points")


def test_criterion_10_trainer_vs_grid_oracle():
    from igt_lab.graph_ops import apply_smoothing, high_pass
    from igt_lab.igt import train_isometries

    ratios = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        n = 300
        a = normalize_adjacency(erdos_renyi(n, 12.0 / n, seed + 1000))
        base = rng.standard_normal(n)
        x = np.column_stack(
            [base, 0.85 * base + math.sqrt(1 - 0.85**2) * rng.standard_normal(n)]
        )
        model = train_isometries(x, a, IgtConfig(2, 1, 1, epochs=400, seed=seed))
        m = high_pass(a, x, 2)

        def objective(w):
            return frobenius_norm(apply_smoothing(a, np.abs(m @ w), 2))

        best = max(
            objective(np.array([[math.cos(t)], [math.sin(t)]]))
            for t in np.arange(720) * math.pi / 360
        )
        ratios.append(objective(model.isometries[0]) / best)
    ok = min(ratios) >= 0.98
    report(10, ok, f"trained/grid objective ratios min {min(ratios):.4f} over 10 seeds (want >= 0.98)")


# ---------------------------------------------------------------------------
# scaled experiment reproduction
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def synth_summary(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    cfg = RunConfig({}, str(out), 0)
    assert cmd_synth(cfg) == 0
    rows = list(csv.DictReader(open(out / "synth_summary.csv")))
    table = {}
    for r in rows:
        table[(r["method"], float(r["delta_sigma"]))] = (
            float(r["mean_test_acc"]),
            float(r["std_test_acc"]),
            int(r["runs"]),
        )
    return table


def test_criterion_11a_order_gap(synth_summary):
    gaps = [1.5, 2.0, 2.5, 3.0]
    margins = []
    for gap in gaps:
        n0 = synth_summary[("igt_mlp_N0", gap)][0]
        for method in ("igt_mlp_N1", "igt_mlp_N2"):
            margins.append(synth_summary[(method, gap)][0] - n0)
    ok = min(margins) >= 0.20
    report(
        "11a",
        ok,
        f"order-1/2 over order-0 margins at spread gap >= 1.5: min {100 * min(margins):.1f} points (want >= 20)",
    )


@pytest.mark.xfail(
    strict=True,
    reason="spec defect: the order-0 feature's population-optimal threshold "
    "accuracy spans 0.60-0.77 at spread gaps >= 1.0, so a correctly trained "
    "head cannot stay within 50 +/- 10 across the sweep; see decisions ledger",
)
def test_criterion_11b_order0_level(synth_summary):
    accs = {
        gap: acc
        for (method, gap), (acc, _, _) in synth_summary.items()
        if method == "igt_mlp_N0"
    }
    ok = all(0.40 <= acc <= 0.60 for acc in accs.values())
    report(
        "11b",
        ok,
        "order-0 accuracy within [0.40, 0.60] across the sweep: "
        + ", ".join(f"{g}: {a:.3f}" for g, a in sorted(accs.items())),
    )


def test_synth_curves_monotone_trend(synth_summary):
    # driver invariant, not a numbered criterion: demodulated-order curves
    # rise with the spread gap up to 5-point noise
    gaps = sorted({g for (_, g) in synth_summary})
    for method in ("igt_mlp_N1", "igt_mlp_N2"):
        accs = [synth_summary[(method, g)][0] for g in gaps]
        drops = [accs[i] - accs[i + 1] for i in range(len(accs) - 1)]
        assert max(drops, default=0.0) <= 0.05, (method, accs)


def test_criterion_11c_igt_vs_gcn(synth_summary):
    deficits = []
    for gap in (2.0, 2.5, 3.0):
        gcn_acc, gcn_std, runs = synth_summary[("gcn", gap)]
        best_acc, best_std = max(
            (synth_summary[(m, gap)][0], synth_summary[(m, gap)][1])
            for m in ("igt_mlp_N1", "igt_mlp_N2")
        )
        se = math.hypot(gcn_std, best_std) / math.sqrt(runs)
        deficits.append((best_acc - gcn_acc) + 3 * se)
    ok = min(deficits) >= 0.0
    report(
        "11c",
        ok,
        "ordinal IGT(N>=1) vs GCN at spread gap >= 2 within the suite's 3-SE "
        f"convention: min slack {100 * min(deficits):.2f} points",
    )


# ---------------------------------------------------------------------------
# dataset-gated criteria
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_12_cora(tmp_path):
    path = dataset_or_skip("cora")

    out = tmp_path / "bench"
    cfg = RunConfig(
        {"dataset_dir": path, "splits": "predefined", "seeds": "5"}, str(out), 0
    )
    assert cmd_bench(cfg) == 0
    rows = list(csv.DictReader(open(out / "bench_summary.csv")))
    acc = {r["head"]: float(r["mean_test_acc"]) for r in rows}
    ok_lin = abs(acc["linear"] - 0.774) <= 0.020
    ok_mlp = abs(acc["mlp"] - 0.803) <= 0.020

    out2 = tmp_path / "ablate"
    cfg2 = RunConfig({"dataset_dir": path}, str(out2), 0)
    assert cmd_ablate(cfg2) == 0
    grid_rows = list(csv.DictReader(open(out2 / "ablate_grid.csv")))
    grid = {int(r["J"]): {n: float(r[f"N{n}"]) for n in range(4)} for r in grid_rows}
    ok_cell = abs(grid[3][2] - 0.746) <= 0.020
    ok_trend = all(grid[4][n] >= grid[1][n] - 0.01 for n in range(4))

    out3 = tmp_path / "randw"
    cfg3 = RunConfig({"dataset_dir": path, "seeds": "5"}, str(out3), 0)
    assert cmd_random_w(cfg3) == 0
    summary = list(csv.DictReader(open(out3 / "random_w_summary.csv")))[0]
    drop = float(summary["mean_drop_points"])
    ok_drop = abs(drop - 6.3) <= 3.0

    ok = ok_lin and ok_mlp and ok_cell and ok_trend and ok_drop
    report(
        12,
        ok,
        f"cora predefined lin {acc['linear']:.3f} (want .774+/-.020), "
        f"mlp {acc['mlp']:.3f} (want .803+/-.020); ablation (J=3,N=2) "
        f"{grid[3][2]:.3f} (want .746+/-.020), J-trend {ok_trend}; "
        f"random-maps drop {drop:.1f} points (want 6.3+/-3)",
    )


@pytest.mark.slow
@pytest.mark.parametrize("name,head,target", [
    ("pubmed", "mlp", 0.764),
    ("pubmed", "linear", 0.739),
    ("wikics", "mlp", 0.772),
    ("wikics", "linear", 0.767),
])
def test_criterion_13_stretch(tmp_path, name, head, target):
    path = dataset_or_skip(name)
    mode = "predefined" if name == "pubmed" else "predefined-families"
    cfg = RunConfig(
        {"dataset_dir": path, "splits": mode, "seeds": "5", "heads": head},
        str(tmp_path / f"{name}_{head}"),
        0,
    )
    assert cmd_bench(cfg) == 0
    rows = list(csv.DictReader(open(tmp_path / f"{name}_{head}" / "bench_summary.csv")))
    acc = float(rows[0]["mean_test_acc"])
    ok = abs(acc - target) <= 0.020
    report(13, ok, f"{name} {head} predefined-style accuracy {acc:.3f} (stretch target {target}+/-.020)")


@pytest.mark.slow
def test_criterion_14_converted_bundles():
    expected = {"cora": (2708, 7, 1433), "citeseer": (3327, 6, 3703)}
    checked = []
    for name, (nodes, classes, width) in expected.items():
        path = dataset_or_skip(name)
        bundle = load_dataset(path)
        assert bundle.n == nodes
        assert bundle.class_count == classes
        assert bundle.features.shape[1] == width
        assert bundle.predefined is not None
        train = bundle.predefined[0]
        counts = np.bincount(bundle.labels[train], minlength=classes)
        assert (counts == 20).all(), f"{name}: train split is not 20 per class"
        checked.append(name)
    report(14, True, f"converted bundles verified: {', '.join(checked)}")
