"""CLI drivers: synthetic sweep, citation benchmarks, ablations, verification.

Every command resolves its parameters from a plain ``key = value`` config file
overridden by command-line ``key=value`` pairs, echoes the effective config
and a provenance stamp into its output directory, and writes CSV reports
(floats at 6 significant digits). Rows are keyed and sorted before writing,
so identical configs and seeds reproduce CSVs byte for byte; the per-run
``wall_seconds`` column is the one documented exception, which is why the
aggregated summary files never include it.
"""

import os
import subprocess
import time

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import __version__
from .classify import SplitSpec, TrainSpec, gcn_baseline, make_splits, train_head
from .datasets import DatasetBundle, load_dataset
from .errors import DataError
from .graph_ops import normalize_adjacency
from .igt import IgtConfig, igt_forward, init_isometries, IgtModel, standardize, train_isometries
from .sbm import CommunityFeatureSpec, SbmSpec, sample_features, sample_sbm
from .theory import default_suite, reports_to_csv


def parse_config_file(path) -> dict[str, str]:
    """One ``key = value`` per line; ``#`` starts a comment."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


class RunConfig:
    """String-keyed settings with typed getters; records what was read."""

    def __init__(self, values: dict[str, str], out_dir: str, seed: int):
        self.values = dict(values)
        self.out_dir = out_dir
        self.seed = seed
        self.values.setdefault("seed", str(seed))

    @classmethod
    def from_sources(cls, config_path, overrides, out_dir, seed) -> "RunConfig":
        values = parse_config_file(config_path) if config_path else {}
        for item in overrides or []:
            if "=" not in item:
                raise DataError(f"override {item!r} is not of the form key=value")
            key, value = item.split("=", 1)
            values[key.strip()] = value.strip()
        if seed is None:
            seed = int(values.get("seed", "0"))
        return cls(values, out_dir, int(seed))

    def get_str(self, key: str, default: str) -> str:
        return self.values.get(key, default)

    def get_int(self, key: str, default: int) -> int:
        return int(self.values.get(key, default))

    def get_float(self, key: str, default: float) -> float:
        return float(self.values.get(key, default))

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self.values.get(key)
        if raw is None:
            return default
        return raw.lower() in ("1", "true", "yes", "on")

    def get_list(self, key: str, default: str, cast=float) -> list:
        raw = self.values.get(key, default)
        return [cast(tok) for tok in str(raw).replace(",", " ").split()]


def version_string() -> str:
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
        )
        suffix = described.stdout.strip() if described.returncode == 0 else ""
    except (OSError, subprocess.SubprocessError):
        suffix = ""
    return f"igt-lab-{__version__}" + (f"+{suffix}" if suffix else "")


def prepare_out_dir(cfg: RunConfig, command: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    with open(os.path.join(cfg.out_dir, "config_echo.txt"), "w") as fh:
        for key in sorted(cfg.values):
            fh.write(f"{key} = {cfg.values[key]}\n")
    with open(os.path.join(cfg.out_dir, "provenance.txt"), "w") as fh:
        fh.write(f"version = {version_string()}\n")
        fh.write(f"command = {command}\n")
        fh.write(f"seed = {cfg.seed}\n")
    return cfg.out_dir


def format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_csv(path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def _line_plot_svg(path, x_values, series: dict[str, tuple[list, list]], xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label in sorted(series):
        ys, errs = series[label]
        ax.errorbar(x_values, ys, yerr=errs, marker="o", capsize=3, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _grid_plot_svg(path, values: np.ndarray, row_labels, col_labels, title):
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    im = ax.imshow(values, cmap="viridis")
    ax.set_xticks(range(len(col_labels)), col_labels)
    ax.set_yticks(range(len(row_labels)), row_labels)
    ax.set_xlabel("order")
    ax.set_ylabel("smoothing scale")
    ax.set_title(title)
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            ax.text(j, i, f"{100 * values[i, j]:.1f}", ha="center", va="center", color="w")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _margin_plot_svg(path, reports):
    names = sorted({r.name for r in reports})
    fig, ax = plt.subplots(figsize=(7.0, 0.35 * len(names) + 1.5))
    for i, name in enumerate(names):
        margins = [r.margin for r in reports if r.name == name]
        color = "tab:blue" if min(margins) >= 0 else "tab:red"
        ax.scatter(margins, [i] * len(margins), s=12, alpha=0.6, color=color)
    ax.axvline(0.0, color="k", linewidth=0.8)
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("margin (rhs - lhs)")
    ax.set_xscale("symlog", linthresh=1e-9)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# ---------------------------------------------------------------------------
# synthetic sweep
# ---------------------------------------------------------------------------


def _synth_split(n: int, train_size: int, val_size: int, rng) -> SplitSpec:
    perm = rng.permutation(n)
    train = np.sort(perm[:train_size])
    val = np.sort(perm[train_size : train_size + val_size])
    test = np.sort(perm[train_size + val_size :])
    return SplitSpec("synthetic", train, val, test)


def cmd_synth(cfg: RunConfig) -> int:
    """Two-community sweep over the feature-spread gap.

    Defaults run at desk scale (n = 2000, p = 0.005) with the expected degree
    of the full-scale setting; ``paper_scale = true`` restores n = 10000 and
    p = 0.001.
    """
    out = prepare_out_dir(cfg, "synth")
    if cfg.get_bool("paper_scale"):
        n, p = 10_000, 0.001
    else:
        n = cfg.get_int("n", 2000)
        p = cfg.get_float("p", 0.005)
    tau = cfg.get_float("tau", 0.0)
    gaps = cfg.get_list("delta_sigmas", "0.5 1.0 1.5 2.0 2.5 3.0")
    seeds = cfg.get_int("seeds", 5)
    orders = cfg.get_list("orders", "0 1 2", cast=int)
    smoothing = cfg.get_int("J", 2)
    rank = cfg.get_int("k", 1)
    train_size = cfg.get_int("train_size", 20)
    val_size = cfg.get_int("val_size", 500)
    run_gcn = cfg.get_bool("gcn", True)
    max_order = max(orders)

    rows = []
    for gap in gaps:
        for s in range(seeds):
            seed = cfg.seed + 1000 * s
            spec = SbmSpec(n // 2, n - n // 2, p, tau, seed)
            graph = sample_sbm(spec)
            a = normalize_adjacency(graph)
            feats = CommunityFeatureSpec(1, 0.0, 0.0, 1.0, 1.0 + gap)
            x = sample_features(feats, spec.n1, spec.n2, seed + 1)
            labels = np.r_[np.zeros(spec.n1, np.int64), np.ones(spec.n2, np.int64)]
            split = _synth_split(n, train_size, val_size, np.random.default_rng(seed + 2))
            igt_cfg = IgtConfig(smoothing, max_order, rank, seed=seed + 3)
            model = train_isometries(x, a, igt_cfg)
            head_spec = TrainSpec(seed=seed + 4)
            features_all = igt_forward(model, x, a)
            for order in orders:
                feats_n = standardize(np.concatenate(features_all.blocks[: order + 1], axis=1))
                _, metrics = train_head(feats_n.features, labels, split, head_spec, "mlp")
                rows.append((f"igt_mlp_N{order}", gap, seed, metrics["val_acc"], metrics["test_acc"]))
            if run_gcn:
                metrics = gcn_baseline(graph, x, labels, split, head_spec)
                rows.append(("gcn", gap, seed, metrics["val_acc"], metrics["test_acc"]))

    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    write_csv(
        os.path.join(out, "synth_runs.csv"),
        ["method", "delta_sigma", "seed", "val_acc", "test_acc"],
        rows,
    )

    summary = []
    series: dict[str, tuple[list, list]] = {}
    methods = sorted({r[0] for r in rows})
    for method in methods:
        ys, errs = [], []
        for gap in gaps:
            accs = np.array([r[4] for r in rows if r[0] == method and r[1] == gap])
            mean = float(accs.mean())
            std = float(accs.std(ddof=1)) if accs.size > 1 else 0.0
            summary.append((method, gap, mean, std, len(accs)))
            ys.append(100 * mean)
            errs.append(100 * std)
        series[method] = (ys, errs)
    write_csv(
        os.path.join(out, "synth_summary.csv"),
        ["method", "delta_sigma", "mean_test_acc", "std_test_acc", "runs"],
        summary,
    )
    _line_plot_svg(
        os.path.join(out, "synth_accuracy.svg"),
        gaps,
        series,
        "community std gap",
        "test accuracy (%)",
    )
    return 0


# ---------------------------------------------------------------------------
# citation benchmarks
# ---------------------------------------------------------------------------

# per-dataset hyperparameters picked by the published cross-validation
_BENCH_PRESETS = {
    "cora": {"dropout": 0.0},
    "citeseer": {"dropout": 0.2},
    "pubmed": {"dropout": 0.2},
    "wikics": {
        "dropout": 0.8,
        "linear": {"J": 1, "order": 1, "rank": 150},
        "mlp": {"J": 2, "order": 1, "rank": 35},
    },
}
_LINEAR_L2 = 0.005


def _igt_features(bundle: DatasetBundle, smoothing, order, rank, epochs, lr, seed):
    a = normalize_adjacency(bundle.graph)
    igt_cfg = IgtConfig(smoothing, order, rank, epochs=epochs, learning_rate=lr, seed=seed)
    model = train_isometries(bundle.features, a, igt_cfg)
    return model, igt_forward(model, bundle.features, a)


def _bench_hyper(name: str, head: str, split_mode: str, cfg: RunConfig):
    preset = _BENCH_PRESETS.get(name, {})
    override = preset.get(head, {})
    smoothing = override.get("J", 4 if split_mode in ("predefined", "random") else 1)
    order = override.get("order", 2)
    rank = override.get("rank", 10)
    dropout = preset.get("dropout", 0.0)
    smoothing = cfg.get_int("J", smoothing)
    order = cfg.get_int("N", order)
    rank = cfg.get_int("k", rank)
    dropout = cfg.get_float("dropout", dropout)
    l2 = cfg.get_float("l2", _LINEAR_L2 if head == "linear" else 0.0)
    return smoothing, order, rank, dropout, l2


def _splits_for_mode(
    bundle: DatasetBundle,
    mode: str,
    seeds: int,
    base_seed: int,
    val_size: int = 500,
    test_size: int = 1000,
):
    """(split, model_seed) pairs for one mode; random/full use one model seed
    per split, matching one run per split."""
    if mode == "predefined":
        if bundle.predefined is None:
            raise DataError(f"dataset {bundle.name!r} has no predefined split files")
        split = make_splits(
            bundle.n, bundle.labels, "predefined", predefined=bundle.predefined
        )
        return [(split, base_seed + s) for s in range(seeds)]
    if bundle.split_families and mode == "predefined-families":
        out = []
        for i, triple in enumerate(bundle.split_families):
            split = make_splits(bundle.n, bundle.labels, "predefined", predefined=triple)
            out.append((split, base_seed + i))
        return out
    out = []
    for s in range(seeds):
        split = make_splits(
            bundle.n,
            bundle.labels,
            mode,
            seed=base_seed + 17 * s,
            val_size=val_size,
            test_size=test_size,
        )
        out.append((split, base_seed + s))
    return out


def cmd_bench(cfg: RunConfig) -> int:
    """Linear and MLP heads over IGT features for the requested split modes."""
    out = prepare_out_dir(cfg, "bench")
    bundle = load_dataset(cfg.get_str("dataset_dir", "datasets/cora"))
    seeds = cfg.get_int("seeds", 5)
    heads = cfg.get_list("heads", "linear mlp", cast=str)
    if bundle.split_families:
        modes = cfg.get_list("splits", "predefined-families", cast=str)
    else:
        modes = cfg.get_list("splits", "predefined random full", cast=str)
    epochs = cfg.get_int("igt_epochs", 50)
    lr = cfg.get_float("igt_lr", 0.01)
    val_size = cfg.get_int("val_size", 500)
    test_size = cfg.get_int("test_size", 1000)

    rows = []
    for mode in modes:
        for head in heads:
            smoothing, order, rank, dropout, l2 = _bench_hyper(bundle.name, head, mode, cfg)
            for split, model_seed in _splits_for_mode(
                bundle, mode, seeds, cfg.seed, val_size, test_size
            ):
                started = time.perf_counter()
                _, features = _igt_features(
                    bundle, smoothing, order, rank, epochs, lr, model_seed
                )
                standardized = standardize(features)
                spec = TrainSpec(dropout=dropout, l2=l2, seed=model_seed)
                _, metrics = train_head(
                    standardized.features, bundle.labels, split, spec, head
                )
                wall = time.perf_counter() - started
                rows.append(
                    (
                        bundle.name,
                        mode,
                        head,
                        order,
                        smoothing,
                        rank,
                        dropout,
                        l2,
                        model_seed,
                        metrics["val_acc"],
                        metrics["test_acc"],
                        metrics["epochs_ran"],
                        wall,
                    )
                )

    rows.sort(key=lambda r: (r[0], r[1], r[2], r[8]))
    write_csv(
        os.path.join(out, "bench_runs.csv"),
        ["dataset", "split_mode", "head", "N", "J", "k", "dropout", "l2", "seed",
         "val_acc", "test_acc", "epochs_ran", "wall_seconds"],
        rows,
    )
    summary = []
    for mode in sorted({r[1] for r in rows}):
        for head in sorted({r[2] for r in rows}):
            accs = np.array([r[10] for r in rows if r[1] == mode and r[2] == head])
            if accs.size == 0:
                continue
            summary.append(
                (
                    bundle.name,
                    mode,
                    head,
                    float(accs.mean()),
                    float(accs.std(ddof=1)) if accs.size > 1 else 0.0,
                    accs.size,
                )
            )
    write_csv(
        os.path.join(out, "bench_summary.csv"),
        ["dataset", "split_mode", "head", "mean_test_acc", "std_test_acc", "runs"],
        summary,
    )
    return 0


def cmd_ablate(cfg: RunConfig) -> int:
    """Validation-accuracy grid over smoothing scale and order, linear head."""
    out = prepare_out_dir(cfg, "ablate")
    bundle = load_dataset(cfg.get_str("dataset_dir", "datasets/cora"))
    if bundle.predefined is None:
        raise DataError("ablation needs the predefined split files")
    split = make_splits(bundle.n, bundle.labels, "predefined", predefined=bundle.predefined)
    orders = cfg.get_list("orders", "0 1 2 3", cast=int)
    smoothings = cfg.get_list("smoothings", "1 2 3 4", cast=int)
    rank = cfg.get_int("k", 10)
    seeds = cfg.get_int("seeds", 3)
    l2 = cfg.get_float("l2", _LINEAR_L2)
    epochs = cfg.get_int("igt_epochs", 50)
    lr = cfg.get_float("igt_lr", 0.01)

    rows = []
    grid = {}
    max_order = max(orders)
    for smoothing in smoothings:
        for s in range(seeds):
            seed = cfg.seed + 1000 * s
            model, features = _igt_features(
                bundle, smoothing, max_order, rank, epochs, lr, seed
            )
            for order in orders:
                feats = standardize(
                    np.concatenate(features.blocks[: order + 1], axis=1)
                )
                spec = TrainSpec(l2=l2, seed=seed)
                _, metrics = train_head(feats.features, bundle.labels, split, spec, "linear")
                rows.append((smoothing, order, seed, metrics["val_acc"], metrics["test_acc"]))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    write_csv(
        os.path.join(out, "ablate_runs.csv"),
        ["J", "N", "seed", "val_acc", "test_acc"],
        rows,
    )
    for smoothing in smoothings:
        for order in orders:
            accs = [r[3] for r in rows if r[0] == smoothing and r[1] == order]
            grid[(smoothing, order)] = float(np.mean(accs))
    grid_rows = [
        tuple([smoothing] + [grid[(smoothing, order)] for order in orders])
        for smoothing in smoothings
    ]
    write_csv(
        os.path.join(out, "ablate_grid.csv"),
        ["J"] + [f"N{order}" for order in orders],
        grid_rows,
    )
    values = np.array([[grid[(s, o)] for o in orders] for s in smoothings])
    _grid_plot_svg(
        os.path.join(out, "ablate_grid.svg"),
        values,
        [f"J={s}" for s in smoothings],
        [f"N={o}" for o in orders],
        "validation accuracy (%)",
    )
    return 0


def cmd_random_w(cfg: RunConfig) -> int:
    """Full-split accuracy drop when the trained maps are replaced by random ones."""
    out = prepare_out_dir(cfg, "random-w")
    bundle = load_dataset(cfg.get_str("dataset_dir", "datasets/cora"))
    head = cfg.get_str("head", "mlp")
    seeds = cfg.get_int("seeds", 5)
    mode = cfg.get_str("split", "full")
    smoothing, order, rank, dropout, l2 = _bench_hyper(bundle.name, head, mode, cfg)
    epochs = cfg.get_int("igt_epochs", 50)
    lr = cfg.get_float("igt_lr", 0.01)
    a = normalize_adjacency(bundle.graph)
    val_size = cfg.get_int("val_size", 500)
    test_size = cfg.get_int("test_size", 1000)

    rows = []
    for split, seed in _splits_for_mode(
        bundle, mode, seeds, cfg.seed, val_size, test_size
    ):
        spec = TrainSpec(dropout=dropout, l2=l2, seed=seed)
        _, features = _igt_features(bundle, smoothing, order, rank, epochs, lr, seed)
        trained = standardize(features)
        _, metrics_trained = train_head(trained.features, bundle.labels, split, spec, head)

        random_cfg = IgtConfig(smoothing, order, rank, seed=seed + 900_001)
        random_model = IgtModel(random_cfg, init_isometries(random_cfg, bundle.features.shape[1]))
        random_feats = standardize(igt_forward(random_model, bundle.features, a))
        _, metrics_random = train_head(random_feats.features, bundle.labels, split, spec, head)

        drop = 100.0 * (metrics_trained["test_acc"] - metrics_random["test_acc"])
        rows.append(
            (bundle.name, head, seed, metrics_trained["test_acc"], metrics_random["test_acc"], drop)
        )
    rows.sort(key=lambda r: r[2])
    write_csv(
        os.path.join(out, "random_w_runs.csv"),
        ["dataset", "head", "seed", "trained_acc", "random_acc", "drop_points"],
        rows,
    )
    drops = np.array([r[5] for r in rows])
    write_csv(
        os.path.join(out, "random_w_summary.csv"),
        ["dataset", "head", "mean_drop_points", "std_drop_points", "runs"],
        [(bundle.name, head, float(drops.mean()),
          float(drops.std(ddof=1)) if drops.size > 1 else 0.0, drops.size)],
    )
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    """Run the bound-verification suite; nonzero exit if anything fails."""
    out = prepare_out_dir(cfg, "verify")
    trials = cfg.get_int("trials", 0) or None
    inject = cfg.get_bool("inject_fault")
    reports = default_suite(trials=trials, seed=cfg.seed, inject_fault=inject)
    reports_to_csv(reports, os.path.join(out, "verify_reports.csv"))
    _margin_plot_svg(os.path.join(out, "verify_margins.svg"), reports)
    satisfied = sum(r.satisfied for r in reports)
    failed = len(reports) - satisfied
    print(f"verify: {len(reports)} checks, {satisfied} satisfied, {failed} violated")
    if failed:
        worst = sorted(
            (r for r in reports if not r.satisfied), key=lambda r: r.margin
        )[:10]
        for r in worst:
            print(f"  VIOLATED {r.name}: lhs={r.lhs:.6g} rhs={r.rhs:.6g} meta={r.meta}")
    return 1 if failed else 0
