"""The IGT engine: greedy isometry training, the forward cascade, and the
expected (graph-free) counterpart.

The representation of order N applies, per layer,

    U_0 = X,    U_{n+1} = |(I - A_J) U_n W_n|,

and collects the smoothed blocks {A_J U_0, ..., A_J U_N}. Each W_n lives in
the unit spectral-norm ball and is trained greedily (earlier layers frozen) to
maximize the smoothed energy of the demodulated channel,

    maximize  || A_J |(I - A_J) U_n W| ||   subject to  ||W||_2 <= 1,

by Adam ascent with a spectral-ball projection after every step.

The expected counterpart replaces graph smoothing by per-community
expectation: ubar_{n+1} = |(ubar_n - E ubar_n) W_n| acting on single node
rows. Expectations are estimated by Monte Carlo in two passes; pass 1 runs
the recursion with coupled sample means, pass 2 redraws fresh samples and
re-runs the chain against the frozen pass-1 means, which decouples the
centering from the rows it centers.
"""

import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import NonFiniteError, ShapeError
from .graph_ops import apply_smoothing, high_pass
from .numerics import project_spectral_ball, semi_orthogonal_init
from .sbm import CommunityFeatureSpec

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# spread between per-layer init seeds; any constant > plausible layer counts works
_LAYER_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class IgtConfig:
    """Cascade hyperparameters: smoothing scale, order, rank, trainer budget."""

    smoothing: int
    order: int
    rank: int
    epochs: int = 50
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.smoothing < 0:
            raise ValueError("smoothing scale must be >= 0")
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")

    def to_dict(self) -> dict:
        return {
            "smoothing": self.smoothing,
            "order": self.order,
            "rank": self.rank,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }


@dataclass
class IgtModel:
    """Trained cascade: config plus one norm-bounded map per demodulation layer.

    ``isometries[0]`` has shape (input_dim, rank); later maps are rank x rank.
    ``objective_history[n]`` records the layer-n objective per epoch, with a
    final post-update value appended.
    """

    config: IgtConfig
    isometries: list[np.ndarray]
    objective_history: list[list[float]] = field(default_factory=list)

    def truncated(self, order: int) -> "IgtModel":
        """Model of a lower order sharing the same trained prefix."""
        if order > self.config.order:
            raise ValueError(f"cannot truncate order {self.config.order} to {order}")
        cfg = IgtConfig(
            self.config.smoothing,
            order,
            self.config.rank,
            self.config.epochs,
            self.config.learning_rate,
            self.config.seed,
        )
        return IgtModel(cfg, self.isometries[:order], self.objective_history[:order])


@dataclass
class IgtFeatures:
    """Per-order smoothed blocks plus their feature-axis concatenation."""

    blocks: list[np.ndarray]

    @property
    def combined(self) -> np.ndarray:
        return np.concatenate(self.blocks, axis=1)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.blocks)

    @property
    def node_count(self) -> int:
        return self.blocks[0].shape[0]


@dataclass
class EigtFeatures:
    """Per-community, per-order mean vectors with Monte-Carlo standard errors.

    ``means[i]`` is the order-indexed list for community i+1; entry m has the
    width of the order-m block (input dim for m = 0, rank afterwards).
    """

    means: tuple[list[np.ndarray], list[np.ndarray]]
    stderrs: tuple[list[np.ndarray], list[np.ndarray]]
    sample_count: int

    def stacked(self, m: int, n1: int, n2: int) -> np.ndarray:
        """Order-m expectation replicated per community into an (n1+n2) x w matrix."""
        return np.concatenate(
            [
                np.tile(self.means[0][m], (n1, 1)),
                np.tile(self.means[1][m], (n2, 1)),
            ]
        )

    def mean_gap(self, m: int) -> float:
        """l2 distance between the two community fingerprints at order m."""
        return float(np.linalg.norm(self.means[1][m] - self.means[0][m]))


@dataclass
class Standardized:
    """Column-standardized features plus the statistics used, for reuse."""

    features: np.ndarray
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.scale


def layer_seed(config: IgtConfig, layer: int) -> int:
    return config.seed + _LAYER_SEED_STRIDE * layer


def init_isometries(config: IgtConfig, input_dim: int) -> list[np.ndarray]:
    """Seeded semi-orthogonal starting maps for every layer."""
    if config.order == 0:
        return []
    if config.rank > input_dim:
        raise ShapeError(
            f"rank {config.rank} exceeds input feature dimension {input_dim}",
            left=config.rank,
            right=input_dim,
        )
    dims = [input_dim] + [config.rank] * (config.order - 1)
    return [
        semi_orthogonal_init(d, config.rank, layer_seed(config, i))
        for i, d in enumerate(dims)
    ]


def _layer_objective_and_grad(a, j, m, w):
    """Value and gradient of f(W) = ||A_J |M W| || for the fixed channel M."""
    z = m @ w
    y = np.abs(z)
    g = apply_smoothing(a, y, j)
    f = float(np.linalg.norm(g))
    if f == 0.0:
        return 0.0, np.zeros_like(w)
    dy = apply_smoothing(a, g, j) / f
    grad = m.T @ (dy * np.sign(z))
    return f, grad


def train_isometries(
    x: np.ndarray, a: sparse.csr_array, config: IgtConfig
) -> IgtModel:
    """Greedy layer-wise training of the cascade's norm-bounded maps.

    Layer n runs its full epoch budget of projected Adam ascent steps, is
    frozen, and the next input channel is computed before layer n+1 starts.
    Deterministic given ``config.seed``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"features must be 2-D, got shape {x.shape}", left=x.shape)
    if a.shape[0] != x.shape[0]:
        raise ShapeError(
            f"operator is {a.shape[0]}x{a.shape[1]} but features have "
            f"{x.shape[0]} rows",
            left=a.shape,
            right=x.shape,
        )
    weights = init_isometries(config, x.shape[1])
    history: list[list[float]] = []
    u = x
    j = config.smoothing
    lr = config.learning_rate
    for layer, w in enumerate(weights):
        m = high_pass(a, u, j)
        adam_m = np.zeros_like(w)
        adam_v = np.zeros_like(w)
        layer_log: list[float] = []
        for epoch in range(1, config.epochs + 1):
            f, grad = _layer_objective_and_grad(a, j, m, w)
            layer_log.append(f)
            if not np.all(np.isfinite(grad)):
                raise NonFiniteError(
                    f"non-finite gradient at layer {layer}, epoch {epoch}"
                )
            if f == 0.0:
                # zero signal gives a zero subgradient: no step, and skipping
                # the projection keeps the initialization bit-exact
                continue
            g = -grad  # ascent as minimization of the negated objective
            adam_m = ADAM_BETA1 * adam_m + (1 - ADAM_BETA1) * g
            adam_v = ADAM_BETA2 * adam_v + (1 - ADAM_BETA2) * g * g
            mhat = adam_m / (1 - ADAM_BETA1**epoch)
            vhat = adam_v / (1 - ADAM_BETA2**epoch)
            w = project_spectral_ball(w - lr * mhat / (np.sqrt(vhat) + ADAM_EPS))
        layer_log.append(_layer_objective_and_grad(a, j, m, w)[0])
        history.append(layer_log)
        weights[layer] = w
        u = np.abs(high_pass(a, u @ w, j))
    return IgtModel(config, weights, history)


def igt_forward(
    model: IgtModel, x: np.ndarray, a: sparse.csr_array
) -> IgtFeatures:
    """Run the cascade: smoothed block per order, orders 0..N."""
    x = np.asarray(x, dtype=np.float64)
    if model.isometries and x.shape[1] != model.isometries[0].shape[0]:
        raise ShapeError(
            f"model expects {model.isometries[0].shape[0]} input features, "
            f"got {x.shape[1]}",
            left=model.isometries[0].shape,
            right=x.shape,
        )
    j = model.config.smoothing
    u = x
    blocks = [apply_smoothing(a, u, j)]
    for w in model.isometries:
        u = np.abs(high_pass(a, u @ w, j))
        blocks.append(apply_smoothing(a, u, j))
    return IgtFeatures(blocks)


def eigt_forward(
    model: IgtModel, spec: CommunityFeatureSpec, draws: int, seed: int
) -> EigtFeatures:
    """Monte-Carlo estimate of the per-community expected representation.

    Runs the node-level recursion on ``draws`` i.i.d. feature rows per
    community. Pass 1 estimates the order-m expectations with coupled sample
    means; pass 2 redraws and reruns the chain against those frozen means,
    and its means and standard errors are what is reported.
    """
    if draws < 100:
        raise ValueError(f"need at least 100 Monte-Carlo draws, got {draws}")
    if model.isometries and spec.dim != model.isometries[0].shape[0]:
        raise ShapeError(
            f"model expects {model.isometries[0].shape[0]} input features, "
            f"feature spec has {spec.dim}",
            left=model.isometries[0].shape,
            right=spec.dim,
        )
    rng = np.random.default_rng(seed)
    means: list[list[np.ndarray]] = []
    stderrs: list[list[np.ndarray]] = []
    for community in (1, 2):
        mu = spec.mean_vector(community)
        sd = spec.std(community)
        # pass 1: coupled means
        u = mu + sd * rng.standard_normal((draws, spec.dim))
        frozen = [u.mean(axis=0)]
        for w in model.isometries:
            u = np.abs((u - frozen[-1]) @ w)
            frozen.append(u.mean(axis=0))
        # pass 2: fresh draws against the frozen means
        u = mu + sd * rng.standard_normal((draws, spec.dim))
        out_means = [u.mean(axis=0)]
        out_se = [u.std(axis=0, ddof=1) / np.sqrt(draws)]
        for m_idx, w in enumerate(model.isometries):
            u = np.abs((u - frozen[m_idx]) @ w)
            out_means.append(u.mean(axis=0))
            out_se.append(u.std(axis=0, ddof=1) / np.sqrt(draws))
        means.append(out_means)
        stderrs.append(out_se)
    return EigtFeatures((means[0], means[1]), (stderrs[0], stderrs[1]), draws)


def expected_recursion(
    model: IgtModel, x: np.ndarray, eigt: EigtFeatures, n1: int, n2: int
) -> list[np.ndarray]:
    """Node-level recursion on realized rows with frozen per-community means.

    Returns [ubar_0, ..., ubar_N] where ubar_{m+1} = |(ubar_m - E_m) W_m| and
    E_m replicates the community fingerprints over the community's rows.
    """
    if x.shape[0] != n1 + n2:
        raise ShapeError(
            f"features have {x.shape[0]} rows, communities sum to {n1 + n2}",
            left=x.shape,
            right=(n1, n2),
        )
    u = np.asarray(x, dtype=np.float64)
    chain = [u]
    for m_idx, w in enumerate(model.isometries):
        u = np.abs((u - eigt.stacked(m_idx, n1, n2)) @ w)
        chain.append(u)
    return chain


def standardize(features, eps: float = 1e-12) -> Standardized:
    """Column-wise standardization to mean 0, population std 1 over all rows.

    Accepts an ``IgtFeatures`` or a raw 2-D array. Columns whose std is below
    ``eps`` map to exactly 0; their recorded scale is 1 so reusing the
    statistics on new data is well defined.
    """
    x = features.combined if isinstance(features, IgtFeatures) else np.asarray(features)
    x = x.astype(np.float64)
    if x.shape[0] < 2:
        raise ValueError("standardization needs at least 2 rows")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    constant = std <= eps
    scale = np.where(constant, 1.0, std)
    out = (x - mean) / scale
    out[:, constant] = 0.0
    return Standardized(out, mean, scale)


def save_model(model: IgtModel, path) -> None:
    """Serialize config plus the trained maps; round-trips bit-exactly."""
    payload = {
        "config": np.frombuffer(
            json.dumps(model.config.to_dict()).encode(), dtype=np.uint8
        )
    }
    for i, w in enumerate(model.isometries):
        payload[f"w_{i}"] = np.ascontiguousarray(w, dtype=np.float64)
    if hasattr(path, "write"):
        np.savez(path, **payload)
    else:
        # open explicitly so np.savez cannot append its own .npz suffix
        with open(path, "wb") as fh:
            np.savez(fh, **payload)


def load_model(path) -> IgtModel:
    with np.load(path) as data:
        cfg_raw = json.loads(bytes(data["config"]).decode())
        config = IgtConfig(**cfg_raw)
        weights = [data[f"w_{i}"] for i in range(config.order)]
    return IgtModel(config, weights)


def model_to_bytes(model: IgtModel) -> bytes:
    buf = io.BytesIO()
    save_model(model, buf)
    return buf.getvalue()
