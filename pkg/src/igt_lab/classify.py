"""Shallow supervised heads over frozen features, plus a small GCN baseline.

Two heads (linear, one-hidden-layer MLP) and a two-hidden-layer graph
convolutional network, all trained full batch with Adam on softmax
cross-entropy and early stopping on validation accuracy. Gradients are
hand-derived for the three fixed architectures; there is no autograd. The
finite-difference tests in the suite hold these derivations to 1e-4.

Conventions: the l2 penalty applies to weight matrices only (not biases) and
only where requested; dropout uses inverted scaling at train time so
inference needs no rescaling; prediction ties break toward the smaller class
index (argmax).
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .graph_ops import Graph, normalize_adjacency
from .numerics import spmm

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainSpec:
    """Optimizer and regularization settings for one supervised fit.

    ``early_stopping = False`` trains the full budget and keeps the final
    parameters (the synthetic-comparison protocol); the default monitors
    validation accuracy with the stated patience and restores the best epoch.
    """

    learning_rate: float = 0.01
    max_epochs: int = 200
    patience: int = 30
    dropout: float = 0.0
    l2: float = 0.0
    hidden_width: int = 128
    seed: int = 0
    early_stopping: bool = True

    def __post_init__(self):
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.l2 < 0:
            raise ValueError("l2 penalty must be nonnegative")


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint train/validation/test index sets."""

    mode: str
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    seed: int = 0

    def __post_init__(self):
        sets = [set(self.train.tolist()), set(self.val.tolist()), set(self.test.tolist())]
        if (sets[0] & sets[1]) or (sets[0] & sets[2]) or (sets[1] & sets[2]):
            raise ValueError("train/val/test index sets must be disjoint")

    def validate(self, n: int) -> None:
        for name, idx in (("train", self.train), ("val", self.val), ("test", self.test)):
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise ValueError(f"{name} indices out of range for n={n}")


@dataclass
class HeadModel:
    """Fitted head: weight/bias stacks plus the shapes they commit to."""

    kind: str
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    input_width: int
    class_count: int
    dropout: float = 0.0


def make_splits(
    n: int,
    labels: np.ndarray,
    mode: str,
    seed: int = 0,
    predefined: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
    per_class: int = 20,
    val_size: int = 500,
    test_size: int = 1000,
) -> SplitSpec:
    """Build the three standard split modes.

    ``random`` samples ``per_class`` training nodes per class plus disjoint
    validation and test pools; ``full`` keeps everything outside those pools
    as training data; ``predefined`` wraps index sets loaded from disk.
    """
    labels = np.asarray(labels)
    if mode == "predefined":
        if predefined is None:
            raise ValueError("predefined mode needs the loaded index files")
        spec = SplitSpec(mode, *[np.asarray(ix, dtype=np.int64) for ix in predefined], seed=seed)
        spec.validate(n)
        return spec
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    if mode == "random":
        classes = np.unique(labels)
        train = []
        for c in classes:
            pool = perm[labels[perm] == c]
            if pool.size < per_class:
                raise ValueError(
                    f"class {c} has only {pool.size} nodes, need {per_class}"
                )
            train.extend(pool[:per_class].tolist())
        train = np.sort(np.asarray(train, dtype=np.int64))
        rest = perm[~np.isin(perm, train)]
        if rest.size < val_size + test_size:
            raise ValueError("not enough nodes left for validation and test pools")
        val = np.sort(rest[:val_size])
        test = np.sort(rest[val_size : val_size + test_size])
        return SplitSpec(mode, train, val, test, seed=seed)
    if mode == "full":
        if n < val_size + test_size + 1:
            raise ValueError("not enough nodes for the full-split pools")
        val = np.sort(perm[:val_size])
        test = np.sort(perm[val_size : val_size + test_size])
        train = np.sort(perm[val_size + test_size :])
        return SplitSpec(mode, train, val, test, seed=seed)
    raise ValueError(f"unknown split mode {mode!r}")


# ---------------------------------------------------------------------------
# numerics of the heads
# ---------------------------------------------------------------------------


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _xent(probs: np.ndarray, y: np.ndarray) -> float:
    eps = 1e-15
    return float(-np.mean(np.log(probs[np.arange(y.size), y] + eps)))


def _init_stack(dims: list[int], seed: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    # Gaussian fan-in scaling; zero weights would make hidden units symmetric
    rng = np.random.default_rng(seed)
    ws, bs = [], []
    for din, dout in zip(dims, dims[1:]):
        ws.append(rng.standard_normal((din, dout)) / np.sqrt(din))
        bs.append(np.zeros(dout))
    return ws, bs


def linear_loss_and_grads(ws, bs, x, y, l2):
    logits = x @ ws[0] + bs[0]
    probs = _softmax(logits)
    loss = _xent(probs, y) + l2 * float(np.sum(ws[0] ** 2))
    dlogits = probs.copy()
    dlogits[np.arange(y.size), y] -= 1.0
    dlogits /= y.size
    dw = x.T @ dlogits + 2.0 * l2 * ws[0]
    db = dlogits.sum(axis=0)
    return loss, [dw], [db]


def mlp_loss_and_grads(ws, bs, x, y, dropout_mask=None):
    z1 = x @ ws[0] + bs[0]
    a1 = np.maximum(z1, 0.0)
    if dropout_mask is not None:
        a1 = a1 * dropout_mask
    logits = a1 @ ws[1] + bs[1]
    probs = _softmax(logits)
    loss = _xent(probs, y)
    dlogits = probs.copy()
    dlogits[np.arange(y.size), y] -= 1.0
    dlogits /= y.size
    dw2 = a1.T @ dlogits
    db2 = dlogits.sum(axis=0)
    da1 = dlogits @ ws[1].T
    if dropout_mask is not None:
        da1 = da1 * dropout_mask
    dz1 = da1 * (z1 > 0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, [dw1, dw2], [db1, db2]


def gcn_loss_and_grads(ws, bs, a_norm, x, y, train_idx, l2=0.0, masks=(None, None)):
    """Two hidden graph-convolution layers plus a convolved output layer.

    ``masks`` are optional inverted-dropout masks for the two hidden
    activations; ``l2`` penalizes all three weight matrices.
    """
    m1, m2 = masks
    ax = spmm(a_norm, x)
    z1 = ax @ ws[0] + bs[0]
    h1 = np.maximum(z1, 0.0)
    if m1 is not None:
        h1 = h1 * m1
    ah1 = spmm(a_norm, h1)
    z2 = ah1 @ ws[1] + bs[1]
    h2 = np.maximum(z2, 0.0)
    if m2 is not None:
        h2 = h2 * m2
    ah2 = spmm(a_norm, h2)
    logits = ah2 @ ws[2] + bs[2]
    probs = _softmax(logits[train_idx])
    loss = _xent(probs, y) + l2 * float(sum(np.sum(w * w) for w in ws))
    dlogits = np.zeros_like(logits)
    dlogits[train_idx] = probs
    dlogits[train_idx, y] -= 1.0
    dlogits[train_idx] /= y.size
    dw3 = ah2.T @ dlogits + 2.0 * l2 * ws[2]
    db3 = dlogits.sum(axis=0)
    dh2 = spmm(a_norm, dlogits @ ws[2].T)  # a_norm is symmetric
    if m2 is not None:
        dh2 = dh2 * m2
    dz2 = dh2 * (z2 > 0)
    dw2 = ah1.T @ dz2 + 2.0 * l2 * ws[1]
    db2 = dz2.sum(axis=0)
    dh1 = spmm(a_norm, dz2 @ ws[1].T)
    if m1 is not None:
        dh1 = dh1 * m1
    dz1 = dh1 * (z1 > 0)
    dw1 = ax.T @ dz1 + 2.0 * l2 * ws[0]
    db1 = dz1.sum(axis=0)
    return loss, [dw1, dw2, dw3], [db1, db2, db3]


def gcn_logits(ws, bs, a_norm, x):
    h = np.maximum(spmm(a_norm, x) @ ws[0] + bs[0], 0.0)
    h = np.maximum(spmm(a_norm, h) @ ws[1] + bs[1], 0.0)
    return spmm(a_norm, h) @ ws[2] + bs[2]


def head_logits(model: HeadModel, x: np.ndarray) -> np.ndarray:
    if x.shape[1] != model.input_width:
        raise ShapeError(
            f"model expects width {model.input_width}, got {x.shape[1]}",
            left=model.input_width,
            right=x.shape,
        )
    if model.kind == "linear":
        return x @ model.weights[0] + model.biases[0]
    if model.kind == "mlp":
        h = np.maximum(x @ model.weights[0] + model.biases[0], 0.0)
        return h @ model.weights[1] + model.biases[1]
    raise ValueError(f"unknown head kind {model.kind!r}")


def predict(model: HeadModel, x: np.ndarray) -> np.ndarray:
    """Argmax over logits; ties resolve to the smaller class index."""
    return np.argmax(head_logits(model, x), axis=1)


def accuracy(pred: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(pred == labels)) if pred.size else 0.0


class _Adam:
    def __init__(self, shapes, lr):
        self.lr = lr
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params, grads):
        self.t += 1
        out = []
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = ADAM_BETA1 * self.m[i] + (1 - ADAM_BETA1) * g
            self.v[i] = ADAM_BETA2 * self.v[i] + (1 - ADAM_BETA2) * g * g
            mh = self.m[i] / (1 - ADAM_BETA1**self.t)
            vh = self.v[i] / (1 - ADAM_BETA2**self.t)
            out.append(p - self.lr * mh / (np.sqrt(vh) + ADAM_EPS))
        return out


def _check_labels(labels: np.ndarray, class_count: int) -> None:
    if labels.size == 0:
        raise ValueError("empty training split")
    if labels.min() < 0 or labels.max() >= class_count:
        raise ValueError(
            f"labels must lie in 0..{class_count - 1}, got range "
            f"[{labels.min()}, {labels.max()}]"
        )


def train_head(
    features: np.ndarray,
    labels: np.ndarray,
    split: SplitSpec,
    spec: TrainSpec,
    kind: str = "mlp",
) -> tuple[HeadModel, dict]:
    """Fit a linear or MLP head on the training rows of standardized features.

    Full-batch Adam; the l2 penalty applies to the linear head only; dropout
    masks hit the MLP hidden layer during training only. The parameters with
    the best validation accuracy (ties: lower validation loss) are restored
    at the end. Deterministic given ``spec.seed``.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    split.validate(features.shape[0])
    if split.train.size == 0:
        raise ValueError("empty training split")
    class_count = int(labels.max()) + 1
    _check_labels(labels[split.train], class_count)

    started = time.perf_counter()
    x_tr = features[split.train]
    y_tr = labels[split.train]
    x_val = features[split.val]
    y_val = labels[split.val]

    if kind == "linear":
        dims = [features.shape[1], class_count]
    elif kind == "mlp":
        dims = [features.shape[1], spec.hidden_width, class_count]
    else:
        raise ValueError(f"unknown head kind {kind!r}")
    ws, bs = _init_stack(dims, spec.seed)
    opt = _Adam([w.shape for w in ws] + [b.shape for b in bs], spec.learning_rate)
    drop_rng = np.random.default_rng(spec.seed + 1)

    best = None
    best_key = (-1.0, -np.inf)
    patience_left = spec.patience
    history = []
    epochs_ran = 0
    for epoch in range(1, spec.max_epochs + 1):
        epochs_ran = epoch
        if kind == "linear":
            loss, dws, dbs = linear_loss_and_grads(ws, bs, x_tr, y_tr, spec.l2)
        else:
            mask = None
            if spec.dropout > 0.0:
                keep = drop_rng.random((x_tr.shape[0], spec.hidden_width)) >= spec.dropout
                mask = keep / (1.0 - spec.dropout)
            loss, dws, dbs = mlp_loss_and_grads(ws, bs, x_tr, y_tr, mask)
        history.append(loss)
        packed = opt.step(ws + bs, dws + dbs)
        ws, bs = packed[: len(ws)], packed[len(ws) :]

        model = HeadModel(kind, ws, bs, features.shape[1], class_count, spec.dropout)
        val_logits = head_logits(model, x_val) if x_val.size else np.zeros((0, class_count))
        if y_val.size:
            val_probs = _softmax(val_logits)
            val_acc = accuracy(np.argmax(val_logits, axis=1), y_val)
            val_loss = _xent(val_probs, y_val)
        else:
            val_acc, val_loss = 0.0, 0.0
        key = (val_acc, -val_loss)
        if key > best_key:
            best_key = key
            if spec.early_stopping:
                best = ([w.copy() for w in ws], [b.copy() for b in bs])
            patience_left = spec.patience
        elif spec.early_stopping:
            patience_left -= 1
            if patience_left <= 0:
                break

    if best is not None:
        ws, bs = best
    model = HeadModel(kind, ws, bs, features.shape[1], class_count, spec.dropout)
    if y_val.size:
        final_val_acc = accuracy(np.argmax(head_logits(model, x_val), axis=1), y_val)
    else:
        final_val_acc = 0.0
    test_pred = predict(model, features[split.test]) if split.test.size else np.empty(0, int)
    metrics = {
        "val_acc": final_val_acc,
        "test_acc": accuracy(test_pred, labels[split.test]),
        "epochs_ran": epochs_ran,
        "train_loss_history": history,
        "wall_seconds": time.perf_counter() - started,
    }
    return model, metrics


def gcn_baseline(
    g: Graph,
    features: np.ndarray,
    labels: np.ndarray,
    split: SplitSpec,
    spec: TrainSpec,
) -> dict:
    """Two-hidden-layer GCN trained end to end for the full epoch budget.

    Unlike the heads, the baseline runs its entire budget and reports the
    final parameters (no early stopping), matching its published training
    protocol in the synthetic comparison. ``spec.dropout`` and ``spec.l2``
    apply to the hidden activations and all weight matrices, as in the
    reference implementation of the architecture.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    split.validate(features.shape[0])
    if split.train.size == 0:
        raise ValueError("empty training split")
    class_count = int(labels.max()) + 1
    _check_labels(labels[split.train], class_count)

    started = time.perf_counter()
    a_norm = normalize_adjacency(g)
    dims = [features.shape[1], spec.hidden_width, spec.hidden_width, class_count]
    ws, bs = _init_stack(dims, spec.seed)
    opt = _Adam([w.shape for w in ws] + [b.shape for b in bs], spec.learning_rate)
    drop_rng = np.random.default_rng(spec.seed + 1)

    y_tr = labels[split.train]
    n = features.shape[0]
    history = []
    for _ in range(spec.max_epochs):
        masks = (None, None)
        if spec.dropout > 0.0:
            keep = 1.0 - spec.dropout
            masks = tuple(
                (drop_rng.random((n, spec.hidden_width)) >= spec.dropout) / keep
                for _ in range(2)
            )
        loss, dws, dbs = gcn_loss_and_grads(
            ws, bs, a_norm, features, y_tr, split.train, l2=spec.l2, masks=masks
        )
        history.append(loss)
        packed = opt.step(ws + bs, dws + dbs)
        ws, bs = packed[: len(ws)], packed[len(ws) :]

    logits = gcn_logits(ws, bs, a_norm, features)
    val_acc = (
        accuracy(np.argmax(logits[split.val], axis=1), labels[split.val])
        if split.val.size
        else 0.0
    )
    pred = np.argmax(logits[split.test], axis=1) if split.test.size else np.empty(0, int)
    return {
        "val_acc": val_acc,
        "test_acc": accuracy(pred, labels[split.test]),
        "epochs_ran": spec.max_epochs,
        "train_loss_history": history,
        "wall_seconds": time.perf_counter() - started,
    }
