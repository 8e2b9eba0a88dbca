"""Converter for the Planetoid citation-dataset distribution.

The upstream format ships eight files per dataset, ``ind.<name>.{x, y, tx,
ty, allx, ally, graph, test.index}``: pickled scipy sparse matrices and
one-hot label arrays written by Python 2, a pickled adjacency dictionary, and
a plain-text list of test indices. Feature rows are reassembled in upstream
node order (allx stacked with tx, test rows permuted to their positions from
test.index) so the predefined split indices stay valid.

Citeseer ships a handful of test nodes that appear in no edge and are missing
from test.index; their feature/label rows are zero-filled and the nodes are
retained as isolated, matching the established preprocessing.
"""

import os
import pickle
from dataclasses import dataclass

import numpy as np
from scipy import sparse

# name -> (nodes, upstream directed edge count, classes, features)
KNOWN_STATS = {
    "cora": (2708, 5429, 7, 1433),
    "citeseer": (3327, 4732, 6, 3703),
    "pubmed": (19717, 44338, 3, 500),
}

_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")


class ConversionError(Exception):
    """Source files inconsistent with each other or with known statistics."""


@dataclass
class ConversionSummary:
    name: str
    nodes: int
    undirected_edges: int
    raw_adjacency_entries: int
    classes: int
    feature_width: int
    train_size: int
    val_size: int
    test_size: int
    isolated_filled: int


def _load_pickle(path):
    with open(path, "rb") as fh:
        return pickle.load(fh, encoding="latin1")


def _as_dense(m) -> np.ndarray:
    if sparse.issparse(m):
        return np.asarray(m.todense(), dtype=np.float64)
    return np.asarray(m, dtype=np.float64)


def load_planetoid_source(src_dir: str, name: str) -> dict:
    files = {part: os.path.join(src_dir, f"ind.{name}.{part}") for part in _PARTS}
    files["test.index"] = os.path.join(src_dir, f"ind.{name}.test.index")
    missing = [os.path.basename(p) for p in files.values() if not os.path.exists(p)]
    if missing:
        raise ConversionError(
            f"source directory {src_dir!r} is missing {missing}; expected the "
            f"eight standard files ind.{name}.*"
        )
    out = {part: _load_pickle(files[part]) for part in _PARTS}
    out["test.index"] = np.loadtxt(files["test.index"], dtype=np.int64, ndmin=1)
    return out


def assemble(parts: dict) -> tuple[np.ndarray, np.ndarray, dict, np.ndarray, int, int]:
    """Stack allx/tx into full-order features and labels.

    Returns (features, labels one-hot, graph dict, test indices sorted,
    number of zero-filled isolated test rows, allx row count).
    """
    allx = _as_dense(parts["allx"])
    tx = _as_dense(parts["tx"])
    ally = np.asarray(parts["ally"], dtype=np.float64)
    ty = np.asarray(parts["ty"], dtype=np.float64)
    test_idx = np.asarray(parts["test.index"], dtype=np.int64)
    graph = parts["graph"]

    n = len(graph)
    width = allx.shape[1]
    classes = ally.shape[1]
    full_range = np.arange(test_idx.min(), test_idx.max() + 1)
    filled = int(full_range.size - test_idx.size)

    features = np.zeros((n, width))
    labels = np.zeros((n, classes))
    features[: allx.shape[0]] = allx
    labels[: ally.shape[0]] = ally
    # test rows arrive in test.index order; place each at its graph position
    features[test_idx] = tx
    labels[test_idx] = ty
    return features, labels, graph, np.sort(test_idx), filled, allx.shape[0]


def _edges_from_graph(graph: dict) -> np.ndarray:
    pairs = set()
    raw = 0
    for node, neighbors in graph.items():
        for nb in neighbors:
            raw += 1
            if nb == node:
                continue
            pairs.add((min(node, nb), max(node, nb)))
    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    return edges, raw


def convert_planetoid(src_dir: str, name: str, out_dir: str) -> ConversionSummary:
    """Convert one dataset; validates counts for the known dataset names.

    Writes graph.txt, features.txt, labels.txt and the predefined
    split_{train,val,test}.txt (20 per class / 500 / 1000 for the known
    datasets).
    """
    parts = load_planetoid_source(src_dir, name)
    features, onehot, graph, test_idx, filled, allx_rows = assemble(parts)
    n, width = features.shape
    classes = onehot.shape[1]
    labels = np.argmax(onehot, axis=1)

    train_size = np.asarray(parts["y"]).shape[0]
    train_idx = np.arange(train_size)
    # upstream convention: validation is the next 500 allx rows after the
    # training block (capped for toy-sized sources)
    val_end = min(train_size + 500, allx_rows)
    if val_end <= train_size:
        raise ConversionError(
            f"no nodes left for a validation pool (train {train_size}, allx {allx_rows})"
        )
    val_idx = np.arange(train_size, val_end)

    if name in KNOWN_STATS:
        exp_nodes, _, exp_classes, exp_width = KNOWN_STATS[name]
        found = (n, classes, width)
        expected = (exp_nodes, exp_classes, exp_width)
        if found != expected:
            raise ConversionError(
                f"{name}: statistics mismatch, expected (nodes, classes, features) "
                f"= {expected}, found {found}"
            )
        per_class = np.bincount(labels[train_idx], minlength=classes)
        if not (per_class == train_size // classes).all():
            raise ConversionError(
                f"{name}: predefined training split is not balanced per class: "
                f"{per_class.tolist()}"
            )

    edges, raw_entries = _edges_from_graph(graph)
    if name in KNOWN_STATS:
        # published counts follow the upstream directed convention; after
        # symmetrization + dedup the undirected count sits a few percent
        # below, so compare with a 5% relative tolerance
        exp_edges = KNOWN_STATS[name][1]
        if abs(edges.shape[0] - exp_edges) > 0.05 * exp_edges:
            raise ConversionError(
                f"{name}: undirected edge count {edges.shape[0]} differs from the "
                f"documented {exp_edges} by more than 5%"
            )

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "graph.txt"), "w") as fh:
        fh.write(f"n {n}\n")
        for i, j in edges:
            fh.write(f"{i} {j}\n")
    with open(os.path.join(out_dir, "features.txt"), "w") as fh:
        for row in features:
            fh.write(" ".join(f"{v:.8g}" for v in row) + "\n")
    with open(os.path.join(out_dir, "labels.txt"), "w") as fh:
        fh.write("\n".join(str(int(v)) for v in labels) + "\n")
    for fname, idx in (
        ("split_train.txt", train_idx),
        ("split_val.txt", val_idx),
        ("split_test.txt", test_idx),
    ):
        with open(os.path.join(out_dir, fname), "w") as fh:
            fh.write("\n".join(str(int(v)) for v in idx) + "\n")

    return ConversionSummary(
        name=name,
        nodes=n,
        undirected_edges=int(edges.shape[0]),
        raw_adjacency_entries=raw_entries,
        classes=classes,
        feature_width=width,
        train_size=int(train_idx.size),
        val_size=int(val_idx.size),
        test_size=int(test_idx.size),
        isolated_filled=filled,
    )
