"""Plain-text dataset bundles: graph + features + labels + optional splits.

Expected layout inside a dataset directory:

    graph.txt        edge list, ``n <count>`` header (see graph_ops)
    features.txt     one node per line, whitespace-separated reals
    labels.txt       one integer per line
    split_train.txt  optional predefined split, one index per line
    split_val.txt
    split_test.txt
    split_train_00.txt ...  optional numbered split families (20 for WikiCS)

Known dataset names are validated against their documented statistics.
"""

import os
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graph_ops import Graph, load_graph

# name -> (nodes, edges, classes, features); edge counts follow the upstream
# (directed) convention and are informational, not validated at load time.
DATASET_STATS = {
    "cora": (2708, 5429, 7, 1433),
    "citeseer": (3327, 4732, 6, 3703),
    "pubmed": (19717, 44338, 3, 500),
    "wikics": (11701, 216123, 10, 300),
}


@dataclass
class DatasetBundle:
    name: str
    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    predefined: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    split_families: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = field(
        default_factory=list
    )

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def class_count(self) -> int:
        return int(self.labels.max()) + 1


def _read_indices(path) -> np.ndarray:
    idx = np.loadtxt(path, dtype=np.int64, ndmin=1)
    return np.asarray(idx, dtype=np.int64)


def load_dataset(directory) -> DatasetBundle:
    """Load and cross-validate one dataset directory."""
    directory = os.fspath(directory)
    name = os.path.basename(os.path.normpath(directory)).lower()
    required = ["graph.txt", "features.txt", "labels.txt"]
    missing = [f for f in required if not os.path.exists(os.path.join(directory, f))]
    if missing:
        raise DataError(
            f"dataset directory {directory!r} is missing {missing}; expected layout: "
            "graph.txt (edge list with 'n <count>' header), features.txt "
            "(whitespace-separated reals, one node per line), labels.txt "
            "(one integer per line), optional split_{train,val,test}.txt"
        )
    graph = load_graph(os.path.join(directory, "graph.txt"))
    features = np.loadtxt(os.path.join(directory, "features.txt"), dtype=np.float64, ndmin=2)
    labels = np.loadtxt(os.path.join(directory, "labels.txt"), dtype=np.int64, ndmin=1)

    if features.shape[0] != graph.n or labels.shape[0] != graph.n:
        raise DataError(
            f"count mismatch in {directory!r}: graph has {graph.n} nodes, "
            f"features {features.shape[0]} rows, labels {labels.shape[0]} entries"
        )
    if labels.min() < 0:
        raise DataError("labels must be nonnegative integers")

    if name in DATASET_STATS:
        nodes, _, classes, width = DATASET_STATS[name]
        found = (graph.n, int(labels.max()) + 1, features.shape[1])
        expected = (nodes, classes, width)
        if found != expected:
            raise DataError(
                f"dataset {name!r} statistics mismatch: expected "
                f"(nodes, classes, features) = {expected}, found {found}"
            )

    predefined = None
    triple = [os.path.join(directory, f"split_{part}.txt") for part in ("train", "val", "test")]
    if all(os.path.exists(p) for p in triple):
        predefined = tuple(_read_indices(p) for p in triple)

    families = []
    pattern = re.compile(r"split_train_(\d+)\.txt$")
    ids = sorted(
        m.group(1) for f in os.listdir(directory) if (m := pattern.match(f))
    )
    for sid in ids:
        train = _read_indices(os.path.join(directory, f"split_train_{sid}.txt"))
        val_path = os.path.join(directory, f"split_val_{sid}.txt")
        test_path = os.path.join(directory, f"split_test_{sid}.txt")
        if not os.path.exists(val_path):
            raise DataError(f"split_train_{sid}.txt present but split_val_{sid}.txt missing")
        val = _read_indices(val_path)
        if os.path.exists(test_path):
            test = _read_indices(test_path)
        elif os.path.exists(os.path.join(directory, "split_test.txt")):
            test = _read_indices(os.path.join(directory, "split_test.txt"))
        else:
            raise DataError(f"no test indices for split family {sid}")
        families.append((train, val, test))

    return DatasetBundle(name, graph, features, labels, predefined, families)
