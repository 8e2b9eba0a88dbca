"""Converter for the WikiCS JSON distribution.

One JSON file holds features, labels, adjacency lists, 20 canonical
train/val/stopping masks and a single test mask. The canonical splits are
emitted as numbered index files (split_train_00.txt ... split_val_19.txt)
plus the shared split_test.txt.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .planetoid import ConversionError

EXPECTED = {"nodes": 11701, "classes": 10, "features": 300, "splits": 20}


@dataclass
class WikiCsSummary:
    nodes: int
    undirected_edges: int
    classes: int
    feature_width: int
    split_count: int
    test_size: int


def convert_wikics(json_path: str, out_dir: str, validate: bool = True) -> WikiCsSummary:
    with open(json_path) as fh:
        data = json.load(fh)
    for key in ("features", "labels", "links", "train_masks", "val_masks", "test_mask"):
        if key not in data:
            raise ConversionError(f"WikiCS JSON is missing the {key!r} field")

    features = np.asarray(data["features"], dtype=np.float64)
    labels = np.asarray(data["labels"], dtype=np.int64)
    links = data["links"]
    n = features.shape[0]
    if labels.shape[0] != n or len(links) != n:
        raise ConversionError(
            f"inconsistent node counts: features {n}, labels {labels.shape[0]}, "
            f"links {len(links)}"
        )
    classes = int(labels.max()) + 1
    split_count = len(data["train_masks"])

    if validate:
        found = {
            "nodes": n,
            "classes": classes,
            "features": features.shape[1],
            "splits": split_count,
        }
        bad = {k: (EXPECTED[k], found[k]) for k in EXPECTED if EXPECTED[k] != found[k]}
        if bad:
            raise ConversionError(f"WikiCS schema mismatch (expected, found): {bad}")

    pairs = set()
    for node, neighbors in enumerate(links):
        for nb in neighbors:
            if nb != node:
                pairs.add((min(node, nb), max(node, nb)))
    edges = sorted(pairs)

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

    def write_indices(fname, mask):
        idx = np.nonzero(np.asarray(mask, dtype=bool))[0]
        with open(os.path.join(out_dir, fname), "w") as fh:
            fh.write("\n".join(str(int(v)) for v in idx) + "\n")
        return idx

    for s, (train_mask, val_mask) in enumerate(zip(data["train_masks"], data["val_masks"])):
        t = write_indices(f"split_train_{s:02d}.txt", train_mask)
        v = write_indices(f"split_val_{s:02d}.txt", val_mask)
        if np.intersect1d(t, v).size:
            raise ConversionError(f"split {s}: train and validation masks overlap")
    test_idx = write_indices("split_test.txt", data["test_mask"])

    return WikiCsSummary(
        nodes=n,
        undirected_edges=len(edges),
        classes=classes,
        feature_width=features.shape[1],
        split_count=split_count,
        test_size=int(test_idx.size),
    )
