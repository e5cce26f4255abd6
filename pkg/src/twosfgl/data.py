"""Graph data model, CSV ingestion, and the sampling/splitting protocol.

A dataset is one shared node table (features + binary labels) plus one
weighted undirected edge list per named relation.  Each relation is treated
as one party's graph in the federation experiments.

CSV contracts (UTF-8, ``#``-prefixed comment lines ignored, no header row):

* node file:      ``id,label,f0,...,f{F-1}``         (label in {0, 1})
* relation file:  ``src,dst[,weight]``               (weight defaults to 1.0)

Edges are undirected and stored once under the canonical ``(min, max)`` key;
duplicate rows are summed.  Self-loop rows are ignored (self-loops enter the
model only as part of adjacency normalization downstream).  Public dataset
releases must be exported to these CSVs before use; the loader reads only
this contract.
"""

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .seeding import derive_seed

__all__ = [
    "NodeTable",
    "ClientGraph",
    "MultiRelationDataset",
    "SplitAssignment",
    "DatasetFormatError",
    "load_dataset",
    "load_node_table",
    "load_relation",
    "write_node_table",
    "write_relation",
    "balance_sample",
    "stratified_split",
    "incident_sum",
    "incident_sums",
    "zscore_features",
]


class DatasetFormatError(ValueError):
    """Raised when an ingested CSV violates the dataset contract."""


@dataclass(eq=False)
class NodeTable:
    """Shared node store: dense ids [0, N), feature matrix, binary labels."""

    features: np.ndarray  # (N, F) float64
    labels: np.ndarray    # (N,) int64, values in {0, 1}

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise DatasetFormatError("features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise DatasetFormatError("labels must have one entry per node")
        bad = ~np.isin(self.labels, (0, 1))
        if bad.any():
            raise DatasetFormatError(
                f"non-binary label for node id {int(np.flatnonzero(bad)[0])}"
            )

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def feature_width(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class ClientGraph:
    """One party's view: a vertex set and a weighted undirected edge map.

    Edge keys are canonical ``(u, v)`` with ``u < v``; weights are
    nonnegative.  Instances are immutable after construction and safe to
    share across workers.
    """

    relation_name: str
    vertices: frozenset
    edges: dict            # (u, v) with u < v -> weight
    node_ref: NodeTable | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        for (u, v), w in self.edges.items():
            if u >= v:
                raise ValueError(f"edge key ({u}, {v}) is not canonical (u < v)")
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge ({u}, {v}) has endpoint outside the vertex set")
            if w < 0:
                raise ValueError(f"edge ({u}, {v}) has negative weight {w}")

    def edge_weight(self, u, v) -> float:
        """Weight of the undirected edge {u, v}, 0.0 if absent."""
        if u > v:
            u, v = v, u
        return self.edges.get((u, v), 0.0)

    @cached_property
    def neighbor_map(self) -> dict:
        """vertex -> sorted list of (neighbor, weight) pairs."""
        nbrs = {v: [] for v in self.vertices}
        for (u, v), w in self.edges.items():
            nbrs[u].append((v, w))
            nbrs[v].append((u, w))
        for v in nbrs:
            nbrs[v].sort()
        return nbrs


@dataclass
class MultiRelationDataset:
    """One node table plus one ClientGraph per named relation."""

    nodes: NodeTable
    relations: dict  # name -> ClientGraph


@dataclass(frozen=True)
class SplitAssignment:
    """Disjoint train/test node-id sets produced by stratified_split."""

    train_ids: frozenset
    test_ids: frozenset
    seed: int

    def __post_init__(self):
        if self.train_ids & self.test_ids:
            raise ValueError("train and test sets overlap")


def _data_rows(path):
    """Yield (line_number, [fields]) for non-comment, non-blank CSV lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, [f.strip() for f in line.split(",")]


def load_node_table(path) -> NodeTable:
    """Load a node CSV (``id,label,f0,...``) into a NodeTable.

    Ids must be exactly 0..N-1 (any row order); all rows must share one
    feature width; labels must be 0 or 1.
    """
    rows = {}
    width = None
    for lineno, fields in _data_rows(path):
        if len(fields) < 3:
            raise DatasetFormatError(f"{path}:{lineno}: expected id,label,f0,... "
                                     f"got {len(fields)} fields")
        try:
            nid = int(fields[0])
            label = int(fields[1])
            feats = [float(f) for f in fields[2:]]
        except ValueError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: malformed row ({exc})") from None
        if label not in (0, 1):
            raise DatasetFormatError(f"{path}:{lineno}: non-binary label {label} "
                                     f"for node id {nid}")
        if width is None:
            width = len(feats)
        elif len(feats) != width:
            raise DatasetFormatError(f"{path}:{lineno}: feature width {len(feats)} "
                                     f"differs from {width}")
        if nid in rows:
            raise DatasetFormatError(f"{path}:{lineno}: duplicate node id {nid}")
        rows[nid] = (label, feats)
    if not rows:
        raise DatasetFormatError(f"{path}: no node rows")
    n = len(rows)
    if set(rows) != set(range(n)):
        missing = sorted(set(range(n)) - set(rows))[:1]
        raise DatasetFormatError(f"{path}: node ids are not contiguous 0..{n - 1}"
                                 + (f" (missing id {missing[0]})" if missing else ""))
    features = np.array([rows[i][1] for i in range(n)], dtype=np.float64)
    labels = np.array([rows[i][0] for i in range(n)], dtype=np.int64)
    return NodeTable(features=features, labels=labels)


def load_relation(path, name: str, nodes: NodeTable) -> ClientGraph:
    """Load a relation CSV (``src,dst[,weight]``) against a node table.

    Duplicate rows (either orientation) are summed; self-loop rows are
    ignored; endpoints must be valid node ids.
    """
    edges = {}
    n = nodes.num_nodes
    for lineno, fields in _data_rows(path):
        if len(fields) not in (2, 3):
            raise DatasetFormatError(f"{path}:{lineno}: expected src,dst[,weight], "
                                     f"got {len(fields)} fields")
        try:
            u = int(fields[0])
            v = int(fields[1])
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: malformed row ({exc})") from None
        for endpoint in (u, v):
            if not 0 <= endpoint < n:
                raise DatasetFormatError(f"{path}:{lineno}: dangling endpoint id "
                                         f"{endpoint} (node table has {n} nodes)")
        if w < 0:
            raise DatasetFormatError(f"{path}:{lineno}: negative weight {w}")
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        edges[key] = edges.get(key, 0.0) + w
    return ClientGraph(
        relation_name=name,
        vertices=frozenset(range(n)),
        edges=edges,
        node_ref=nodes,
    )


def load_dataset(node_path, relation_paths: dict) -> MultiRelationDataset:
    """Load a node CSV plus one relation CSV per name."""
    nodes = load_node_table(node_path)
    relations = {
        name: load_relation(path, name, nodes)
        for name, path in relation_paths.items()
    }
    return MultiRelationDataset(nodes=nodes, relations=relations)


def write_node_table(nodes: NodeTable, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# id,label,f0,...\n")
        for i in range(nodes.num_nodes):
            feats = ",".join(repr(float(x)) for x in nodes.features[i])
            fh.write(f"{i},{int(nodes.labels[i])},{feats}\n")


def write_relation(graph: ClientGraph, path) -> None:
    """Write a graph's edges in the relation CSV contract (sorted keys)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# src,dst,weight\n")
        for (u, v) in sorted(graph.edges):
            fh.write(f"{u},{v},{repr(float(graph.edges[(u, v)]))}\n")


def balance_sample(labels, ratio_low: float = 0.5, ratio_high: float = 2.0,
                   seed: int = 0) -> set:
    """Select node ids so the positive/negative ratio lies in [low, high].

    When the full data is already in range, everything is kept.  Otherwise
    the majority class is uniformly undersampled without replacement to the
    nearest ratio bound.  Deterministic for a fixed seed.
    """
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("balance_sample requires both classes nonempty")
    ratio = len(pos) / len(neg)
    rng = np.random.default_rng(seed)
    if ratio < ratio_low:
        # too many negatives: keep at most pos/ratio_low of them
        keep = int(len(pos) / ratio_low)
        neg = np.sort(rng.choice(neg, size=keep, replace=False))
    elif ratio > ratio_high:
        keep = int(ratio_high * len(neg))
        pos = np.sort(rng.choice(pos, size=keep, replace=False))
    return set(int(i) for i in pos) | set(int(i) for i in neg)


def stratified_split(sampled_ids, labels, train_frac: float = 0.6,
                     seed: int = 0) -> SplitAssignment:
    """Split sampled ids per class into train/test at train_frac.

    The fractional node of each class rounds toward train.  Train and test
    are disjoint and together cover the sampled set exactly.
    """
    sampled = sorted(sampled_ids)
    if not sampled:
        raise ValueError("stratified_split requires a nonempty sample")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in (0, 1):
        members = np.array([i for i in sampled if labels[i] == cls], dtype=np.int64)
        if len(members) == 0:
            continue
        rng.shuffle(members)
        n_test = int(len(members) * (1.0 - train_frac))
        test.extend(int(i) for i in members[:n_test])
        train.extend(int(i) for i in members[n_test:])
    return SplitAssignment(
        train_ids=frozenset(train), test_ids=frozenset(test), seed=seed
    )


def incident_sum(graph: ClientGraph, v) -> float:
    """Sum of the weights of all edges incident to v (0.0 if isolated)."""
    if v not in graph.vertices:
        raise ValueError(f"vertex {v} not in graph {graph.relation_name!r}")
    return sum(w for _, w in graph.neighbor_map[v])


def incident_sums(graph: ClientGraph) -> dict:
    """All vertices' incident weight sums in one pass over the edges."""
    sums = dict.fromkeys(graph.vertices, 0.0)
    for (u, v), w in graph.edges.items():
        sums[u] += w
        sums[v] += w
    return sums


def zscore_features(features: np.ndarray, train_ids) -> np.ndarray:
    """Standardize each feature dimension using train-split statistics.

    Dimensions that are constant on the train split map to 0 everywhere.
    """
    features = np.asarray(features, dtype=np.float64)
    train_idx = np.array(sorted(train_ids), dtype=np.int64)
    mean = features[train_idx].mean(axis=0)
    std = features[train_idx].std(axis=0)
    out = np.zeros_like(features)
    nonconst = std > 0
    out[:, nonconst] = (features[:, nonconst] - mean[nonconst]) / std[nonconst]
    return out


def split_seed(master_seed: int) -> int:
    """Seed for the train/test split, derived from the experiment seed."""
    return derive_seed(master_seed, "split")


def sample_seed(master_seed: int) -> int:
    """Seed for class-balance sampling, derived from the experiment seed."""
    return derive_seed(master_seed, "sample")
