"""Desk-scale synthetic multi-relation fraud datasets.

Each relation is a planted-partition graph: a randomly chosen subset of the
fraud nodes forms a dense block (the part of the fraud ring this relation
observes), over sparse background edges among all nodes.  The background is
drawn once per dataset and shared by every relation — all parties watch the
same population-level activity — while the fraud blocks are per-relation
slices, so no single relation sees the whole ring and fusing the relations
is genuinely informative.  Features are Gaussian with a class-dependent mean
shift.  Output is written in the dataset CSV contract and is byte-identical
for a fixed seed.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeding import derive_seed

__all__ = ["SyntheticSpec", "generate_synthetic"]


@dataclass(frozen=True)
class SyntheticSpec:
    nodes: int = 1000
    fraud_fraction: float = 0.3
    relations: int = 3
    intra_p: float = 0.06        # edge probability inside the observed fraud block
    inter_p: float = 0.005       # background edge probability everywhere else
    features: int = 8
    class_sep: float = 0.5       # mean shift between classes, in std units
    coverage: float = 0.6        # fraction of fraud nodes each relation observes

    def __post_init__(self):
        if self.nodes < 10:
            raise ValueError("need at least 10 nodes")
        if not 0.0 < self.fraud_fraction < 1.0:
            raise ValueError("fraud_fraction must be in (0, 1)")
        if self.relations < 1:
            raise ValueError("need at least one relation")
        for name in ("intra_p", "inter_p", "coverage"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.features < 1:
            raise ValueError("need at least one feature dimension")

    def relation_names(self) -> list:
        return [f"rel{k}" for k in range(self.relations)]


def _sample_pairs(rng, candidates: list, p: float) -> set:
    """Bernoulli(p) over a list of candidate pairs, drawn as a batch."""
    if not candidates or p <= 0.0:
        return set()
    if p >= 1.0:
        return set(candidates)
    count = rng.binomial(len(candidates), p)
    picked = rng.choice(len(candidates), size=count, replace=False)
    return {candidates[i] for i in picked}


def _all_pairs(n: int) -> list:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def generate_synthetic(spec: SyntheticSpec, seed: int, out_dir):
    """Write a synthetic dataset to out_dir; returns (node_path, relation_paths).

    Files follow the ingestion CSV contract (relation rows omit the weight
    column, so every edge loads at the default weight 1.0).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = spec.nodes
    n_fraud = max(1, round(spec.fraud_fraction * n))

    rng = np.random.default_rng(derive_seed(seed, "synth-nodes"))
    fraud_ids = np.sort(rng.choice(n, size=n_fraud, replace=False))
    labels = np.zeros(n, dtype=np.int64)
    labels[fraud_ids] = 1

    features = rng.standard_normal((n, spec.features))
    shift = spec.class_sep / math.sqrt(spec.features)
    features[labels == 1] += shift

    node_path = out_dir / "nodes.csv"
    with open(node_path, "w", encoding="utf-8") as fh:
        fh.write("# id,label,f0,...\n")
        for i in range(n):
            feats = ",".join(repr(float(x)) for x in features[i])
            fh.write(f"{i},{int(labels[i])},{feats}\n")

    bg_rng = np.random.default_rng(derive_seed(seed, "synth-background"))
    background = _sample_pairs(bg_rng, _all_pairs(n), spec.inter_p)

    relation_paths = {}
    for name in spec.relation_names():
        rel_rng = np.random.default_rng(derive_seed(seed, "synth-relation", name))
        observed = rel_rng.choice(fraud_ids, size=max(2, round(spec.coverage * n_fraud)),
                                  replace=False)
        observed = np.sort(observed)
        block = [(int(u), int(v))
                 for idx, u in enumerate(observed) for v in observed[idx + 1:]]
        edges = _sample_pairs(rel_rng, block, spec.intra_p)
        block_set = set(block)
        edges |= {pair for pair in background if pair not in block_set}

        path = out_dir / f"{name}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# src,dst\n")
            for u, v in sorted(edges):
                fh.write(f"{u},{v}\n")
        relation_paths[name] = path
    return node_path, relation_paths
