"""From-scratch graph neural networks with manual backpropagation.

Two one-hidden-layer binary node classifiers over 64-bit floats:

* GCN:  logits = A_hat . relu(A_hat X W1) . W2, where A_hat is the
  symmetrically normalized adjacency (self-loops added, D^-1/2 A D^-1/2).
* SAGE: each node concatenates its own features with the mean of at most
  ``fanout`` sampled neighbor features, passes through a relu hidden layer,
  then a linear head.

The loss is mean softmax cross-entropy over a node mask; gradients are
analytic and verified against finite differences in the test suite.  The
optimizer is bias-corrected Adam.
"""

import struct
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .data import ClientGraph

__all__ = [
    "ModelParams",
    "AdamState",
    "ForwardCache",
    "init_params",
    "node_order",
    "normalized_adjacency",
    "gcn_forward",
    "sage_forward",
    "softmax",
    "loss_and_grads",
    "init_adam",
    "adam_step",
    "params_to_bytes",
    "params_from_bytes",
]

HIDDEN_UNITS = 64
NUM_CLASSES = 2


@dataclass
class ModelParams:
    """Dense weights of a 1-hidden-layer classifier.

    gcn:  W1 is F x hidden, W2 is hidden x 2.
    sage: W1 is 2F x hidden (self features concatenated with the neighbor
    mean), W2 is hidden x 2.
    """

    arch: str
    W1: np.ndarray
    W2: np.ndarray

    def copy(self) -> "ModelParams":
        return ModelParams(self.arch, self.W1.copy(), self.W2.copy())


@dataclass
class AdamState:
    """First/second moment accumulators plus step count."""

    m: ModelParams
    v: ModelParams
    step: int = 0
    lr: float = 0.005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class ForwardCache:
    """Activations kept from a forward pass, sufficient for backward."""

    arch: str
    adjacency: sp.csr_matrix | None   # gcn only
    inputs: np.ndarray                # gcn: X;  sage: [X || H_N]
    pre_hidden: np.ndarray            # hidden pre-activation
    hidden: np.ndarray                # relu output
    propagated_hidden: np.ndarray     # gcn: A_hat . hidden; sage: hidden
    logits: np.ndarray


def _glorot(rng, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(arch: str, feature_width: int, seed: int = 0,
                hidden: int = HIDDEN_UNITS) -> ModelParams:
    """Seeded Glorot-uniform initialization for either architecture."""
    if arch not in ("gcn", "sage"):
        raise ValueError(f"unknown architecture {arch!r}")
    rng = np.random.default_rng(seed)
    in1 = feature_width if arch == "gcn" else 2 * feature_width
    return ModelParams(
        arch=arch,
        W1=_glorot(rng, in1, hidden),
        W2=_glorot(rng, hidden, NUM_CLASSES),
    )


def node_order(graph: ClientGraph) -> list:
    """Canonical node ordering used for every matrix built from a graph."""
    return sorted(graph.vertices)


def normalized_adjacency(graph: ClientGraph) -> sp.csr_matrix:
    """Symmetrically normalized weighted adjacency with unit self-loops.

    Rows/columns follow node_order(graph).  Every diagonal degree entry is
    at least 1 (the self-loop), so the result is finite even for isolated
    vertices or zero-weight edges.
    """
    nodes = node_order(graph)
    index = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    rows, cols, vals = [], [], []
    for (u, v), w in graph.edges.items():
        rows.extend((index[u], index[v]))
        cols.extend((index[v], index[u]))
        vals.extend((w, w))
    rows.extend(range(n))
    cols.extend(range(n))
    vals.extend([1.0] * n)
    a_tilde = sp.coo_matrix((vals, (rows, cols)), shape=(n, n), dtype=np.float64)
    a_tilde = a_tilde.tocsr()
    degree = np.asarray(a_tilde.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(degree)
    d_half = sp.diags(inv_sqrt)
    return (d_half @ a_tilde @ d_half).tocsr()


def gcn_forward(params: ModelParams, adjacency: sp.csr_matrix,
                features: np.ndarray):
    """Two-propagation forward pass; returns (logits, cache)."""
    if params.arch != "gcn":
        raise ValueError("gcn_forward requires gcn params")
    features = np.asarray(features, dtype=np.float64)
    if features.shape[1] != params.W1.shape[0]:
        raise ValueError(f"feature width {features.shape[1]} does not match "
                         f"W1 rows {params.W1.shape[0]}")
    ax = adjacency @ features
    pre = ax @ params.W1
    hidden = np.maximum(pre, 0.0)
    propagated = adjacency @ hidden
    logits = propagated @ params.W2
    cache = ForwardCache(arch="gcn", adjacency=adjacency, inputs=features,
                         pre_hidden=pre, hidden=hidden,
                         propagated_hidden=propagated, logits=logits)
    return logits, cache


def sample_neighbor_means(graph: ClientGraph, features: np.ndarray,
                          fanout: int, seed: int) -> np.ndarray:
    """Mean of <= fanout sampled neighbor feature rows per node.

    Nodes with degree <= fanout use all neighbors (no replacement, no
    padding); isolated nodes get the zero vector.  Deterministic per seed.
    """
    if fanout < 1:
        raise ValueError("fanout must be >= 1")
    nodes = node_order(graph)
    index = {v: i for i, v in enumerate(nodes)}
    rng = np.random.default_rng(seed)
    out = np.zeros((len(nodes), features.shape[1]), dtype=np.float64)
    for row, v in enumerate(nodes):
        nbrs = [index[u] for u, _ in graph.neighbor_map[v]]
        if not nbrs:
            continue
        if len(nbrs) > fanout:
            picked = rng.choice(len(nbrs), size=fanout, replace=False)
            nbrs = [nbrs[i] for i in picked]
        out[row] = features[nbrs].mean(axis=0)
    return out


def sage_forward(params: ModelParams, graph: ClientGraph, features: np.ndarray,
                 fanout: int = 5, seed: int = 0):
    """Sample-and-aggregate forward pass; returns (logits, cache)."""
    if params.arch != "sage":
        raise ValueError("sage_forward requires sage params")
    features = np.asarray(features, dtype=np.float64)
    if 2 * features.shape[1] != params.W1.shape[0]:
        raise ValueError(f"feature width {features.shape[1]} does not match "
                         f"W1 rows {params.W1.shape[0]} (expected 2F)")
    neighbor_mean = sample_neighbor_means(graph, features, fanout, seed)
    concat = np.concatenate([features, neighbor_mean], axis=1)
    pre = concat @ params.W1
    hidden = np.maximum(pre, 0.0)
    logits = hidden @ params.W2
    cache = ForwardCache(arch="sage", adjacency=None, inputs=concat,
                         pre_hidden=pre, hidden=hidden,
                         propagated_hidden=hidden, logits=logits)
    return logits, cache


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def loss_and_grads(params: ModelParams, cache: ForwardCache,
                   labels: np.ndarray, mask: np.ndarray):
    """Mean softmax cross-entropy over masked nodes, with analytic grads.

    ``mask`` is a boolean vector over the cache's node rows.  Returns
    (loss, grads) with grads shaped like the params.
    """
    mask = np.asarray(mask, dtype=bool)
    n_masked = int(mask.sum())
    if n_masked == 0:
        raise ValueError("loss mask is empty")
    labels = np.asarray(labels, dtype=np.int64)
    probs = softmax(cache.logits)
    picked = probs[mask, labels[mask]]
    loss = float(-np.log(np.maximum(picked, 1e-300)).mean())

    grad_logits = np.zeros_like(cache.logits)
    grad_logits[mask] = probs[mask]
    grad_logits[mask, labels[mask]] -= 1.0
    grad_logits /= n_masked

    grad_w2 = cache.propagated_hidden.T @ grad_logits
    if cache.arch == "gcn":
        grad_hidden = cache.adjacency @ (grad_logits @ params.W2.T)
        grad_pre = grad_hidden * (cache.pre_hidden > 0)
        grad_w1 = (cache.adjacency @ cache.inputs).T @ grad_pre
    else:
        grad_hidden = grad_logits @ params.W2.T
        grad_pre = grad_hidden * (cache.pre_hidden > 0)
        grad_w1 = cache.inputs.T @ grad_pre
    return loss, ModelParams(arch=cache.arch, W1=grad_w1, W2=grad_w2)


def init_adam(params: ModelParams, lr: float = 0.005) -> AdamState:
    zeros = ModelParams(params.arch, np.zeros_like(params.W1),
                        np.zeros_like(params.W2))
    return AdamState(m=zeros, v=zeros.copy(), step=0, lr=lr)


def adam_step(params: ModelParams, grads: ModelParams, state: AdamState):
    """One bias-corrected Adam update; returns new (params, state)."""
    if params.W1.shape != grads.W1.shape or params.W2.shape != grads.W2.shape:
        raise ValueError("gradient shapes do not match parameter shapes")
    t = state.step + 1
    new_w, new_m, new_v = {}, {}, {}
    for name in ("W1", "W2"):
        w = getattr(params, name)
        g = getattr(grads, name)
        m = state.beta1 * getattr(state.m, name) + (1.0 - state.beta1) * g
        v = state.beta2 * getattr(state.v, name) + (1.0 - state.beta2) * g * g
        m_hat = m / (1.0 - state.beta1 ** t)
        v_hat = v / (1.0 - state.beta2 ** t)
        new_w[name] = w - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        new_m[name] = m
        new_v[name] = v
    new_params = ModelParams(params.arch, new_w["W1"], new_w["W2"])
    new_state = AdamState(
        m=ModelParams(params.arch, new_m["W1"], new_m["W2"]),
        v=ModelParams(params.arch, new_v["W1"], new_v["W2"]),
        step=t, lr=state.lr, beta1=state.beta1, beta2=state.beta2, eps=state.eps)
    return new_params, new_state


_ARCH_CODES = {"gcn": b"GCN ", "sage": b"SAGE"}


def params_to_bytes(params: ModelParams) -> bytes:
    """Flat binary layout: arch tag, matrix count, then per-matrix
    (rows, cols, row-major float64 data)."""
    out = [_ARCH_CODES[params.arch], struct.pack("<I", 2)]
    for mat in (params.W1, params.W2):
        out.append(struct.pack("<II", *mat.shape))
        out.append(np.ascontiguousarray(mat, dtype=np.float64).tobytes())
    return b"".join(out)


def params_from_bytes(blob: bytes) -> ModelParams:
    codes = {v: k for k, v in _ARCH_CODES.items()}
    arch = codes.get(blob[:4])
    if arch is None:
        raise ValueError("unrecognized architecture tag in parameter blob")
    (count,) = struct.unpack_from("<I", blob, 4)
    if count != 2:
        raise ValueError(f"expected 2 matrices, found {count}")
    offset = 8
    mats = []
    for _ in range(count):
        rows, cols = struct.unpack_from("<II", blob, offset)
        offset += 8
        size = rows * cols * 8
        mat = np.frombuffer(blob[offset:offset + size], dtype=np.float64)
        mats.append(mat.reshape(rows, cols).copy())
        offset += size
    return ModelParams(arch=arch, W1=mats[0], W2=mats[1])
