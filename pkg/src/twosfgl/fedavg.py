"""Stage 2: synchronous federated averaging over per-client GNNs.

Each round the server broadcasts the global weights, every client runs its
local full-batch optimizer step(s) on its own graph and train mask, and the
server takes the sample-count-weighted average of the returned weights.
Adam moment state stays on the client and is never averaged.  One round
corresponds to one training epoch.
"""

from dataclasses import dataclass

import numpy as np

from .data import ClientGraph, SplitAssignment
from .gnn import (AdamState, ModelParams, adam_step, gcn_forward, init_adam,
                  init_params, loss_and_grads, node_order,
                  normalized_adjacency, sage_forward, softmax)
from .metrics import (METRIC_NAMES, EvalResult, RoundHistory, accuracy, auc,
                      gmean, macro_f1)
from .seeding import derive_seed

__all__ = [
    "ClientState",
    "FederationConfig",
    "make_client",
    "aggregate",
    "local_steps",
    "federated_round",
    "evaluate_global",
    "train_federation",
]

DEFAULT_FANOUT = 5


@dataclass
class ClientState:
    """One participant: its graph view, split, weights, and optimizer."""

    client_id: str
    graph: ClientGraph
    split: SplitAssignment
    params: ModelParams
    adam: AdamState
    sample_count: int
    features: np.ndarray = None          # rows aligned with node order
    labels: np.ndarray = None
    train_mask: np.ndarray = None
    test_mask: np.ndarray = None
    adjacency: object = None             # cached for gcn
    fanout: int = DEFAULT_FANOUT


@dataclass(frozen=True)
class FederationConfig:
    rounds: int = 100
    local_steps: int = 1
    arm: str = "2sfgl"

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.local_steps < 0:
            raise ValueError("local_steps must be >= 0")


def make_client(client_id: str, graph: ClientGraph, split: SplitAssignment,
                arch: str, features: np.ndarray, seed: int,
                params: ModelParams | None = None,
                fanout: int = DEFAULT_FANOUT, lr: float = 0.005) -> ClientState:
    """Assemble a ClientState with arrays aligned to the graph's node order.

    ``features`` is indexed by node id over the full node table (already
    standardized by the caller); labels come from the graph's node table.
    """
    nodes = node_order(graph)
    feats = np.asarray(features, dtype=np.float64)[nodes]
    labels = graph.node_ref.labels[nodes]
    positions = {v: i for i, v in enumerate(nodes)}
    train_mask = np.zeros(len(nodes), dtype=bool)
    test_mask = np.zeros(len(nodes), dtype=bool)
    for v in split.train_ids:
        train_mask[positions[v]] = True
    for v in split.test_ids:
        test_mask[positions[v]] = True
    if not train_mask.any():
        raise ValueError(f"client {client_id!r} has an empty train mask")
    if params is None:
        params = init_params(arch, feats.shape[1], seed=derive_seed(seed, "init"))
    adjacency = normalized_adjacency(graph) if arch == "gcn" else None
    return ClientState(
        client_id=client_id, graph=graph, split=split, params=params,
        adam=init_adam(params, lr=lr), sample_count=int(train_mask.sum()),
        features=feats, labels=labels, train_mask=train_mask,
        test_mask=test_mask, adjacency=adjacency, fanout=fanout)


def aggregate(updates) -> ModelParams:
    """Sample-count-weighted average of client weights.

    Computed as W_1 plus weighted deviations from W_1, which is algebraically
    the convex combination but stays bit-exact when every update is
    identical (and trivially for a single client).
    """
    updates = list(updates)
    if not updates:
        raise ValueError("aggregate requires at least one update")
    total = sum(count for _, count in updates)
    base, _ = updates[0]
    for params, _ in updates[1:]:
        if params.W1.shape != base.W1.shape or params.W2.shape != base.W2.shape:
            raise ValueError("client parameter shapes do not match")
        if params.arch != base.arch:
            raise ValueError("client architectures do not match")
    w1 = base.W1.copy()
    w2 = base.W2.copy()
    for params, count in updates[1:]:
        alpha = count / total
        w1 += alpha * (params.W1 - base.W1)
        w2 += alpha * (params.W2 - base.W2)
    return ModelParams(arch=base.arch, W1=w1, W2=w2)


def _client_forward(client: ClientState, params: ModelParams, seed: int):
    if params.arch == "gcn":
        return gcn_forward(params, client.adjacency, client.features)
    return sage_forward(params, client.graph, client.features,
                        fanout=client.fanout, seed=seed)


def local_steps(client: ClientState, global_params: ModelParams,
                round_seed: int, steps: int) -> float:
    """Adopt the global weights, run the local optimizer steps, return the
    last train loss (nan when steps == 0)."""
    client.params = global_params
    loss = float("nan")
    for step in range(steps):
        _, cache = _client_forward(
            client, client.params,
            seed=derive_seed(round_seed, client.client_id, step))
        loss, grads = loss_and_grads(client.params, cache, client.labels,
                                     client.train_mask)
        client.params, client.adam = adam_step(client.params, grads, client.adam)
    return loss


def federated_round(clients, global_params: ModelParams, round_seed: int,
                    steps: int = 1):
    """Broadcast, local steps, aggregate.  Returns (new global, train losses)."""
    if not clients:
        raise ValueError("federated_round requires at least one client")
    losses = []
    for client in clients:
        try:
            losses.append(local_steps(client, global_params, round_seed, steps))
        except Exception as exc:
            raise RuntimeError(f"client {client.client_id!r}: {exc}") from exc
    new_global = aggregate([(c.params, c.sample_count) for c in clients])
    return new_global, losses


def evaluate_global(clients, params: ModelParams, eval_graphs=None,
                    eval_adjacencies=None, seed: int = 0) -> dict:
    """Mean of each metric over the clients' test masks.

    By default each client is evaluated on its own training graph; explicit
    eval graphs (with matching adjacencies for gcn) override that.
    """
    per_metric = {name: [] for name in METRIC_NAMES}
    fns = {"accuracy": accuracy, "macro_f1": macro_f1, "auc": auc, "gmean": gmean}
    for idx, client in enumerate(clients):
        if eval_graphs is None:
            graph, adjacency = client.graph, client.adjacency
        else:
            graph = eval_graphs[idx]
            adjacency = eval_adjacencies[idx] if eval_adjacencies else None
        if params.arch == "gcn":
            logits, _ = gcn_forward(params, adjacency, client.features)
        else:
            logits, _ = sage_forward(
                params, graph, client.features, fanout=client.fanout,
                seed=derive_seed(seed, "eval", client.client_id))
        scores = softmax(logits)[:, 1]
        result = EvalResult.from_scores(
            scores[client.test_mask], client.labels[client.test_mask])
        for name in METRIC_NAMES:
            per_metric[name].append(fns[name](result))
    return {name: float(np.mean(values)) for name, values in per_metric.items()}


def train_federation(clients, cfg: FederationConfig, eval_graphs=None,
                     seed: int = 0) -> RoundHistory:
    """Run the configured number of rounds and record global test metrics.

    All clients participate every round.  Per-client Adam state persists
    across rounds; only the weights are averaged.  Deterministic for a fixed
    seed and client list.
    """
    clients = list(clients)
    if not clients:
        raise ValueError("train_federation requires at least one client")
    global_params = clients[0].params.copy()
    eval_adjacencies = None
    if eval_graphs is not None and global_params.arch == "gcn":
        eval_adjacencies = [normalized_adjacency(g) for g in eval_graphs]

    history = RoundHistory()
    for round_index in range(1, cfg.rounds + 1):
        round_seed = derive_seed(seed, "round", round_index)
        global_params, _ = federated_round(clients, global_params, round_seed,
                                           steps=cfg.local_steps)
        scores = evaluate_global(clients, global_params, eval_graphs,
                                 eval_adjacencies,
                                 seed=derive_seed(seed, "round-eval", round_index))
        for name in METRIC_NAMES:
            history.append(round_index, cfg.arm, name, scores[name])
    return history
