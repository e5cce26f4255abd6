"""Stage 1: virtual fusion of party graphs over privately-intersected vertices.

For every ordered pair of clients (sender, receiver) the sender normalizes
each edge between common vertices by the source vertex's incident weight sum,
optionally adds implied multi-hop shares, perturbs everything with Laplace
noise, and transmits.  The receiver converts each normalized value back to an
edge weight on its own scale through a thresholded update and augments its
local graph, never losing local evidence (max rule).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .data import ClientGraph, incident_sums
from .psi import PsiBackend, psi_ddh, psi_plain
from .seeding import derive_seed

__all__ = [
    "SHARE_CLAMP_DELTA",
    "NormalizedShare",
    "FusionConfig",
    "VirtualFusedGraph",
    "normalize_edges",
    "khop_shares",
    "apply_dp",
    "update_edge",
    "fuse",
    "virtual_fusion_round",
    "write_shares",
]

# keeps normalized values strictly below 1 so the 1/(1-N) update stays finite
SHARE_CLAMP_DELTA = 1e-6


@dataclass(frozen=True)
class NormalizedShare:
    """One cross-party fusion message.

    ``value`` is the edge weight between src and dst normalized over src's
    incident edges (orientation matters), clamped to [0, 1 - delta].
    ``hops`` is 1 for a direct edge, 2 or 3 for an implied path.
    """

    src: int
    dst: int
    value: float
    hops: int = 1
    sender: str = ""


@dataclass(frozen=True)
class FusionConfig:
    """Knobs of the fusion stage.

    ``lam`` caps how much remote evidence can inflate a fused edge;
    ``dp_epsilon = inf`` turns noise off; ``psi`` selects the backend kind
    used when intersecting vertex sets ('plain' or 'ddh').
    """

    lam: float = 0.5
    hops: int = 1
    dp_epsilon: float = math.inf
    seed: int = 0
    psi: str = "plain"

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie strictly between 0 and 1")
        if self.hops not in (1, 2, 3):
            raise ValueError("hops must be 1, 2, or 3")
        if not (self.dp_epsilon > 0):
            raise ValueError("dp_epsilon must be positive (math.inf disables noise)")


@dataclass(frozen=True)
class VirtualFusedGraph(ClientGraph):
    """A client graph augmented with fused edges; tags record provenance.

    ``provenance`` maps each canonical edge key to 'local' (local evidence
    only), 'fused' (materialized from remote shares), or 'both'.
    """

    provenance: dict = field(default_factory=dict)


def _clamp(value: float) -> float:
    return min(max(value, 0.0), 1.0 - SHARE_CLAMP_DELTA)


def normalize_edges(graph: ClientGraph, common, sender: str = "") -> list:
    """Emit one share per ordered common pair (i, j) with a positive edge.

    The share value is E_ij divided by the sum of ALL edges incident to i
    (common or not); zero-weight edges emit nothing.  Values are clamped to
    [0, 1 - delta].  Output is sorted by (src, dst) for determinism.
    """
    common = set(common)
    if not common <= graph.vertices:
        raise ValueError("common vertices must be a subset of the graph's vertices")
    sums = incident_sums(graph)
    shares = []
    for i in sorted(common):
        for j, w in graph.neighbor_map[i]:
            if j in common and w > 0:
                shares.append(NormalizedShare(
                    src=i, dst=j, value=_clamp(w / sums[i]), hops=1, sender=sender))
    return shares


def khop_shares(graph: ClientGraph, common, k: int, sender: str = "") -> list:
    """Implied shares for common pairs connected only through short paths.

    For common i, j with no direct edge but some path of length h <= k
    (h = shortest such length, intermediate vertices unrestricted), the share
    value is the maximum over length-h paths of the product of per-hop
    normalized values.  Emitted in addition to the 1-hop shares.
    """
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    common = set(common)
    if not common <= graph.vertices:
        raise ValueError("common vertices must be a subset of the graph's vertices")
    sums = incident_sums(graph)
    nbrs = graph.neighbor_map

    def step(a, b, w):
        # per-hop normalized value for traversing a -> b
        return w / sums[a]

    shares = []
    for i in sorted(common):
        direct = {j for j, _ in nbrs[i]}
        best2 = {}
        for m, w1 in nbrs[i]:
            if w1 <= 0:
                continue
            n1 = step(i, m, w1)
            for j, w2 in nbrs[m]:
                if j == i or j in direct or j not in common or w2 <= 0:
                    continue
                prod = n1 * step(m, j, w2)
                if prod > best2.get(j, 0.0):
                    best2[j] = prod
        for j in sorted(best2):
            shares.append(NormalizedShare(
                src=i, dst=j, value=_clamp(best2[j]), hops=2, sender=sender))
        if k == 3:
            best3 = {}
            for m, w1 in nbrs[i]:
                if w1 <= 0:
                    continue
                n1 = step(i, m, w1)
                for m2, w2 in nbrs[m]:
                    if m2 == i or w2 <= 0:
                        continue
                    n2 = n1 * step(m, m2, w2)
                    for j, w3 in nbrs[m2]:
                        if (j == i or j == m or j in direct or j in best2
                                or j not in common or w3 <= 0):
                            continue
                        prod = n2 * step(m2, j, w3)
                        if prod > best3.get(j, 0.0):
                            best3[j] = prod
            for j in sorted(best3):
                shares.append(NormalizedShare(
                    src=i, dst=j, value=_clamp(best3[j]), hops=3, sender=sender))
    return shares


def apply_dp(shares, epsilon: float, seed: int = 0) -> list:
    """Perturb share values with Laplace noise calibrated to sensitivity 1.

    ``epsilon = inf`` returns the shares untouched.  Noisy values are clamped
    back to [0, 1 - delta].  Deterministic for a fixed seed (noise is drawn
    in list order).
    """
    if math.isinf(epsilon):
        return list(shares)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    rng = np.random.default_rng(seed)
    scale = 1.0 / epsilon
    noisy = []
    for share in shares:
        value = _clamp(share.value + rng.laplace(0.0, scale))
        noisy.append(NormalizedShare(src=share.src, dst=share.dst, value=value,
                                     hops=share.hops, sender=share.sender))
    return noisy


def update_edge(n_value: float, local_incident_sum: float, lam: float) -> float:
    """Convert a received normalized value to an edge weight on local scale.

    Below the threshold: N / (1 - N) times the local incident sum; at or
    above it the ratio is capped at lam / (1 - lam).  A receiver vertex with
    no local edges uses 1.0 in place of its (zero) incident sum so remote
    structure can still materialize at unit scale.
    """
    base = local_incident_sum if local_incident_sum > 0 else 1.0
    if n_value < lam:
        return (n_value / (1.0 - n_value)) * base
    return (lam / (1.0 - lam)) * base


def fuse(local: ClientGraph, incoming, cfg: FusionConfig) -> VirtualFusedGraph:
    """Augment the local graph with the weights implied by incoming shares.

    Shares for the same unordered pair are averaged per orientation (src
    side) first.  Each endpoint then yields a candidate weight via
    update_edge with the receiver's own incident sum of that endpoint; an
    orientation nobody sent borrows the other side's average.  The fused
    weight is the max of the local weight and both candidates, so local
    evidence is never destroyed.
    """
    for share in incoming:
        if share.src not in local.vertices or share.dst not in local.vertices:
            raise ValueError(
                f"protocol violation: share ({share.src}, {share.dst}) references "
                f"a vertex unknown to client {local.relation_name!r}")
        if share.src == share.dst:
            raise ValueError(f"protocol violation: self-referential share ({share.src})")

    sums = incident_sums(local)
    by_orientation = {}
    for share in incoming:
        by_orientation.setdefault((share.src, share.dst), []).append(share.value)

    pair_values = {}
    for (i, j), values in by_orientation.items():
        key = (i, j) if i < j else (j, i)
        pair_values.setdefault(key, {})[i] = sum(values) / len(values)

    edges = dict(local.edges)
    provenance = {key: "local" for key in local.edges}
    for (u, v), oriented in sorted(pair_values.items()):
        candidates = []
        for src_vertex in (u, v):
            n_avg = oriented.get(src_vertex)
            if n_avg is None:
                # missing orientation: reuse the pair's transmitted average
                n_avg = oriented[v if src_vertex == u else u]
            candidates.append(update_edge(n_avg, sums[src_vertex], cfg.lam))
        local_w = local.edges.get((u, v), 0.0)
        edges[(u, v)] = max(local_w, max(candidates))
        provenance[(u, v)] = "both" if (u, v) in local.edges else "fused"

    return VirtualFusedGraph(
        relation_name=local.relation_name,
        vertices=local.vertices,
        edges=edges,
        node_ref=local.node_ref,
        provenance=provenance,
    )


def _pair_intersection(sender: ClientGraph, receiver: ClientGraph,
                       cfg: FusionConfig, backend: PsiBackend | None) -> set:
    if backend is None or backend.kind == "plain":
        return psi_plain(sender.vertices, receiver.vertices)
    result = psi_ddh(
        sender.vertices, receiver.vertices, backend,
        seed=derive_seed(cfg.seed, "psi", sender.relation_name, receiver.relation_name),
        name_a=sender.relation_name, name_b=receiver.relation_name)
    return set(result.intersection_a)


def virtual_fusion_round(clients, cfg: FusionConfig,
                         psi_backend: PsiBackend | None = None):
    """One full fusion round across every ordered client pair.

    Each sender runs PSI with each receiver, emits normalized (and, when
    configured, multi-hop) shares over the intersection, perturbs them, and
    transmits.  Each receiver fuses everything it got.  Output order matches
    the input client order.  Also returns the raw per-pair share lists for
    audit.
    """
    clients = list(clients)
    if len(clients) < 2:
        raise ValueError("virtual fusion needs at least 2 clients")
    names = [c.relation_name for c in clients]
    if len(set(names)) != len(names):
        raise ValueError("client relation names must be unique")

    inbox = {name: [] for name in names}
    shares_by_pair = {}
    for sender in clients:
        for receiver in clients:
            if sender.relation_name == receiver.relation_name:
                continue
            pair = (sender.relation_name, receiver.relation_name)
            try:
                common = _pair_intersection(sender, receiver, cfg, psi_backend)
                shares = normalize_edges(sender, common, sender=sender.relation_name)
                if cfg.hops >= 2:
                    shares += khop_shares(sender, common, cfg.hops,
                                          sender=sender.relation_name)
                shares = apply_dp(shares, cfg.dp_epsilon,
                                  seed=derive_seed(cfg.seed, "dp", *pair))
            except Exception as exc:
                raise RuntimeError(f"fusion pair {pair[0]} -> {pair[1]}: {exc}") from exc
            shares_by_pair[pair] = shares
            inbox[receiver.relation_name].extend(shares)

    fused = []
    for client in clients:
        try:
            fused.append(fuse(client, inbox[client.relation_name], cfg))
        except Exception as exc:
            raise RuntimeError(
                f"fusing client {client.relation_name!r}: {exc}") from exc
    return fused, shares_by_pair


def write_shares(shares, path) -> None:
    """Audit CSV: ``sender,src,dst,hops,value`` per share."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# sender,src,dst,hops,value\n")
        for s in shares:
            fh.write(f"{s.sender},{s.src},{s.dst},{s.hops},{repr(float(s.value))}\n")
