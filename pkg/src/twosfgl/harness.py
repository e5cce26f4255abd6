"""End-to-end experiment driver.

One experiment = a dataset (synthetic or loaded), a sampling/split policy,
and a set of arms trained per seed:

* ``2sfgl``       — virtual fusion first, then federated training on the
                    fused graphs;
* ``fedavg_only`` — federated training on the raw relation graphs;
* ``local_<rel>`` — a single client training on one raw relation.

Every random choice descends from the experiment seed, so rerunning a config
reproduces every output file byte for byte.  Failures are re-raised with the
seed, arm, and stage in the message.
"""

from pathlib import Path

from .config import ExperimentConfig
from .data import (balance_sample, load_dataset, stratified_split,
                   write_relation, zscore_features)
from .fedavg import FederationConfig, make_client, train_federation
from .fusion import virtual_fusion_round, write_shares
from .metrics import METRIC_NAMES, RoundHistory, window_average
from .psi import PsiBackend
from .seeding import derive_seed
from .synth import generate_synthetic

__all__ = ["expand_arms", "prepare_data", "run_arm", "run_experiment",
           "summarize", "write_summary", "write_table", "report_from_dir"]


def expand_arms(arms, relation_names) -> list:
    """Resolve the ``local`` shorthand into one arm per relation."""
    out = []
    for arm in arms:
        if arm == "local":
            out.extend(f"local_{name}" for name in relation_names)
        else:
            out.append(arm)
    for arm in out:
        if arm.startswith("local_") and arm[len("local_"):] not in relation_names:
            raise ValueError(f"arm {arm!r} names an unknown relation")
    return out


def prepare_data(cfg: ExperimentConfig, seed: int, out_dir: Path):
    """Dataset for one seed: generated synthetics round-trip through CSV."""
    if cfg.synth is not None:
        data_dir = out_dir / "data" / f"seed{seed}"
        node_path, relation_paths = generate_synthetic(cfg.synth, seed, data_dir)
        return load_dataset(node_path, relation_paths)
    return load_dataset(cfg.node_path, cfg.relation_paths)


def _psi_backend(cfg: ExperimentConfig) -> PsiBackend | None:
    return PsiBackend.ddh() if cfg.psi == "ddh" else None


def fusion_outputs(cfg: ExperimentConfig, dataset, seed: int, dump_dir=None):
    """Run one fusion round; optionally dump fused graphs, tags, and shares."""
    graphs = [dataset.relations[name] for name in sorted(dataset.relations)]
    fusion_cfg = cfg.fusion_config(derive_seed(seed, "fusion"))
    fused, shares_by_pair = virtual_fusion_round(graphs, fusion_cfg,
                                                 psi_backend=_psi_backend(cfg))
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)
        for graph in fused:
            write_relation(graph, dump_dir / f"fused_{graph.relation_name}.csv")
            tag_path = dump_dir / f"tags_{graph.relation_name}.csv"
            with open(tag_path, "w", encoding="utf-8") as fh:
                fh.write("# src,dst,origin\n")
                for (u, v) in sorted(graph.edges):
                    fh.write(f"{u},{v},{graph.provenance[(u, v)]}\n")
        for (a, b), shares in sorted(shares_by_pair.items()):
            write_shares(shares, dump_dir / f"shares_{a}_{b}.csv")
    return fused


def run_arm(cfg: ExperimentConfig, dataset, arm: str, split, features,
            seed: int, fused=None) -> RoundHistory:
    """Train one arm for one seed and return its per-round metric history."""
    names = sorted(dataset.relations)
    if arm == "2sfgl":
        if fused is None:
            raise ValueError("arm '2sfgl' needs fused graphs")
        graphs = fused
    elif arm == "fedavg_only":
        graphs = [dataset.relations[name] for name in names]
    elif arm.startswith("local_"):
        graphs = [dataset.relations[arm[len("local_"):]]]
    else:
        raise ValueError(f"unknown arm {arm!r}")

    model_seed = derive_seed(seed, "model")
    clients = [make_client(g.relation_name, g, split, cfg.arch, features,
                           seed=model_seed, fanout=cfg.fanout, lr=cfg.lr)
               for g in graphs]
    fed_cfg = FederationConfig(rounds=cfg.rounds, local_steps=cfg.local_steps,
                               arm=arm)
    return train_federation(clients, fed_cfg, seed=derive_seed(seed, "train"))


def summarize(histories: dict, cfg: ExperimentConfig) -> dict:
    """Window-average each (arm, seed) history, then mean over seeds.

    ``histories`` maps (arm, seed) -> RoundHistory; the result maps
    (arm, metric) -> float.
    """
    sums, counts = {}, {}
    for (arm, _seed), history in histories.items():
        window = window_average(history, cfg.window_lo, cfg.window_hi)
        for (warm, metric), value in window.items():
            if warm != arm:
                raise ValueError(f"history for arm {arm!r} contains rows "
                                 f"for {warm!r}")
            key = (arm, metric)
            sums[key] = sums.get(key, 0.0) + value
            counts[key] = counts.get(key, 0) + 1
    return {key: sums[key] / counts[key] for key in sums}


def _summary_rows(summary: dict):
    arms = sorted({arm for arm, _ in summary})
    for arm in arms:
        for metric in METRIC_NAMES:
            yield arm, metric, summary[(arm, metric)]


def write_summary(summary: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("arm,metric,value\n")
        for arm, metric, value in _summary_rows(summary):
            fh.write(f"{arm},{metric},{repr(float(value))}\n")


def write_table(summary: dict, cfg: ExperimentConfig, path) -> None:
    """Human-readable companion to summary.csv (fixed 4-decimal cells)."""
    arms = sorted({arm for arm, _ in summary})
    header = ["arm"] + list(METRIC_NAMES)
    rows = [[arm] + [f"{summary[(arm, m)]:.4f}" for m in METRIC_NAMES]
            for arm in arms]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = [f"arch={cfg.arch}  rounds={cfg.rounds}  "
             f"window={cfg.window_lo}-{cfg.window_hi}  "
             f"seeds={','.join(str(s) for s in cfg.seeds)}"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Run every (arm, seed) cell, write all artifacts, return the summary."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    histories = {}
    for seed in cfg.seeds:
        try:
            dataset = prepare_data(cfg, seed, out)
        except Exception as exc:
            raise RuntimeError(f"seed {seed}, stage data: {exc}") from exc
        arms = expand_arms(cfg.arms, sorted(dataset.relations))
        labels = dataset.nodes.labels
        sampled = balance_sample(labels, cfg.ratio_low, cfg.ratio_high,
                                 seed=derive_seed(seed, "sample"))
        split = stratified_split(sampled, labels, cfg.train_frac,
                                 seed=derive_seed(seed, "split"))
        features = zscore_features(dataset.nodes.features, split.train_ids)

        fused = None
        if "2sfgl" in arms:
            try:
                fused = fusion_outputs(cfg, dataset, seed,
                                       dump_dir=out / f"fusion_seed{seed}")
            except Exception as exc:
                raise RuntimeError(
                    f"seed {seed}, arm 2sfgl, stage fusion: {exc}") from exc
        for arm in arms:
            try:
                history = run_arm(cfg, dataset, arm, split, features, seed,
                                  fused=fused)
            except Exception as exc:
                raise RuntimeError(
                    f"seed {seed}, arm {arm}, stage train: {exc}") from exc
            history.to_csv(out / f"history_{arm}_{seed}.csv")
            histories[(arm, seed)] = history

    summary = summarize(histories, cfg)
    write_summary(summary, out / "summary.csv")
    write_table(summary, cfg, out / "table.txt")
    return summary


def report_from_dir(out_dir, cfg: ExperimentConfig) -> dict:
    """Rebuild summary.csv and table.txt from history files already on disk."""
    out = Path(out_dir)
    paths = sorted(out.glob("history_*.csv"))
    if not paths:
        raise FileNotFoundError(f"no history_*.csv files under {out}")
    histories = {}
    for path in paths:
        stem = path.stem[len("history_"):]
        arm, _, seed_text = stem.rpartition("_")
        if not arm or not seed_text.isdigit():
            raise ValueError(f"cannot parse arm/seed from {path.name!r}")
        histories[(arm, int(seed_text))] = RoundHistory.from_csv(path)
    summary = summarize(histories, cfg)
    write_summary(summary, out / "summary.csv")
    write_table(summary, cfg, out / "table.txt")
    return summary
