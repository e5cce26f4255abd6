"""Experiment configuration: a flat ``key = value`` file with dotted keys.

No environment variables, no includes — everything an experiment needs is in
one file plus command-line overrides, so a run is reproducible from the
config text alone.  Unknown keys are rejected with the offending line number.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

from .fusion import FusionConfig
from .synth import SyntheticSpec

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config"]


class ConfigError(ValueError):
    pass


_ARCHES = ("gcn", "sage")


@dataclass
class ExperimentConfig:
    arch: str = "gcn"
    seeds: tuple = (0,)
    arms: tuple = ("2sfgl", "fedavg_only", "local")
    out_dir: str = "out"
    synth: SyntheticSpec = None
    node_path: str = None
    relation_paths: dict = field(default_factory=dict)
    lam: float = 0.5
    hops: int = 1
    dp_epsilon: float = math.inf
    psi: str = "plain"
    rounds: int = 100
    local_steps: int = 1
    ratio_low: float = 0.5
    ratio_high: float = 2.0
    train_frac: float = 0.6
    fanout: int = 5
    lr: float = 0.005
    window_lo: int = 60
    window_hi: int = 100

    def __post_init__(self):
        if self.arch not in _ARCHES:
            raise ConfigError(f"unknown arch {self.arch!r}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if not self.arms:
            raise ConfigError("need at least one arm")
        for arm in self.arms:
            if arm not in ("2sfgl", "fedavg_only", "local") and not arm.startswith("local_"):
                raise ConfigError(f"unknown arm {arm!r}")
        if self.synth is None and self.node_path is None:
            raise ConfigError("config needs either synth.* keys or data.* paths")
        if self.synth is not None and self.node_path is not None:
            raise ConfigError("synth.* and data.* are mutually exclusive")
        if self.node_path is not None and not self.relation_paths:
            raise ConfigError("data.nodes given but no data.relation.<name> keys")
        if not 1 <= self.window_lo <= self.window_hi:
            raise ConfigError("report window must satisfy 1 <= lo <= hi")
        if self.window_hi > self.rounds:
            raise ConfigError(
                f"report window ends at round {self.window_hi} but the run "
                f"has only {self.rounds} rounds")

    def fusion_config(self, seed: int) -> FusionConfig:
        return FusionConfig(lam=self.lam, hops=self.hops,
                            dp_epsilon=self.dp_epsilon, seed=seed, psi=self.psi)


def _parse_scalar(text: str, kind: type, key: str, lineno: int):
    try:
        if kind is bool:
            raise TypeError
        if kind is float and text == "inf":
            return math.inf
        return kind(text)
    except (TypeError, ValueError):
        raise ConfigError(f"line {lineno}: key {key!r} expects {kind.__name__}, "
                          f"got {text!r}") from None


# key -> (target, attribute, type); target "top" or "synth"
_SCHEMA = {
    "arch": ("top", "arch", str),
    "out_dir": ("top", "out_dir", str),
    "fusion.lambda": ("top", "lam", float),
    "fusion.hops": ("top", "hops", int),
    "fusion.dp_epsilon": ("top", "dp_epsilon", float),
    "fusion.psi": ("top", "psi", str),
    "federation.rounds": ("top", "rounds", int),
    "federation.local_steps": ("top", "local_steps", int),
    "sample.ratio_low": ("top", "ratio_low", float),
    "sample.ratio_high": ("top", "ratio_high", float),
    "split.train_frac": ("top", "train_frac", float),
    "model.fanout": ("top", "fanout", int),
    "model.lr": ("top", "lr", float),
    "report.window_lo": ("top", "window_lo", int),
    "report.window_hi": ("top", "window_hi", int),
    "synth.nodes": ("synth", "nodes", int),
    "synth.fraud_fraction": ("synth", "fraud_fraction", float),
    "synth.relations": ("synth", "relations", int),
    "synth.intra_p": ("synth", "intra_p", float),
    "synth.inter_p": ("synth", "inter_p", float),
    "synth.features": ("synth", "features", int),
    "synth.class_sep": ("synth", "class_sep", float),
    "synth.coverage": ("synth", "coverage", float),
}


def parse_config(text: str, base_dir=".") -> ExperimentConfig:
    """Parse config text.  Relative data paths resolve against base_dir."""
    base_dir = Path(base_dir)
    top = {}
    synth_kwargs = {}
    saw_synth = False
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        if key == "seeds":
            top["seeds"] = tuple(_parse_scalar(part.strip(), int, key, lineno)
                                 for part in value.split(","))
        elif key == "arms":
            top["arms"] = tuple(part.strip() for part in value.split(","))
        elif key == "data.nodes":
            top["node_path"] = str(base_dir / value)
        elif key.startswith("data.relation."):
            name = key[len("data.relation."):]
            if not name:
                raise ConfigError(f"line {lineno}: relation name missing in {key!r}")
            top.setdefault("relation_paths", {})[name] = str(base_dir / value)
        elif key in _SCHEMA:
            target, attr, kind = _SCHEMA[key]
            parsed = _parse_scalar(value, kind, key, lineno)
            if target == "synth":
                synth_kwargs[attr] = parsed
                saw_synth = True
            else:
                top[attr] = parsed
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if saw_synth:
        try:
            top["synth"] = SyntheticSpec(**synth_kwargs)
        except ValueError as exc:
            raise ConfigError(f"synth.*: {exc}") from None
    try:
        return ExperimentConfig(**top)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cfg = parse_config(text, base_dir=path.parent)
    if cfg.node_path is not None:
        missing = [p for p in [cfg.node_path, *cfg.relation_paths.values()]
                   if not Path(p).is_file()]
        if missing:
            raise ConfigError(f"config {path}: missing data files: "
                              + ", ".join(sorted(missing)))
    return cfg
