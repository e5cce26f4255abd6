"""Binary classification metrics and the epoch-window summary.

All metrics take an EvalResult (class-1 scores, hard predictions at the 0.5
threshold, true labels) restricted to an evaluation mask, and return a value
in [0, 1].  AUC is the rank statistic with average ranks for ties, which
equals pair counting exactly.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "METRIC_NAMES",
    "EvalResult",
    "accuracy",
    "macro_f1",
    "gmean",
    "auc",
    "RoundHistory",
    "window_average",
]

# table column order used by reports
METRIC_NAMES = ("macro_f1", "auc", "gmean", "accuracy")


@dataclass(frozen=True)
class EvalResult:
    """Scores and labels of the evaluated (masked) nodes.

    ``scores`` are class-1 probabilities; ``preds`` are scores >= 0.5;
    ``node_ids`` records which nodes were evaluated.
    """

    scores: np.ndarray
    preds: np.ndarray
    labels: np.ndarray
    node_ids: tuple = ()

    @classmethod
    def from_scores(cls, scores, labels, node_ids=()) -> "EvalResult":
        scores = np.asarray(scores, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if scores.shape != labels.shape:
            raise ValueError("scores and labels must have matching shapes")
        if scores.size == 0:
            raise ValueError("evaluation mask is empty")
        if scores.min() < 0 or scores.max() > 1:
            raise ValueError("scores must lie in [0, 1]")
        return cls(scores=scores, preds=(scores >= 0.5).astype(np.int64),
                   labels=labels, node_ids=tuple(node_ids))


def _counts(result: EvalResult):
    pos = result.labels == 1
    neg = ~pos
    tp = int(np.sum(result.preds[pos] == 1))
    fn = int(np.sum(result.preds[pos] == 0))
    tn = int(np.sum(result.preds[neg] == 0))
    fp = int(np.sum(result.preds[neg] == 1))
    return tp, fn, tn, fp


def accuracy(result: EvalResult) -> float:
    return float(np.mean(result.preds == result.labels))


def macro_f1(result: EvalResult) -> float:
    """Unweighted mean of per-class F1; a class with empty denominator
    contributes 0."""
    tp, fn, tn, fp = _counts(result)
    f1_pos = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0
    f1_neg = 2 * tn / (2 * tn + fn + fp) if (2 * tn + fn + fp) > 0 else 0.0
    return (f1_pos + f1_neg) / 2.0


def gmean(result: EvalResult) -> float:
    """Geometric mean of the two class recalls; 0 when either is 0 or a
    class is absent."""
    tp, fn, tn, fp = _counts(result)
    tpr = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    tnr = tn / (tn + fp) if (tn + fp) > 0 else 0.0
    return float(np.sqrt(tpr * tnr))


def auc(result: EvalResult) -> float:
    """Rank-based AUC; tied scores contribute 1/2 per pair."""
    n_pos = int(np.sum(result.labels == 1))
    n_neg = result.labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC requires both classes in the evaluation mask")
    ranks = rankdata(result.scores)  # average ranks on ties
    rank_sum = float(ranks[result.labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass
class RoundHistory:
    """Per-round metric records for every arm of an experiment.

    Rows are (round, arm, metric, value); rounds are 1-based.
    """

    records: list = field(default_factory=list)

    def append(self, round_index: int, arm: str, metric: str, value: float) -> None:
        self.records.append((round_index, arm, metric, value))

    def extend(self, other: "RoundHistory") -> None:
        self.records.extend(other.records)

    def arms(self) -> list:
        seen = {}
        for _, arm, _, _ in self.records:
            seen.setdefault(arm, None)
        return list(seen)

    def rounds(self, arm: str) -> list:
        return sorted({r for r, a, _, _ in self.records if a == arm})

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("round,arm,metric,value\n")
            for round_index, arm, metric, value in self.records:
                fh.write(f"{round_index},{arm},{metric},{repr(float(value))}\n")

    @classmethod
    def from_csv(cls, path) -> "RoundHistory":
        history = cls()
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if header.strip() != "round,arm,metric,value":
                raise ValueError(f"{path}: unexpected history header {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                round_str, arm, metric, value = line.split(",")
                history.append(int(round_str), arm, metric, float(value))
        return history


def window_average(history: RoundHistory, lo: int = 60, hi: int = 100) -> dict:
    """Mean of each (arm, metric) over rounds lo..hi inclusive.

    Every arm must cover the full window; missing rounds are an error.
    """
    buckets = {}
    for round_index, arm, metric, value in history.records:
        if lo <= round_index <= hi:
            buckets.setdefault((arm, metric), {})[round_index] = value
    if not buckets:
        raise ValueError(f"history has no rounds in [{lo}, {hi}]")
    expected = set(range(lo, hi + 1))
    summary = {}
    for key, by_round in sorted(buckets.items()):
        missing = expected - set(by_round)
        if missing:
            raise ValueError(
                f"history for {key[0]}/{key[1]} misses rounds "
                f"{sorted(missing)[:3]}... in [{lo}, {hi}]")
        summary[key] = float(np.mean([by_round[r] for r in sorted(by_round)]))
    return summary
