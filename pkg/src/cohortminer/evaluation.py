"""Ground-truth evaluation, sample drawing and rank diagnostics."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from scipy.stats import spearmanr

from .errors import InputError


@dataclass(slots=True)
class EvalReport:
    precision: float
    recall: float
    f_measure: float
    n: float
    true_positives: int
    false_positives: int
    false_negatives: int
    group_size: int
    truth_size: int
    empty_prediction: bool = False

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "n": self.n,
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "group_size": self.group_size,
            "truth_size": self.truth_size,
            "empty_prediction": self.empty_prediction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def f_measure(precision: float, recall: float, n: float = 1.0) -> float:
    denom = n * n * precision + recall
    if denom == 0:
        return 0.0
    return (1 + n * n) * precision * recall / denom


def evaluate(predicted: set[str], truth: set[str], n: float = 1.0) -> EvalReport:
    """Precision/recall/F against a ground-truth membership set.

    Precision of an empty prediction is reported as 0 with the
    empty_prediction flag set.
    """
    if not truth:
        raise InputError("ground truth set is empty")
    tp = len(predicted & truth)
    fp = len(predicted) - tp
    fn = len(truth) - tp
    empty = not predicted
    precision = 0.0 if empty else tp / len(predicted)
    recall = tp / len(truth)
    return EvalReport(
        precision=precision,
        recall=recall,
        f_measure=f_measure(precision, recall, n),
        n=n,
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        group_size=len(predicted),
        truth_size=len(truth),
        empty_prediction=empty,
    )


@dataclass(slots=True)
class SamplePlan:
    sample: set[str]
    train: set[str]
    holdout: set[str]
    seed: int
    order: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sample": sorted(self.sample),
            "train": sorted(self.train),
            "holdout": sorted(self.holdout),
            "seed": self.seed,
        }


def draw_sample(truth: set[str], size: int, seed: int, split: float = 0.5) -> SamplePlan:
    """Uniform positive sample without replacement, split into a mining
    half and a recall-estimation half (odd sizes: train gets the extra)."""
    if size > len(truth):
        raise InputError(f"sample size {size} exceeds ground truth size {len(truth)}")
    if size < 2:
        raise InputError("sample size must be at least 2")
    if not (0 < split < 1):
        raise InputError(f"split must be in (0, 1), got {split}")
    rng = random.Random(seed)
    chosen = rng.sample(sorted(truth), size)
    # ceil keeps the extra patient on the mining side for odd sizes
    n_train = max(1, min(size - 1, math.ceil(size * split)))
    train = set(chosen[:n_train])
    holdout = set(chosen[n_train:])
    return SamplePlan(set(chosen), train, holdout, seed, order=chosen)


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation (average ranks for ties), rho only."""
    if len(xs) != len(ys):
        raise InputError("sequences differ in length")
    if len(xs) < 2:
        raise InputError("need at least two observations")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise InputError("constant sequence has no rank correlation")
    rho = spearmanr(xs, ys).statistic
    return float(rho)


def render_table(rows: Sequence[Mapping[str, object]], columns: Sequence[str]) -> str:
    """Aligned plain-text table for report files."""
    def fmt(v):
        return f"{v:.4f}" if isinstance(v, float) else str(v)

    widths = [
        max(len(c), *(len(fmt(r.get(c, ""))) for r in rows)) if rows else len(c)
        for c in columns
    ]
    lines = [
        "  ".join(c.ljust(w) for c, w in zip(columns, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for r in rows:
        lines.append("  ".join(fmt(r.get(c, "")).ljust(w) for c, w in zip(columns, widths)))
    return "\n".join(lines) + "\n"


def yearly_report(
    periods: Mapping[str, tuple],
    n: float = 1.0,
    **pipeline_kwargs,
) -> list[dict]:
    """Run the full pipeline independently per period and tabulate results.

    `periods` maps a period label to (log, {group_name: truth_set}). Extra
    keyword arguments are forwarded to `pipeline.run_on_log`.
    """
    from .pipeline import run_on_log

    rows = []
    for period, (log, truths) in periods.items():
        for group_name, truth in truths.items():
            if not truth:
                raise InputError(f"empty ground truth for {group_name}/{period}")
            outcome = run_on_log(log, truth, n=n, **pipeline_kwargs)
            report = outcome.report
            rows.append(
                {
                    "period": period,
                    "group": group_name,
                    "precision": report.precision,
                    "recall": report.recall,
                    "f_measure": report.f_measure,
                    "group_size": report.group_size,
                    "truth_size": report.truth_size,
                }
            )
    return rows
