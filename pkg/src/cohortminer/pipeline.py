"""End-to-end orchestration shared by the CLI, the service and the tests."""

from __future__ import annotations

from dataclasses import dataclass

from . import __version__
from .calibration import CalibrationResult, calibrate
from .errors import InputError
from .eventlog import EventLog, project
from .evaluation import EvalReport, SamplePlan, draw_sample, evaluate, spearman
from .groupdef import GroupDefinition, build_definition
from .mining import Threshold, as_fraction
from .scoring import PatientScore, classify, score_population


def make_provenance(
    plan: SamplePlan,
    phi_a: Threshold,
    phi_d: Threshold,
    sample_size: int,
    split: float,
    optimistic_recall: bool = False,
) -> dict:
    prov = {
        "tool": "cohortminer",
        "version": __version__,
        "seed": plan.seed,
        "sample_size": sample_size,
        "split": split,
        "phi_a": float(as_fraction(phi_a)),
        "phi_d": float(as_fraction(phi_d)),
        **plan.to_dict(),
    }
    if optimistic_recall:
        prov["optimistic_recall"] = True
    return prov


def define_from_plan(
    log: EventLog, plan: SamplePlan, phi_a: Threshold, phi_d: Threshold,
    sample_size: int, split: float,
) -> GroupDefinition:
    missing = [pid for pid in plan.sample if pid not in log.traces]
    if missing:
        raise InputError(f"sample patients not in log: {missing[:5]}")
    train = [project(log, pid) for pid in sorted(plan.train)]
    prov = make_provenance(plan, phi_a, phi_d, sample_size, split)
    return build_definition(train, phi_a, phi_d, provenance=prov)


@dataclass(slots=True)
class PipelineOutcome:
    plan: SamplePlan
    definition: GroupDefinition
    calibration: CalibrationResult
    scores: list[PatientScore]
    predicted: list[str]
    report: EvalReport
    recall_rho: float | None


def run_on_log(
    log: EventLog,
    truth: set[str],
    sample_size: int = 30,
    split: float = 0.5,
    phi_a: Threshold = "4/5",
    phi_d: Threshold = "4/5",
    method: str = "elbow",
    seed: int = 0,
    n: float = 1.0,
    compute_rho: bool = True,
) -> PipelineOutcome:
    """draw sample -> define -> calibrate -> classify -> evaluate.

    recall_rho is the Spearman correlation between the held-out recall
    estimate and the true recall across all grid points (None when either
    series is constant).
    """
    plan = draw_sample(truth, sample_size, seed, split)
    definition = define_from_plan(log, plan, phi_a, phi_d, sample_size, split)
    scores = score_population(log, definition)
    result = calibrate(log, definition, plan.holdout, method, scores=scores)
    predicted = classify(
        scores, result.chosen.alpha_f, result.chosen.alpha_d
    )
    report = evaluate(set(predicted), truth, n)

    rho = None
    if compute_rho:
        by_id = {s.patient_id: s for s in scores}
        est, true = [], []
        for p in result.points:
            est.append(float(p.recall_bar))
            tp = sum(
                1
                for pid in truth
                if pid in by_id
                and by_id[pid].activity_score <= p.alpha_f
                and by_id[pid].dbc_score <= p.alpha_d
            )
            true.append(tp / len(truth))
        try:
            rho = spearman(est, true)
        except InputError:
            rho = None
    return PipelineOutcome(plan, definition, result, scores, predicted, report, rho)
