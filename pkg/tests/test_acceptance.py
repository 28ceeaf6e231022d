"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the scale check needs ~0.5 GB of free disk in the temp directory.
"""

import random
import resource
import statistics
import time
from fractions import Fraction

import pytest
from click.testing import CliRunner

from cohortminer.calibration import pareto_frontier, sweep
from cohortminer.cli import main
from cohortminer.eventlog import load_log, project_all
from cohortminer.evaluation import draw_sample, evaluate
from cohortminer.groupdef import dbc_support, select_dbcs, select_pattern
from cohortminer.mining import brute_force_mine, fp_growth, support_of
from cohortminer.pipeline import define_from_plan, run_on_log
from cohortminer.scoring import PatientScore, classify, score_patient, score_population
from cohortminer.synth import GeneratorSpec, PlantedGroup, generate, generate_csv

from conftest import make_log, proj


def report(name: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_mining_oracle_equivalence():
    """1,000 random samples, fp_growth set-equal to brute force, < 10 s."""
    rng = random.Random(2024)
    thresholds = [0.3, 0.5, 0.8, 1.0]
    start = time.time()
    for trial in range(1000):
        n_items = rng.randint(1, 8)
        items = [f"a{i}" for i in range(n_items)]
        n_patients = rng.randint(1, 12)
        sample = [
            proj(f"p{i}", {a for a in items if rng.random() < 0.5} or {rng.choice(items)})
            for i in range(n_patients)
        ]
        threshold = thresholds[trial % 4]
        fp = fp_growth(sample, threshold).as_pairs()
        bf = brute_force_mine(sample, threshold).as_pairs()
        assert fp == bf, f"mismatch at trial {trial}"
    elapsed = time.time() - start
    report("mining oracle equivalence (1000 samples)", elapsed < 10, f"{elapsed:.1f}s")


def test_formula_fidelity():
    """Support, code co-occurrence, scores and membership on a hand-built
    10-patient log, checked against exhaustive hand computations."""
    lines = ["patient_id,activity,dbc,timestamp"]

    def add(pid, act, dbc, minute):
        lines.append(f"{pid},{act},{dbc},2017-01-01T00:{minute:02d}:00")

    # patients p0..p7 carry {a,b}; p0..p5 pair d1 with a; p8, p9 are outsiders
    for i in range(8):
        add(f"p{i}", "a", "d1" if i < 6 else "d9", i)
        add(f"p{i}", "b", "d2", i + 10)
    add("p8", "a", "d1", 1)
    add("p9", "c", "d3", 1)
    log = make_log("\n".join(lines) + "\n")
    projections = project_all(log)
    sample = projections[:8]  # p0..p7

    ok = True
    ok &= support_of({"a", "b"}, sample) == Fraction(8, 8)
    ok &= support_of({"a", "b"}, projections) == Fraction(8, 10)
    ok &= support_of({"c"}, sample) == 0

    result = fp_growth(sample, Fraction(4, 5))
    ok &= result.as_pairs() == {
        (frozenset({"a"}), Fraction(1)),
        (frozenset({"b"}), Fraction(1)),
        (frozenset({"a", "b"}), Fraction(1)),
    }
    pattern = select_pattern(result)
    ok &= pattern == {"a", "b"}

    # d1 pairs with pattern activity 'a' for p0..p5 and (outside sample) p8
    ok &= dbc_support("d1", pattern, sample) == Fraction(6, 8)
    ok &= dbc_support("d2", pattern, sample) == Fraction(1)
    ok &= select_dbcs(pattern, sample, Fraction(3, 4)) == {"d1", "d2"}
    ok &= select_dbcs(pattern, sample, Fraction(7, 8)) == {"d2"}

    from cohortminer.groupdef import GroupDefinition

    definition = GroupDefinition(pattern, frozenset({"d1", "d2"}), Fraction(4, 5), Fraction(3, 4))
    by_id = {p.patient_id: score_patient(p, definition) for p in projections}
    ok &= (by_id["p0"].activity_score, by_id["p0"].dbc_score) == (0, 0)
    ok &= (by_id["p6"].activity_score, by_id["p6"].dbc_score) == (0, 1)  # has d9, not d1
    ok &= (by_id["p8"].activity_score, by_id["p8"].dbc_score) == (1, 1)  # no b, no d2
    ok &= (by_id["p9"].activity_score, by_id["p9"].dbc_score) == (2, 2)

    members = classify(by_id.values(), 0, 1)
    ok &= members == [f"p{i}" for i in range(8)]
    ok &= classify(by_id.values(), 2, 2) == sorted(by_id)
    report("formula fidelity on hand-built 10-patient log", bool(ok))


@pytest.fixture(scope="module")
def twenty_seed_runs():
    runs = []
    for seed in range(20):
        log, manifests = generate(GeneratorSpec(seed=seed))
        start = time.time()
        outcome = run_on_log(log, manifests["group1"], seed=seed)
        runs.append((outcome, time.time() - start))
    return runs


def test_synthetic_end_to_end_recovery(twenty_seed_runs):
    """Default spec, |P|=30 with 15/15 split, phi=0.8, elbow: median F1
    over 20 seeds >= 0.75, each run < 30 s."""
    f1s = [o.report.f_measure for o, _ in twenty_seed_runs]
    slowest = max(t for _, t in twenty_seed_runs)
    median = statistics.median(f1s)
    report(
        "synthetic end-to-end recovery",
        median >= 0.75 and slowest < 30,
        f"median F1 {median:.3f}, slowest run {slowest:.1f}s",
    )


def test_recall_estimate_validity(twenty_seed_runs):
    """Spearman rho between held-out recall and true recall across the
    cut-off grid: median over 20 seeds >= 0.8."""
    rhos = [o.recall_rho for o, _ in twenty_seed_runs if o.recall_rho is not None]
    median = statistics.median(rhos)
    report("recall-estimate validity (Spearman)", len(rhos) >= 18 and median >= 0.8,
           f"median rho {median:.3f}")


def test_monotonicity_property_suite():
    rng = random.Random(77)
    violations = []

    # (a) predicted group grows with cut-offs
    for _ in range(200):
        scores = [PatientScore(f"p{i}", rng.randint(0, 4), rng.randint(0, 4)) for i in range(40)]
        af, ad = rng.randint(0, 3), rng.randint(0, 3)
        if not set(classify(scores, af, ad)) <= set(classify(scores, af + 1, ad + 1)):
            violations.append("group-growth")

    # (b) frequent-pattern set grows as phi_a decreases
    for _ in range(200):
        sample = [
            proj(f"p{i}", {f"a{j}" for j in range(6) if rng.random() < 0.5} or {"a0"})
            for i in range(rng.randint(2, 10))
        ]
        hi = Fraction(rng.randint(5, 10), 10)
        lo = Fraction(rng.randint(1, int(hi * 10)), 10)
        if not fp_growth(sample, hi).as_pairs() <= fp_growth(sample, lo).as_pairs():
            violations.append("pattern-growth")

    # (c) code set grows as phi_d decreases
    for _ in range(200):
        sample = []
        for i in range(rng.randint(2, 10)):
            pairs = {("a", f"d{j}") for j in range(5) if rng.random() < 0.5}
            sample.append(proj(f"p{i}", {"a"}, {d for _, d in pairs}, pairs))
        hi = Fraction(rng.randint(5, 10), 10)
        lo = Fraction(rng.randint(1, int(hi * 10)), 10)
        if not select_dbcs(frozenset({"a"}), sample, hi) <= select_dbcs(frozenset({"a"}), sample, lo):
            violations.append("dbc-growth")

    # (d) Pareto frontier recall strictly increasing
    from cohortminer.calibration import SweepPoint

    for _ in range(200):
        points = [
            SweepPoint(af, ad, rng.randint(0, 50), Fraction(rng.randint(0, 10), 10))
            for af in range(4)
            for ad in range(4)
        ]
        recalls = [p.recall_bar for p in pareto_frontier(points)]
        if not all(a < b for a, b in zip(recalls, recalls[1:])):
            violations.append("frontier-recall")

    report("monotonicity property suite (4 x 200 instances)", not violations,
           f"violations: {violations[:3]}" if violations else "0 violations")


def test_degenerate_probability_pipeline():
    """q=1, r=1, leak=0, phi=1.0, cut-offs (0,0) recovers the planted
    group with F1 exactly 1.0."""
    spec = GeneratorSpec(
        seed=0, events_per_patient=5.0,
        groups=[PlantedGroup(emission_prob=1.0, signature_dbc_prob=1.0, leak_prob=0.0)],
    )
    log, manifests = generate(spec)
    truth = manifests["group1"]
    plan = draw_sample(truth, 30, 0)
    definition = define_from_plan(log, plan, 1.0, 1.0, 30, 0.5)
    predicted = classify(score_population(log, definition), 0, 0)
    f1 = evaluate(set(predicted), truth).f_measure
    report("degenerate-probability pipeline", f1 == 1.0, f"F1 {f1}")


def test_scale_smoke(tmp_path):
    """100,000 patients / ~10M events: load + score + sweep < 120 s and
    < 4 GB peak memory."""
    spec = GeneratorSpec(
        population=100_000, events_per_patient=100.0,
        groups=[PlantedGroup(size=5000)], seed=0,
    )
    path = tmp_path / "big.csv"
    manifests = generate_csv(spec, path)
    truth = manifests["group1"]

    start = time.time()
    log = load_log(path)
    plan = draw_sample(truth, 30, 0)
    definition = define_from_plan(log, plan, 0.8, 0.8, 30, 0.5)
    scores = score_population(log, definition)
    points = sweep(scores, plan.holdout, len(definition.pattern), len(definition.dbcs))
    pareto_frontier(points)
    elapsed = time.time() - start

    n_events = sum(len(t.events) for t in log.traces.values())
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1e6
    report(
        "scale smoke (100k patients)",
        len(log) == 100_000 and n_events >= 9_500_000 and elapsed < 120 and peak_gb < 4,
        f"{n_events} events, {elapsed:.1f}s, peak {peak_gb:.2f}GB",
    )


def test_pipeline_determinism(tmp_path):
    """Full pipeline twice with one seed: byte-identical artifacts."""
    spec = GeneratorSpec(population=2000, background_activities=80, background_dbcs=40,
                         events_per_patient=12.0, groups=[PlantedGroup(size=200)], seed=13)
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(spec.to_json())
    runner = CliRunner()
    artifacts = ["spec.json", "log.csv", "manifest.json", "definition.json",
                 "calibration.json", "scores.csv", "members.txt", "report.json",
                 "report.txt", "recall_curve.png", "recall_validation.png"]
    for name in ("one", "two"):
        result = runner.invoke(main, [
            "pipeline", "--spec", str(spec_path), "--seed", "13",
            "--out", str(tmp_path / name),
        ])
        assert result.exit_code == 0, result.output
    identical = all(
        (tmp_path / "one" / a).read_bytes() == (tmp_path / "two" / a).read_bytes()
        for a in artifacts
    )
    report("pipeline determinism (byte-identical artifacts)", identical)
