"""Command-line entry point: synth, mine, define, calibrate, classify,
evaluate, pipeline, serve.

All artifacts are plain JSON/CSV files plus PNG figures on the report
path; every command is deterministic given its config and seed. Errors
exit non-zero with a single machine-parseable `category: message` line
(2 input error, 3 empty pattern, 4 degenerate calibration).
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .calibration import calibrate
from .errors import CohortError, InputError
from .eventlog import dump_manifest, load_log, load_manifest, project
from .evaluation import draw_sample, evaluate, render_table
from .groupdef import GroupDefinition
from .mining import fp_growth
from .pipeline import define_from_plan, run_on_log
from .scoring import classify as classify_scores, dump_scores, score_population
from .synth import GeneratorSpec, generate_csv


def _fail(exc: CohortError):
    click.echo(exc.oneline(), err=True)
    sys.exit(exc.exit_code)


def cohort_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CohortError as exc:
            _fail(exc)
        except FileNotFoundError as exc:
            _fail(InputError(str(exc)))

    return wrapper


def out_dir_option(fn):
    return click.option(
        "--out", envvar="COHORTMINER_OUT", default=".", show_default=True,
        type=click.Path(file_okay=False, path_type=Path),
        help="Output directory (env: COHORTMINER_OUT).",
    )(fn)


def sampling_options(fn):
    for opt in reversed(
        [
            click.option("--sample-size", default=30, show_default=True, type=int),
            click.option("--split", default=0.5, show_default=True, type=float),
            click.option("--seed", default=0, show_default=True, type=int),
        ]
    ):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main():
    """Positive-sample patient-group mining toolkit."""


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, path_type=Path),
              help="Generator spec JSON; defaults to the desk-scale spec.")
@click.option("--seed", default=None, type=int, help="Override the spec seed.")
@out_dir_option
@cohort_errors
def synth(spec_path, seed, out):
    """Generate a synthetic log with planted groups and manifests."""
    spec = GeneratorSpec.from_json_file(spec_path) if spec_path else GeneratorSpec()
    if seed is not None:
        spec.seed = seed
    out.mkdir(parents=True, exist_ok=True)
    (out / "spec.json").write_text(spec.to_json(), encoding="utf-8")
    manifests = generate_csv(spec, out / "log.csv")
    for name, members in manifests.items():
        suffix = "" if len(manifests) == 1 else f"_{name}"
        dump_manifest(name, members, out / f"manifest{suffix}.json")
    click.echo(f"wrote {out / 'log.csv'} ({len(manifests)} group manifest(s))")


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--phi-a", default=0.8, show_default=True, type=float)
@sampling_options
@out_dir_option
@cohort_errors
def mine(log_path, manifest, phi_a, sample_size, split, seed, out):
    """Mine frequent activity patterns on the sample's mining half."""
    log = load_log(log_path)
    _, truth = load_manifest(manifest)
    plan = draw_sample(truth, sample_size, seed, split)
    train = [project(log, pid) for pid in sorted(plan.train)]
    result = fp_growth(train, phi_a)
    out.mkdir(parents=True, exist_ok=True)
    (out / "mining.json").write_text(result.to_json(), encoding="utf-8")
    click.echo(f"{len(result.patterns)} frequent patterns -> {out / 'mining.json'}")


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--phi-a", default=0.8, show_default=True, type=float)
@click.option("--phi-d", default=0.8, show_default=True, type=float)
@sampling_options
@out_dir_option
@cohort_errors
def define(log_path, manifest, phi_a, phi_d, sample_size, split, seed, out):
    """Build the group definition (cut-offs left at 0 for calibration)."""
    log = load_log(log_path)
    _, truth = load_manifest(manifest)
    plan = draw_sample(truth, sample_size, seed, split)
    definition = define_from_plan(log, plan, phi_a, phi_d, sample_size, split)
    out.mkdir(parents=True, exist_ok=True)
    (out / "definition.json").write_bytes(definition.to_json_bytes())
    click.echo(
        f"pattern of {len(definition.pattern)} activities, "
        f"{len(definition.dbcs)} codes -> {out / 'definition.json'}"
    )


def _load_definition(path: Path) -> GroupDefinition:
    try:
        return GroupDefinition.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad definition {path}: {exc}") from exc


@main.command("calibrate")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--definition", "definition_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--method", default="elbow", show_default=True,
              type=click.Choice(["elbow", "lee_liu"]))
@out_dir_option
@cohort_errors
def calibrate_cmd(log_path, definition_path, method, out):
    """Choose cut-offs from the definition's held-out sample half."""
    from .report import plot_recall_curve

    log = load_log(log_path)
    definition = _load_definition(definition_path)
    holdout = definition.provenance.get("holdout")
    if not holdout:
        raise InputError("definition provenance lacks a holdout set; re-run define")
    result = calibrate(log, definition, holdout, method)
    out.mkdir(parents=True, exist_ok=True)
    (out / "calibration.json").write_text(result.to_json(), encoding="utf-8")
    (out / "definition.json").write_bytes(result.definition.to_json_bytes())
    plot_recall_curve(result, out / "recall_curve.png")
    if result.degenerate:
        click.echo("warning: degenerate recall curve; review the elbow manually", err=True)
    click.echo(
        f"chosen cut-offs ({result.chosen.alpha_f}, {result.chosen.alpha_d}) "
        f"by {method} -> {out / 'calibration.json'}"
    )


@main.command("classify")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--definition", "definition_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@out_dir_option
@cohort_errors
def classify_cmd(log_path, definition_path, out):
    """Score the whole population and write the member list."""
    log = load_log(log_path)
    definition = _load_definition(definition_path)
    scores = score_population(log, definition)
    members = classify_scores(scores, definition.alpha_f, definition.alpha_d)
    out.mkdir(parents=True, exist_ok=True)
    dump_scores(scores, definition.alpha_f, definition.alpha_d, out / "scores.csv")
    (out / "members.txt").write_text("".join(m + "\n" for m in members), encoding="utf-8")
    click.echo(f"{len(members)} members -> {out / 'members.txt'}")


@main.command("evaluate")
@click.option("--predicted", required=True, type=click.Path(exists=True, path_type=Path),
              help="File with one predicted member id per line.")
@click.option("--manifest", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--n", default=1.0, show_default=True, type=float, help="F-measure weight.")
@out_dir_option
@cohort_errors
def evaluate_cmd(predicted, manifest, n, out):
    """Score a predicted member list against a ground-truth manifest."""
    ids = {line.strip() for line in predicted.read_text(encoding="utf-8").splitlines() if line.strip()}
    _, truth = load_manifest(manifest)
    report = evaluate(ids, truth, n)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    row = report.to_dict()
    (out / "report.txt").write_text(
        render_table([row], ["precision", "recall", "f_measure", "group_size", "truth_size"]),
        encoding="utf-8",
    )
    click.echo(f"F{n:g}={report.f_measure:.4f} -> {out / 'report.json'}")


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, path_type=Path))
@click.option("--log", "log_path", type=click.Path(exists=True, path_type=Path),
              help="Use an existing log instead of generating one.")
@click.option("--manifest", type=click.Path(exists=True, path_type=Path))
@click.option("--phi-a", default=0.8, show_default=True, type=float)
@click.option("--phi-d", default=0.8, show_default=True, type=float)
@click.option("--method", default="elbow", show_default=True,
              type=click.Choice(["elbow", "lee_liu"]))
@click.option("--n", default=1.0, show_default=True, type=float)
@sampling_options
@out_dir_option
@cohort_errors
def pipeline(spec_path, log_path, manifest, phi_a, phi_d, method, n,
             sample_size, split, seed, out):
    """synth -> define -> calibrate -> classify -> evaluate, end to end."""
    from .report import plot_recall_curve, plot_recall_validation

    out.mkdir(parents=True, exist_ok=True)
    if log_path is None:
        spec = GeneratorSpec.from_json_file(spec_path) if spec_path else GeneratorSpec(seed=seed)
        (out / "spec.json").write_text(spec.to_json(), encoding="utf-8")
        manifests = generate_csv(spec, out / "log.csv")
        name = sorted(manifests)[0]
        truth = manifests[name]
        dump_manifest(name, truth, out / "manifest.json")
        log_path = out / "log.csv"
    else:
        if manifest is None:
            raise InputError("--manifest is required with --log")
        _, truth = load_manifest(manifest)
    log = load_log(log_path)

    outcome = run_on_log(
        log, truth, sample_size=sample_size, split=split,
        phi_a=phi_a, phi_d=phi_d, method=method, seed=seed, n=n,
    )
    (out / "definition.json").write_bytes(outcome.calibration.definition.to_json_bytes())
    (out / "calibration.json").write_text(outcome.calibration.to_json(), encoding="utf-8")
    dump_scores(outcome.scores, outcome.calibration.chosen.alpha_f,
                outcome.calibration.chosen.alpha_d, out / "scores.csv")
    (out / "members.txt").write_text(
        "".join(m + "\n" for m in outcome.predicted), encoding="utf-8"
    )
    (out / "report.json").write_text(outcome.report.to_json(), encoding="utf-8")
    row = outcome.report.to_dict()
    row["spearman_rho"] = outcome.recall_rho
    (out / "report.txt").write_text(
        render_table([row], ["precision", "recall", "f_measure", "group_size", "truth_size"]),
        encoding="utf-8",
    )
    plot_recall_curve(outcome.calibration, out / "recall_curve.png")
    by_id = {s.patient_id: s for s in outcome.scores}
    est = [float(p.recall_bar) for p in outcome.calibration.points]
    true = [
        sum(
            1 for pid in truth
            if pid in by_id
            and by_id[pid].activity_score <= p.alpha_f
            and by_id[pid].dbc_score <= p.alpha_d
        ) / len(truth)
        for p in outcome.calibration.points
    ]
    plot_recall_validation(est, true, out / "recall_validation.png", rho=outcome.recall_rho)
    click.echo(
        f"F{n:g}={outcome.report.f_measure:.4f} "
        f"(precision {outcome.report.precision:.3f}, recall {outcome.report.recall:.3f}) "
        f"-> {out}"
    )


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", type=click.Path(exists=True, path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8571, show_default=True, type=int)
@cohort_errors
def serve(log_path, manifest, host, port):
    """Start the local HTTP service (and web UI, if built)."""
    import uvicorn

    from .service import create_app

    log = load_log(log_path)
    truth = None
    if manifest:
        _, truth = load_manifest(manifest)
    app = create_app({"default": (log, truth)})
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
