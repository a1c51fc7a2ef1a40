"""Command-line front end: ingest, train, schedule, oracle-check.

Exit codes are stable: 0 success, 1 oracle thresholds violated, 2 unreadable
input, 3 schema/config/validation error, 4 model format mismatch, 5
infeasible project, 6 enumeration guard refusal.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    ConfigError,
    CrowdschedError,
    CycleError,
    EnumerationGuardError,
    InfeasibleProjectError,
    ModelFormatError,
    SchemaError,
    TrainingDivergedError,
    UnknownTaskError,
)
from .model import build_project, parse_dataset, parse_dependency_file
from .oracle import compare_fronts, exact_front
from .predictor import TrainConfig, load_model, samples_from_history, save_model, train
from .scheduler import GAConfig, ParetoResult, evolve, evolve_multi

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_IO = 2
EXIT_SCHEMA = 3
EXIT_MODEL = 4
EXIT_INFEASIBLE = 5
EXIT_GUARD = 6


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


def _fail(code: int, message: str) -> "_CliFailure":
    return _CliFailure(code, message)


# -- config file -----------------------------------------------------------------


def _coerce(value: str):
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    for conv in (int, float):
        try:
            return conv(value)
        except ValueError:
            continue
    return value.strip()


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot read config file: {exc}")
    values = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _fail(EXIT_SCHEMA, f"config line {line_number}: expected key=value")
        key, _, raw = line.partition("=")
        values[key.strip().replace("-", "_")] = _coerce(raw)
    return values


# -- shared flag groups ---------------------------------------------------------


def _add_ga_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--population", type=int, default=100, help="population size")
    sub.add_argument("--generations", type=int, default=200)
    sub.add_argument("--crossover-prob", type=float, default=0.9)
    sub.add_argument("--variation-prob", type=float, default=0.1)
    sub.add_argument("--tournament-size", type=int, default=2)
    sub.add_argument("--similarity-target", type=float, default=0.6)
    sub.add_argument("--similarity-tolerance", type=float, default=0.05)
    sub.add_argument(
        "--no-similarity",
        action="store_true",
        help="disable the similarity repair and report zero similarity cost",
    )
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--max-horizon", type=int, default=None)


def _ga_config(args) -> GAConfig:
    return GAConfig(
        population_size=args.population,
        generations=args.generations,
        crossover_probability=args.crossover_prob,
        variation_probability=args.variation_prob,
        tournament_size=args.tournament_size,
        seed=args.seed,
        similarity_target=args.similarity_target,
        similarity_tolerance=args.similarity_tolerance,
        similarity_repair=not args.no_similarity,
        threads=args.threads,
    )


def _parse_dataset_or_fail(path: str, delimiter: str):
    try:
        with open(path, encoding="utf-8", newline="") as stream:
            return parse_dataset(stream, delimiter=delimiter)
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot read dataset: {exc}")
    except SchemaError as exc:
        raise _fail(EXIT_SCHEMA, str(exc))


def _load_project(args):
    result = _parse_dataset_or_fail(args.dataset, args.delimiter)
    for issue in result.issues:
        print(f"row {issue.row}: {issue.field or 'row'}: {issue.message}", file=sys.stderr)
    try:
        edges = parse_dependency_file(args.deps)
    except OSError as exc:
        raise _fail(EXIT_IO, f"cannot read dependency file: {exc}")
    except ValueError as exc:
        raise _fail(EXIT_SCHEMA, f"bad dependency file: {exc}")
    catalog = result.catalog
    try:
        return build_project(
            catalog,
            catalog.task_ids,
            edges,
            max_horizon=args.max_horizon,
            project_id=Path(args.dataset).stem,
        )
    except (CycleError, UnknownTaskError) as exc:
        raise _fail(EXIT_SCHEMA, str(exc))


def _load_background(args):
    if not getattr(args, "background", None):
        return ()
    return _parse_dataset_or_fail(args.background, args.delimiter).catalog.tasks


def _load_model_or_fail(path: str):
    try:
        return load_model(path)
    except ModelFormatError as exc:
        raise _fail(EXIT_MODEL, str(exc))


# -- subcommands ------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    result = _parse_dataset_or_fail(args.dataset, args.delimiter)
    catalog = result.catalog
    print(f"tasks: {len(catalog)}")
    if catalog.epoch is not None and len(catalog):
        last = max(t.submission_end for t in catalog.tasks)
        print(f"date span: {catalog.epoch.isoformat()} + {last} days")
        durations = [t.duration for t in catalog.tasks]
        prizes = [t.prize for t in catalog.tasks]
        print(f"duration range: {min(durations)}..{max(durations)} days")
        print(f"prize range: {min(prizes):g}..{max(prizes):g}")
        failed = sum(1 for t in catalog.tasks if t.status == "failed")
        print(f"failed tasks: {failed}/{len(catalog)}")
    norms = catalog.norms
    print(
        "corpus maxima: "
        f"prize_diff={norms.prize_max:g} reg_date_diff={norms.reg_date_max} "
        f"sub_date_diff={norms.sub_date_max} tech_count={norms.tech_count_max}"
    )
    for issue in result.issues:
        print(f"row {issue.row}: {issue.field or 'row'}: {issue.message}", file=sys.stderr)
    return EXIT_OK


def _cmd_train(args) -> int:
    result = _parse_dataset_or_fail(args.dataset, args.delimiter)
    samples = samples_from_history(
        result.catalog,
        prize_feature=args.prize_feature,
        binary_labels=args.binary_labels,
    )
    config = TrainConfig(
        folds=args.folds,
        max_epochs=args.epochs,
        patience=args.patience,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    try:
        outcome = train(samples, config, prize_feature=args.prize_feature)
    except (ConfigError, TrainingDivergedError) as exc:
        raise _fail(EXIT_SCHEMA, str(exc))
    save_model(outcome.model, args.model_out)
    print(f"model written to {args.model_out}")
    print(
        f"{config.folds}-fold validation loss: "
        f"{outcome.mean_loss:.6f} +/- {outcome.std_loss:.6f}"
    )
    if args.report_out:
        report = {
            "schema": "crowdsched-train-report v1",
            "folds": config.folds,
            "fold_losses": list(outcome.fold_losses),
            "fold_epochs": list(outcome.fold_epochs),
            "mean_loss": outcome.mean_loss,
            "std_loss": outcome.std_loss,
            "epochs_trained": outcome.model.epochs_trained,
        }
        Path(args.report_out).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def _write_front_files(result: ParetoResult, out_dir: Path, project) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "pareto.json").write_text(
        json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    task_ids = [t.task_id for t in project.tasks]
    lines = [",".join(["duration_days", "similarity_cost", "failure_probability"]
                      + [f"start:{tid}" for tid in task_ids])]
    for m in result.members:
        lines.append(
            ",".join(
                [repr(m.fitness.duration), repr(m.fitness.similarity_cost),
                 repr(m.fitness.failure)] + [str(s) for s in m.starts]
            )
        )
    (out_dir / "front.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    diag_lines = [
        "member,task_id,start_day,best_day,predicted_failure,"
        "open_tasks_on_arrival,avg_similarity_on_arrival"
    ]
    for index, m in enumerate(result.members):
        for d in m.diagnostics:
            diag_lines.append(
                f"{index},{d.task_id},{d.start_day},{d.best_day},"
                f"{repr(d.predicted_failure)},{d.open_tasks_on_arrival},"
                f"{repr(d.avg_similarity_on_arrival)}"
            )
    (out_dir / "task_diagnostics.csv").write_text("\n".join(diag_lines) + "\n", encoding="utf-8")

    for name, column in (
        ("duration_vs_failure.csv", "failure_probability"),
        ("duration_vs_similarity_cost.csv", "similarity_cost"),
    ):
        rows = [f"duration_days,{column}"]
        for m in result.members:
            value = m.fitness.failure if column == "failure_probability" else m.fitness.similarity_cost
            rows.append(f"{repr(m.fitness.duration)},{repr(value)}")
        (out_dir / name).write_text("\n".join(rows) + "\n", encoding="utf-8")


def _cmd_schedule(args) -> int:
    project = _load_project(args)
    model = _load_model_or_fail(args.model)
    background = _load_background(args)
    try:
        config = _ga_config(args)
        config.validate()
    except ConfigError as exc:
        raise _fail(EXIT_SCHEMA, str(exc))
    try:
        if args.runs > 1:
            result = evolve_multi(project, model, config, runs=args.runs, background=background)
        else:
            result = evolve(project, model, config, background=background)
    except InfeasibleProjectError as exc:
        raise _fail(EXIT_INFEASIBLE, str(exc))
    except ConfigError as exc:
        raise _fail(EXIT_SCHEMA, str(exc))

    out_dir = Path(args.out_dir)
    _write_front_files(result, out_dir, project)

    if args.similarity_matrix_out:
        from .similarity import similarity_matrix

        similarity_matrix(project.tasks, project.norms).write_csv(args.similarity_matrix_out)

    objectives = result.objective_matrix()
    print(f"kernel backend: {_kernels.BACKEND}")
    print(f"front size: {len(result.members)}")
    print(
        f"best duration: {objectives[:, 0].min():g} days; "
        f"best similarity cost: {objectives[:, 1].min():g}; "
        f"best failure: {objectives[:, 2].min():.4f}"
    )
    print(f"outputs in {out_dir}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    project = _load_project(args)
    model = _load_model_or_fail(args.model)
    background = _load_background(args)
    try:
        config = _ga_config(args)
        config.validate()
    except ConfigError as exc:
        raise _fail(EXIT_SCHEMA, str(exc))
    try:
        exact = exact_front(
            project, model, config, background=background, limit=args.enumeration_limit
        )
        found = evolve(project, model, config, background=background)
    except EnumerationGuardError as exc:
        raise _fail(EXIT_GUARD, str(exc))
    except InfeasibleProjectError as exc:
        raise _fail(EXIT_INFEASIBLE, str(exc))

    report = compare_fronts(found, exact)
    payload = report.to_dict()
    payload["project_id"] = project.project_id
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")

    if report.nondominated_fraction < args.min_nondominated:
        print(
            f"nondominated fraction {report.nondominated_fraction:.3f} below "
            f"threshold {args.min_nondominated}",
            file=sys.stderr,
        )
        return EXIT_THRESHOLD
    if report.hypervolume_ratio < args.min_hv_ratio:
        print(
            f"hypervolume ratio {report.hypervolume_ratio:.3f} below "
            f"threshold {args.min_hv_ratio}",
            file=sys.stderr,
        )
        return EXIT_THRESHOLD
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="crowdsched",
        description="Evolutionary start-day scheduler for crowdsourced task marketplaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    def common(p):
        p.add_argument("--config", default=None, help="key=value defaults file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--delimiter", default=",")

    ingest = registry["ingest"] = sub.add_parser(
        "ingest", help="parse a dataset and print a summary"
    )
    common(ingest)
    ingest.add_argument("--dataset", required=True)
    ingest.set_defaults(func=_cmd_ingest)

    training = registry["train"] = sub.add_parser("train", help="train the failure predictor")
    common(training)
    training.add_argument("--dataset", required=True)
    training.add_argument("--model-out", required=True)
    training.add_argument("--report-out", default=None)
    training.add_argument("--folds", type=int, default=10)
    training.add_argument("--epochs", type=int, default=500)
    training.add_argument("--patience", type=int, default=10)
    training.add_argument("--lr", type=float, default=0.01)
    training.add_argument("--batch-size", type=int, default=32)
    training.add_argument("--prize-feature", choices=("mp", "tmp"), default="mp")
    training.add_argument("--binary-labels", action="store_true")
    training.set_defaults(func=_cmd_train)

    schedule = registry["schedule"] = sub.add_parser(
        "schedule", help="evolve a Pareto front of schedules"
    )
    common(schedule)
    schedule.add_argument("--dataset", required=True)
    schedule.add_argument("--deps", required=True)
    schedule.add_argument("--model", required=True)
    schedule.add_argument("--background", default=None)
    schedule.add_argument("--out-dir", required=True)
    schedule.add_argument("--runs", type=int, default=1)
    schedule.add_argument("--similarity-matrix-out", default=None)
    _add_ga_flags(schedule)
    schedule.set_defaults(func=_cmd_schedule)

    oracle_check = registry["oracle-check"] = sub.add_parser(
        "oracle-check", help="compare against the exhaustive front"
    )
    common(oracle_check)
    oracle_check.add_argument("--dataset", required=True)
    oracle_check.add_argument("--deps", required=True)
    oracle_check.add_argument("--model", required=True)
    oracle_check.add_argument("--background", default=None)
    oracle_check.add_argument("--out", default=None)
    oracle_check.add_argument("--min-nondominated", type=float, default=0.95)
    oracle_check.add_argument("--min-hv-ratio", type=float, default=0.95)
    oracle_check.add_argument("--enumeration-limit", type=float, default=10**7)
    _add_ga_flags(oracle_check)
    oracle_check.set_defaults(func=_cmd_oracle_check)

    return parser, registry


_CONFIGURABLE = {
    "seed", "delimiter", "population", "generations", "crossover_prob",
    "variation_prob", "tournament_size", "similarity_target",
    "similarity_tolerance", "no_similarity", "threads", "max_horizon",
    "folds", "epochs", "patience", "lr", "batch_size", "prize_feature",
    "binary_labels", "runs", "min_nondominated", "min_hv_ratio",
    "enumeration_limit", "background", "out", "report_out",
    "similarity_matrix_out",
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        if "--config" in argv:
            path = argv[argv.index("--config") + 1]
            overrides = _load_config_file(path)
            unknown = set(overrides) - _CONFIGURABLE
            if unknown:
                raise _fail(EXIT_SCHEMA, f"unknown config keys: {sorted(unknown)}")
            # Parser-level defaults beat argument-level defaults, and explicit
            # flags beat both; apply to the active subcommand.
            target = registry.get(argv[0]) if argv and argv[0] in registry else parser
            target.set_defaults(**overrides)
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliFailure as failure:
        print(f"error: {failure.message}", file=sys.stderr)
        return failure.code
    except CrowdschedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
