"""Command-line surface.

Subcommands: gen, validate, grade, solve, tutor-sim, train-q, eval,
ablate. Every run that produces a report embeds its full RunConfig.
Exit codes: 0 success, 2 usage, 3 schema error, 4 compliance failure,
5 backend error, 6 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..agents import HttpBackend, MockBackend, PipelineSession
from ..errors import BackendError, ExamforgeError, SchemaError
from ..exam_model import (
    ScoringScheme,
    default_matrix,
    parse_exam,
    score_exam,
    serialize_exam,
    validate_exam,
)
from ..exam_model.serialization import response_from_dict
from ..case_memory import load_bank, save_bank
from .ablation import render_ablation_table, run_ablation
from .config import RunConfig
from .pipelines import (
    load_histories,
    recompute_tutor_metrics,
    report_hash,
    report_to_json,
    run_standard_workload,
    run_tutor_cohort,
    write_histories,
    write_report,
)
from .training import train_chain_estimator

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_COMPLIANCE = 4
EXIT_BACKEND = 5
EXIT_INTERNAL = 6


def _backend_for(config: RunConfig):
    return MockBackend() if config.backend == "mock" else HttpBackend()


def _config_from_args(args) -> RunConfig:
    base = RunConfig.from_file(args.config).to_dict() if getattr(args, "config", None) else {}
    for name in ("seed", "mode", "k", "alpha", "backend", "exams", "students"):
        value = getattr(args, name, None)
        if value is not None:
            base[name] = value
    for name, attr in (("bank_path", "bank"), ("out_path", "out")):
        value = getattr(args, attr, None)
        if value is not None:
            base[name] = str(value)
    return RunConfig.from_dict(base)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON RunConfig file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--mode", choices=["none", "readnp", "readp"], default=None)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--backend", choices=["mock", "http"], default=None)
    parser.add_argument("--bank", help="case bank JSONL path")
    parser.add_argument("--out", help="output directory or file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="examforge")
    commands = parser.add_subparsers(dest="command")

    gen = commands.add_parser("gen", help="generate a blueprint-compliant exam")
    _add_common(gen)

    validate = commands.add_parser("validate", help="check an exam against the blueprint")
    validate.add_argument("--exam", required=True)
    _add_common(validate)

    grade = commands.add_parser("grade", help="score a response sheet")
    grade.add_argument("--exam", required=True)
    grade.add_argument("--responses", required=True, help="JSON file: {\"responses\": [...]}")
    _add_common(grade)

    solve = commands.add_parser("solve", help="solve an exam with the configured backend")
    solve.add_argument("--exam", required=True)
    _add_common(solve)

    tutor = commands.add_parser("tutor-sim", help="run the simulated tutoring cohort")
    tutor.add_argument("--students", type=int, default=None)
    _add_common(tutor)

    train = commands.add_parser("train-q", help="train the estimator on the toy chain")
    train.add_argument("--updates", type=int, default=3000)
    _add_common(train)

    evaluate = commands.add_parser("eval", help="run the standard workload / recompute dumps")
    evaluate.add_argument("--exams", type=int, default=None)
    evaluate.add_argument("--histories", help="recompute tutoring metrics from this dump")
    evaluate.add_argument("--report", help="report to check the recomputation against")
    _add_common(evaluate)

    ablate = commands.add_parser("ablate", help="compare memory variants")
    ablate.add_argument("--exams", type=int, default=3)
    _add_common(ablate)

    return parser


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_path or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen(args) -> int:
    config = _config_from_args(args)
    session = PipelineSession(
        backend=_backend_for(config), config=config.retrieval_config(), seed=config.seed
    )
    if config.bank_path:
        session.generator_bank = load_bank(config.bank_path)
    outcome = session.run_generate()
    out = _out_dir(config)
    exam_path = out / f"{outcome.result.exam.exam_id}.json"
    exam_path.write_bytes(serialize_exam(outcome.result.exam))
    if config.bank_path:
        save_bank(session.generator_bank, config.bank_path)
    print(f"wrote {exam_path}")
    print(
        f"compliance rate {outcome.result.compliance.rate:.3f}; "
        f"mean novelty {sum(outcome.result.novelty) / len(outcome.result.novelty):.1f}%"
    )
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _config_from_args(args)
    exam = parse_exam(Path(args.exam).read_bytes())
    report = validate_exam(exam, default_matrix())
    if report.compliant:
        print(f"{exam.exam_id}: compliant (rate 1.0)")
        return EXIT_OK
    print(f"{exam.exam_id}: rate {report.rate:.3f}, {len(report.violations)} violations")
    for violation in report.violations:
        print(
            f"  ({violation.topic}, {violation.section.value}, {int(violation.level)}): "
            f"required {violation.required}, found {violation.found}"
        )
    return EXIT_COMPLIANCE


def _cmd_grade(args) -> int:
    exam = parse_exam(Path(args.exam).read_bytes())
    payload = json.loads(Path(args.responses).read_text(encoding="utf-8"))
    raw = payload["responses"] if isinstance(payload, dict) else payload
    responses = [
        response_from_dict(entry, f"responses[{i}]") for i, entry in enumerate(raw)
    ]
    score = score_exam(exam, responses, ScoringScheme())
    print(f"total {score.total:.2f} / {score.max_total:.2f} ({score.percent:.1f}%)")
    for section, points in score.per_section.items():
        print(f"  section {section.value}: {points:.2f}")
    print(f"set perfect: {score.set_perfect}")
    return EXIT_OK


def _cmd_solve(args) -> int:
    config = _config_from_args(args)
    exam = parse_exam(Path(args.exam).read_bytes())
    session = PipelineSession(
        backend=_backend_for(config), config=config.retrieval_config(), seed=config.seed
    )
    if config.bank_path:
        session.solver_bank = load_bank(config.bank_path)
    outcome = session.run_solve(exam)
    answered = sum(1 for a in outcome.result.answers if not a.flagged)
    print(
        f"answered {answered}/{len(exam.items)}; score {outcome.score.total:.2f} "
        f"/ {outcome.score.max_total:.2f}"
    )
    if config.bank_path:
        save_bank(session.solver_bank, config.bank_path)
    return EXIT_OK


def _cmd_tutor(args) -> int:
    config = _config_from_args(args)
    report, histories = run_tutor_cohort(config, backend=_backend_for(config))
    out = _out_dir(config)
    write_report(report, out / "tutor-report.json")
    write_histories(histories, out / "tutor-histories.jsonl")
    delta = report.metrics.delta_score.value
    effectiveness = report.metrics.path_effectiveness.value
    print(
        f"students {config.students}; mean delta {delta:.2f}; "
        f"path effectiveness {effectiveness if effectiveness is None else round(effectiveness, 1)}"
    )
    print(f"wrote {out / 'tutor-report.json'} and histories")
    return EXIT_OK


def _cmd_train(args) -> int:
    config = _config_from_args(args)
    result = train_chain_estimator(updates=args.updates)
    print(
        f"chain start-state value {result.q_start:.4f} vs oracle "
        f"{result.oracle_start:.4f} (gap {result.start_gap:.4f}) "
        f"after {args.updates} updates; final loss {result.losses[-1]:.6f}"
    )
    if config.out_path:
        out = Path(config.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        result.estimator.save(out)
        print(f"wrote checkpoint {out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    if args.histories:
        histories = load_histories(args.histories)
        recomputed = [recompute_tutor_metrics(history) for history in histories]
        mismatches = 0
        for history, metrics in zip(histories, recomputed):
            if abs(history["delta_score"] - metrics.delta_score) > 1e-9:
                mismatches += 1
            reported = history["path_effectiveness"]
            actual = metrics.path_effectiveness
            if (reported is None) != (actual is None):
                mismatches += 1
            elif reported is not None and abs(reported - actual) > 1e-9:
                mismatches += 1
        print(f"recomputed {len(histories)} histories; mismatches {mismatches}")
        return EXIT_OK if mismatches == 0 else EXIT_INTERNAL

    config = _config_from_args(args)
    report, _ = run_standard_workload(config, backend=_backend_for(config))
    if config.out_path:
        out = _out_dir(config)
        write_report(report, out / "report.json")
        print(f"wrote {out / 'report.json'}")
    print(f"item accuracy {report.metrics.item_accuracy.value}")
    print(f"report-hash {report_hash(report)}")
    return EXIT_OK


def _cmd_ablate(args) -> int:
    config = _config_from_args(args)
    rows = run_ablation(config, exams=args.exams)
    print(render_ablation_table(rows))
    if config.out_path:
        out = _out_dir(config)
        payload = [row.__dict__ for row in rows]
        (out / "ablation.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
        )
        print(f"wrote {out / 'ablation.json'}")
    return EXIT_OK if not any(row.failed for row in rows) else EXIT_INTERNAL


_HANDLERS = {
    "gen": _cmd_gen,
    "validate": _cmd_validate,
    "grade": _cmd_grade,
    "solve": _cmd_solve,
    "tutor-sim": _cmd_tutor,
    "train-q": _cmd_train,
    "eval": _cmd_eval,
    "ablate": _cmd_ablate,
}


def cli_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if not args.command:
        parser.print_usage()
        return EXIT_USAGE
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ExamforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
