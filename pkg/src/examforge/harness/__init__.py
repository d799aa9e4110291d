"""Experiment harness: fixtures, metrics, pipelines, ablation, CLI."""

from .config import RunConfig
from .fixtures import (
    correct_responses,
    fixture_corpus,
    fixture_exam,
    grading_fixture_items,
    oracle_bank,
    perturb_remove_item,
    perturb_unknown_topic,
    seed_oracle_estimator,
    wrong_responses,
)
from .metrics import MetricValue, MetricsReport, SolvedExamRecord, compute_metrics
from .pipelines import (
    RunReport,
    recompute_tutor_metrics,
    report_hash,
    report_to_json,
    run_standard_workload,
    run_tutor_cohort,
)
from .ablation import AblationRow, render_ablation_table, run_ablation

__all__ = [
    "AblationRow",
    "MetricValue",
    "MetricsReport",
    "RunConfig",
    "RunReport",
    "SolvedExamRecord",
    "compute_metrics",
    "correct_responses",
    "fixture_corpus",
    "fixture_exam",
    "grading_fixture_items",
    "oracle_bank",
    "perturb_remove_item",
    "perturb_unknown_topic",
    "recompute_tutor_metrics",
    "render_ablation_table",
    "report_hash",
    "report_to_json",
    "run_ablation",
    "run_standard_workload",
    "run_tutor_cohort",
    "seed_oracle_estimator",
    "wrong_responses",
]
