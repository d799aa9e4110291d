"""Memory-variant ablation: no memory vs similarity vs learned retrieval.

Every variant runs the identical seeded workload (fixture exams, oracle
case bank) in its own isolated session, so rows depend only on the
retrieval mode. Columns mirror the usual comparison: overall item
accuracy, application-level ("hard") item accuracy, the step proxy, and
per-exam wall latency.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..agents import MockBackend, PipelineSession
from ..exam_model import CognitiveLevel
from .config import RunConfig
from .fixtures import fixture_corpus, oracle_bank, seed_oracle_estimator
from .metrics import SolvedExamRecord, compute_metrics

DEFAULT_VARIANTS = ("none", "readnp", "readp")


@dataclass
class AblationRow:
    variant: str
    item_accuracy: float | None
    hard_item_accuracy: float | None
    step_completeness: float | None
    latency_mean_s: float | None
    retrieval_calls: int
    failed: bool = False
    error: str = ""


def _hard_item_accuracy(solved: list[SolvedExamRecord]) -> float | None:
    attempted = 0
    correct = 0
    for record in solved:
        for item, score in zip(record.exam.items, record.score.item_scores):
            if item.level is CognitiveLevel.APPLICATION:
                attempted += 1
                correct += 1 if score.full_credit else 0
    return 100.0 * correct / attempted if attempted else None


def run_ablation(
    base_config: RunConfig,
    variants: tuple[str, ...] = DEFAULT_VARIANTS,
    exams: int = 3,
) -> list[AblationRow]:
    """Run the seeded solve workload once per memory variant.

    A crashing variant yields a failed row; the others are unaffected.
    """
    rows: list[AblationRow] = []
    for variant in variants:
        try:
            rows.append(_run_variant(base_config, variant, exams))
        except Exception as exc:
            rows.append(
                AblationRow(
                    variant=variant,
                    item_accuracy=None,
                    hard_item_accuracy=None,
                    step_completeness=None,
                    latency_mean_s=None,
                    retrieval_calls=0,
                    failed=True,
                    error=str(exc),
                )
            )
    return rows


def _run_variant(base_config: RunConfig, variant: str, exams: int) -> AblationRow:
    config = RunConfig(**{**base_config.to_dict(), "mode": variant})
    session = PipelineSession(
        backend=MockBackend(), config=config.retrieval_config(), seed=config.seed
    )
    workload = fixture_corpus(exams, base_seed=config.seed + 100)
    session.solver_bank = oracle_bank(workload)
    seed_oracle_estimator(session.estimator, session.solver_bank)

    solved: list[SolvedExamRecord] = []
    latencies: list[float] = []
    for i, exam in enumerate(workload):
        start = time.perf_counter()
        outcome = session.run_solve(exam, seed=config.seed + i)
        latencies.append(time.perf_counter() - start)
        solved.append(
            SolvedExamRecord(
                exam=exam,
                score=outcome.score,
                steps=tuple(answer.steps for answer in outcome.result.answers),
                answered=tuple(not answer.flagged for answer in outcome.result.answers),
            )
        )

    metrics = compute_metrics(solved=solved, latencies_s=latencies)
    return AblationRow(
        variant=variant,
        item_accuracy=metrics.item_accuracy.value,
        hard_item_accuracy=_hard_item_accuracy(solved),
        step_completeness=metrics.step_completeness.value,
        latency_mean_s=metrics.latency_mean_s.value,
        retrieval_calls=session.stats.total_calls,
    )


def render_ablation_table(rows: list[AblationRow]) -> str:
    header = f"{'variant':<10} {'item acc':>9} {'hard acc':>9} {'steps':>7} {'latency s':>10} {'calls':>6}"
    lines = [header, "-" * len(header)]
    for row in rows:
        if row.failed:
            lines.append(f"{row.variant:<10} FAILED: {row.error}")
            continue

        def fmt(value, width):
            return f"{value:>{width}.1f}" if value is not None else " " * (width - 1) + "-"

        lines.append(
            f"{row.variant:<10} {fmt(row.item_accuracy, 9)} {fmt(row.hard_item_accuracy, 9)} "
            f"{fmt(row.step_completeness, 7)} "
            f"{row.latency_mean_s if row.latency_mean_s is not None else 0:>10.4f} "
            f"{row.retrieval_calls:>6}"
        )
    return "\n".join(lines)
