"""Evaluation metrics with per-field provenance.

Every metric records whether it was computed here, passed through from an
external ratings file, or unavailable. Human-rated qualities (teacher
rating, explanation quality, engagement) are never computed: they only
ever appear as recorded pass-throughs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..agents.tutor import TutoringMetrics
from ..exam_model import ComplianceReport, Exam, ExamScore, Section

COMPUTED = "computed"
RECORDED = "recorded"
UNAVAILABLE = "unavailable"

DEFAULT_MIN_STEPS = 2


@dataclass(frozen=True)
class MetricValue:
    value: float | None
    provenance: str

    @classmethod
    def computed(cls, value: float) -> "MetricValue":
        return cls(float(value), COMPUTED)

    @classmethod
    def recorded(cls, value: float) -> "MetricValue":
        return cls(float(value), RECORDED)

    @classmethod
    def unavailable(cls) -> "MetricValue":
        return cls(None, UNAVAILABLE)

    def to_dict(self) -> dict:
        return {"value": self.value, "provenance": self.provenance}


@dataclass(frozen=True)
class SolvedExamRecord:
    """One graded exam plus the per-item worked-steps texts."""

    exam: Exam
    score: ExamScore
    steps: tuple[str, ...]
    answered: tuple[bool, ...]

    def __post_init__(self):
        if len(self.steps) != len(self.exam.items) or len(self.answered) != len(
            self.exam.items
        ):
            raise ValueError("steps and answered flags must align with items")


@dataclass(frozen=True)
class MetricsReport:
    item_accuracy: MetricValue
    set_level_accuracy: MetricValue
    section_accuracy: Mapping[str, MetricValue]
    compliance_rate: MetricValue
    mean_novelty: MetricValue
    step_completeness: MetricValue
    delta_score: MetricValue
    path_effectiveness: MetricValue
    latency_mean_s: MetricValue
    latency_p95_s: MetricValue
    teacher_rating: MetricValue = field(default_factory=MetricValue.unavailable)
    explanation_quality: MetricValue = field(default_factory=MetricValue.unavailable)
    engagement: MetricValue = field(default_factory=MetricValue.unavailable)

    def to_dict(self) -> dict:
        return {
            "item_accuracy": self.item_accuracy.to_dict(),
            "set_level_accuracy": self.set_level_accuracy.to_dict(),
            "section_accuracy": {
                name: value.to_dict() for name, value in self.section_accuracy.items()
            },
            "compliance_rate": self.compliance_rate.to_dict(),
            "mean_novelty": self.mean_novelty.to_dict(),
            "step_completeness": self.step_completeness.to_dict(),
            "delta_score": self.delta_score.to_dict(),
            "path_effectiveness": self.path_effectiveness.to_dict(),
            "latency_mean_s": self.latency_mean_s.to_dict(),
            "latency_p95_s": self.latency_p95_s.to_dict(),
            "teacher_rating": self.teacher_rating.to_dict(),
            "explanation_quality": self.explanation_quality.to_dict(),
            "engagement": self.engagement.to_dict(),
        }


def _step_count(steps_text: str) -> int:
    return sum(1 for line in steps_text.splitlines() if line.strip())


def compute_metrics(
    solved: Sequence[SolvedExamRecord] = (),
    compliance: Sequence[ComplianceReport] = (),
    novelty: Sequence[float] = (),
    tutoring: Sequence[TutoringMetrics] = (),
    latencies_s: Sequence[float] = (),
    recorded_ratings: Mapping[str, float] | None = None,
    min_steps: int = DEFAULT_MIN_STEPS,
) -> MetricsReport:
    """Aggregate run artifacts into the metrics report.

    Accuracies are percentages with full credit as the bar for a correct
    item. Set-level counts perfectly solved exams. The step-completeness
    proxy is the share of answered items whose worked steps hold at least
    min_steps non-empty lines (the published rubric is human-rated; this
    is declared a proxy). Empty inputs yield unavailable fields, not zeros.
    """
    if solved:
        total = sum(len(record.exam.items) for record in solved)
        correct = sum(
            sum(1 for s in record.score.item_scores if s.full_credit)
            for record in solved
        )
        item_accuracy = MetricValue.computed(100.0 * correct / total)
        set_level = MetricValue.computed(
            100.0 * sum(1 for r in solved if r.score.set_perfect) / len(solved)
        )
        section_accuracy = {}
        for section in Section:
            attempted = 0
            right = 0
            for record in solved:
                for item, score in zip(record.exam.items, record.score.item_scores):
                    if item.section is section:
                        attempted += 1
                        right += 1 if score.full_credit else 0
            section_accuracy[section.value] = (
                MetricValue.computed(100.0 * right / attempted)
                if attempted
                else MetricValue.unavailable()
            )
        answered_steps = [
            _step_count(steps) >= min_steps
            for record in solved
            for steps, answered in zip(record.steps, record.answered)
            if answered
        ]
        step_completeness = (
            MetricValue.computed(100.0 * sum(answered_steps) / len(answered_steps))
            if answered_steps
            else MetricValue.unavailable()
        )
    else:
        item_accuracy = MetricValue.unavailable()
        set_level = MetricValue.unavailable()
        section_accuracy = {section.value: MetricValue.unavailable() for section in Section}
        step_completeness = MetricValue.unavailable()

    compliance_rate = (
        MetricValue.computed(100.0 * float(np.mean([r.rate for r in compliance])))
        if compliance
        else MetricValue.unavailable()
    )
    mean_novelty = (
        MetricValue.computed(float(np.mean(list(novelty))))
        if len(novelty)
        else MetricValue.unavailable()
    )

    if tutoring:
        delta_score = MetricValue.computed(
            float(np.mean([m.delta_score for m in tutoring]))
        )
        available = [
            m.path_effectiveness for m in tutoring if m.path_effectiveness is not None
        ]
        path_effectiveness = (
            MetricValue.computed(float(np.mean(available)))
            if available
            else MetricValue.unavailable()
        )
    else:
        delta_score = MetricValue.unavailable()
        path_effectiveness = MetricValue.unavailable()

    if latencies_s:
        latency_mean = MetricValue.computed(float(np.mean(list(latencies_s))))
        latency_p95 = MetricValue.computed(float(np.percentile(list(latencies_s), 95)))
    else:
        latency_mean = MetricValue.unavailable()
        latency_p95 = MetricValue.unavailable()

    ratings = recorded_ratings or {}

    def _recorded(name: str) -> MetricValue:
        return (
            MetricValue.recorded(ratings[name])
            if name in ratings
            else MetricValue.unavailable()
        )

    return MetricsReport(
        item_accuracy=item_accuracy,
        set_level_accuracy=set_level,
        section_accuracy=section_accuracy,
        compliance_rate=compliance_rate,
        mean_novelty=mean_novelty,
        step_completeness=step_completeness,
        delta_score=delta_score,
        path_effectiveness=path_effectiveness,
        latency_mean_s=latency_mean,
        latency_p95_s=latency_p95,
        teacher_rating=_recorded("teacher_rating"),
        explanation_quality=_recorded("explanation_quality"),
        engagement=_recorded("engagement"),
    )
