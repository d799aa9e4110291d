"""Planner-executor orchestration.

A session owns one run's state: per-role case banks, the value estimator,
the retrieval call counters, and the append-only subtask/tool logs. Each
run_* method plans the request, walks the subtasks forward, and logs every
backend interaction, so a recorded session can be audited or replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..case_memory import CaseBank, MemoryLog, SubtaskLogEntry, ToolLogEntry
from ..errors import GenerationError
from ..exam_model import (
    ComplianceReport,
    Exam,
    ExamScore,
    Response,
    ScoringScheme,
    SpecificationMatrix,
    default_matrix,
    score_exam,
    validate_exam,
)
from ..mmdp import CompositeRewardConfig, composite_reward
from ..retrieval_rl import (
    DEFAULT_DIM,
    EmbeddingIndex,
    QEstimator,
    RetrievalConfig,
    RetrievalStats,
)
from .backend import ChatBackend
from .generator import GenerationResult, generate_exam
from .planner import PlannerRequest, RequestKind, Subtask, SubtaskStatus, plan
from .solver import SolveResult, solve_exam
from .tutor import (
    AssessmentRecord,
    GapReport,
    SkillOntology,
    StudentProfile,
    StudyPlan,
    TutoringMetrics,
    analyze_errors,
    default_ontology,
    gap_state_text,
    practice_item,
    recommend_path,
    simulate_exam,
    tutoring_metrics,
)

RETRY_BUDGET = 3


@dataclass
class GenerateOutcome:
    subtasks: list[Subtask]
    result: GenerationResult
    regenerations: int


@dataclass
class SolveOutcome:
    subtasks: list[Subtask]
    result: SolveResult
    score: ExamScore
    compliance: ComplianceReport


@dataclass
class TutorOutcome:
    subtasks: list[Subtask]
    pre: AssessmentRecord
    post: AssessmentRecord
    pre_responses: list[Response]
    post_responses: list[Response]
    gaps: GapReport
    plan: StudyPlan
    metrics: TutoringMetrics
    profile: StudentProfile
    practice_items: int


@dataclass
class PipelineSession:
    """One user-facing run: isolated banks, estimator, logs, counters."""

    backend: ChatBackend
    config: RetrievalConfig = field(default_factory=RetrievalConfig)
    matrix: SpecificationMatrix = field(default_factory=default_matrix)
    scheme: ScoringScheme = field(default_factory=ScoringScheme)
    seed: int = 0
    estimator: QEstimator | None = None
    generator_bank: CaseBank = field(default_factory=CaseBank)
    solver_bank: CaseBank = field(default_factory=CaseBank)
    tutor_bank: CaseBank = field(default_factory=CaseBank)
    ontology: SkillOntology | None = None
    reward_config: CompositeRewardConfig = field(default_factory=CompositeRewardConfig)

    def __post_init__(self):
        if self.estimator is None:
            self.estimator = QEstimator(dim=self.config.dim, alpha=self.config.alpha)
        if self.ontology is None:
            self.ontology = default_ontology(self.matrix)
        self.log = MemoryLog()
        self.stats = RetrievalStats()
        self.index = EmbeddingIndex(self.config.dim)
        self._clock = 0

    # ------------------------------------------------------------------

    def _tick(self) -> float:
        self._clock += 1
        return float(self._clock)

    def _start(self, request: PlannerRequest) -> list[Subtask]:
        subtasks = plan(request)
        for subtask in subtasks:
            self.log.append(
                SubtaskLogEntry(
                    entry_id=subtask.subtask_id,
                    parent_request_id=request.kind.value,
                    payload=str(dict(subtask.payload)),
                    outcome="planned",
                    timestamp=self._tick(),
                )
            )
        return subtasks

    def _finish(self, subtask: Subtask, outcome: str) -> None:
        subtask.advance(
            SubtaskStatus.DONE if outcome == "done" else SubtaskStatus.FAILED
        )
        self.log.append(
            ToolLogEntry(
                entry_id=f"{subtask.subtask_id}:{outcome}",
                parent_subtask_id=subtask.subtask_id,
                payload="",
                outcome=outcome,
                timestamp=self._tick(),
            )
        )

    def _append_subtask(self, request_kind: str, role: str, index: int) -> Subtask:
        subtask = Subtask(subtask_id=f"{request_kind}:extra{index}:{role}", role=role)
        self.log.append(
            SubtaskLogEntry(
                entry_id=subtask.subtask_id,
                parent_request_id=request_kind,
                payload="",
                outcome="appended",
                timestamp=self._tick(),
            )
        )
        return subtask

    # ------------------------------------------------------------------

    def run_generate(
        self,
        seed: int | None = None,
        validate_hook: Callable[[Exam], ComplianceReport] | None = None,
        **generate_kwargs,
    ) -> GenerateOutcome:
        """Generate, validate, and (on violation) regenerate up to the budget."""
        seed = self.seed if seed is None else seed
        validate_hook = validate_hook or (lambda exam: validate_exam(exam, self.matrix))
        request = PlannerRequest(RequestKind.GENERATE_EXAM, {"seed": seed})
        subtasks = self._start(request)
        generate_task, validate_task = subtasks[0], subtasks[1]

        regenerations = 0
        attempt_seed = seed
        while True:
            task = subtasks[-1] if regenerations else generate_task
            task.advance(SubtaskStatus.RUNNING)
            result = generate_exam(
                self.matrix,
                self.generator_bank,
                self.backend,
                self.config,
                self.estimator,
                attempt_seed,
                retain_into=self.generator_bank,
                index=self.index,
                stats=self.stats,
                **generate_kwargs,
            )
            self._finish(task, "done")

            if regenerations == 0:
                validate_task.advance(SubtaskStatus.RUNNING)
            compliance = validate_hook(result.exam)
            if compliance.compliant:
                if validate_task.status is not SubtaskStatus.DONE:
                    self._finish(validate_task, "done")
                return GenerateOutcome(subtasks, result, regenerations)

            if regenerations >= RETRY_BUDGET:
                self._finish(validate_task, "failed")
                raise GenerationError(
                    f"exam failed validation after {regenerations} regenerations"
                )
            regenerations += 1
            attempt_seed = seed + 1000 * regenerations
            subtasks.append(
                self._append_subtask(request.kind.value, "regenerate", regenerations)
            )

    # ------------------------------------------------------------------

    def run_solve(self, exam: Exam, seed: int | None = None) -> SolveOutcome:
        """Normalize, solve, and grade one exam; solved items are retained."""
        seed = self.seed if seed is None else seed
        request = PlannerRequest(RequestKind.SOLVE_EXAM, {"exam_id": exam.exam_id})
        subtasks = self._start(request)
        normalize_task, solve_task, grade_task = subtasks

        normalize_task.advance(SubtaskStatus.RUNNING)
        compliance = validate_exam(exam, self.matrix)
        self._finish(normalize_task, "done")

        solve_task.advance(SubtaskStatus.RUNNING)
        result = solve_exam(
            exam,
            self.solver_bank,
            self.backend,
            self.config,
            self.estimator,
            seed,
            scheme=self.scheme,
            retain_into=self.solver_bank,
            index=self.index,
            stats=self.stats,
        )
        self._finish(solve_task, "done")

        grade_task.advance(SubtaskStatus.RUNNING)
        score = score_exam(exam, result.responses(), self.scheme)
        self._finish(grade_task, "done")
        return SolveOutcome(subtasks, result, score, compliance)

    # ------------------------------------------------------------------

    def run_tutor(
        self,
        profile: StudentProfile,
        pre_exam: Exam,
        post_exam: Exam,
        seed: int | None = None,
        learning_rate: float = 0.1,
        gap_threshold: float = 0.5,
        min_attempts: int = 2,
    ) -> TutorOutcome:
        """Assess, recommend, practice, re-assess one simulated student."""
        seed = self.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        request = PlannerRequest(RequestKind.TUTOR_STUDENT, {"student": profile.student_id})
        subtasks = self._start(request)
        analyze_task, recommend_task, simulate_task = subtasks

        analyze_task.advance(SubtaskStatus.RUNNING)
        pre_responses, profile = simulate_exam(profile, pre_exam, self.ontology, rng, 0.0)
        pre_scores = score_exam(pre_exam, list(pre_responses), self.scheme)
        pre_record = AssessmentRecord(pre_exam, pre_scores)
        gaps = analyze_errors(
            profile,
            pre_exam,
            pre_scores,
            self.ontology,
            threshold=gap_threshold,
            min_attempts=min_attempts,
        )
        self._finish(analyze_task, "done")

        recommend_task.advance(SubtaskStatus.RUNNING)
        study_plan = recommend_path(
            profile,
            gaps.gaps,
            self.tutor_bank,
            self.config,
            self.estimator,
            self.ontology,
            seed=seed,
            index=self.index,
            stats=self.stats,
        )
        self._finish(recommend_task, "done")

        simulate_task.advance(SubtaskStatus.RUNNING)
        practiced = 0
        for unit in study_plan.units:
            skill = self.ontology.skill(unit.skill_id)
            for i in range(unit.item_count):
                item = practice_item(skill, self.matrix, i)
                _, profile = self._practice(profile, item, rng, learning_rate)
                practiced += 1
        post_responses, profile = simulate_exam(profile, post_exam, self.ontology, rng, 0.0)
        post_scores = score_exam(post_exam, list(post_responses), self.scheme)
        post_record = AssessmentRecord(post_exam, post_scores)
        metrics = tutoring_metrics(pre_record, post_record, self.ontology)
        self._finish(simulate_task, "done")

        self._retain_tutor_case(profile, gaps, study_plan, metrics)
        return TutorOutcome(
            subtasks=subtasks,
            pre=pre_record,
            post=post_record,
            pre_responses=list(pre_responses),
            post_responses=list(post_responses),
            gaps=gaps,
            plan=study_plan,
            metrics=metrics,
            profile=profile,
            practice_items=practiced,
        )

    def _practice(self, profile, item, rng, learning_rate):
        from .tutor import simulate_student_step

        return simulate_student_step(profile, item, self.ontology, rng, learning_rate)

    def _retain_tutor_case(self, profile, gaps, study_plan, metrics) -> None:
        gain = min(max(metrics.delta_score / 100.0, 0.0), 1.0)
        reward = composite_reward(gain, 0.0, 1.0, self.reward_config)
        case = self.tutor_bank.new_case(
            state_text=gap_state_text(profile, gaps.gaps),
            action_text=f"STYLE: {study_plan.style}",
            reward=reward,
            success=metrics.delta_score > 0,
            annotations={"style": study_plan.style},
        )
        self.tutor_bank.retain(case)
