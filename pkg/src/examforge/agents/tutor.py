"""Error analysis, study-path recommendation, and the simulated student
(executor agent 3 plus the environment that closes its loop)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..case_memory import CaseBank
from ..errors import SimulationError
from ..exam_model import (
    CognitiveLevel,
    Exam,
    ExamItem,
    ExamScore,
    McqResponse,
    MultipleChoice,
    QuestionId,
    Response,
    Section,
    ShortAnswer,
    ShortAnswerResponse,
    SpecificationMatrix,
    TrueFalseGroup,
    TrueFalseResponse,
)
from ..mmdp import AgentAction, EnvState
from ..mmdp.policy import ActionProposer, mixture_distribution
from ..retrieval_rl import EmbeddingIndex, QEstimator, RetrievalConfig, RetrievalStats

# Guess floors per section: chance of a correct answer at zero mastery.
GUESS_FLOOR = {Section.I: 0.25, Section.II: 0.5, Section.III: 0.0}

DEFAULT_LEARNING_RATE = 0.1

# Plan styles: practice volume per unit.
PLAN_STYLES = {"light": 4, "standard": 8, "intensive": 12}


@dataclass(frozen=True)
class Skill:
    skill_id: str
    topic: str
    level: CognitiveLevel


@dataclass(frozen=True)
class SkillOntology:
    """Skill inventory aligned with the blueprint cells."""

    skills: tuple[Skill, ...]

    def __post_init__(self):
        object.__setattr__(self, "skills", tuple(self.skills))
        mapping: dict[tuple[str, CognitiveLevel], tuple[str, ...]] = {}
        for skill in self.skills:
            key = (skill.topic, skill.level)
            mapping[key] = mapping.get(key, ()) + (skill.skill_id,)
        object.__setattr__(self, "_mapping", mapping)

    def skills_for(self, topic: str, level: CognitiveLevel) -> tuple[str, ...]:
        return self._mapping.get((topic, level), ())

    def skill(self, skill_id: str) -> Skill:
        for skill in self.skills:
            if skill.skill_id == skill_id:
                return skill
        raise KeyError(f"unknown skill {skill_id!r}")

    def check_covers(self, matrix: SpecificationMatrix) -> None:
        for (topic, _, level), count in matrix.required_cells():
            if count > 0 and not self.skills_for(topic, level):
                raise ValueError(f"no skill covers blueprint cell ({topic}, level {int(level)})")


def default_ontology(matrix: SpecificationMatrix) -> SkillOntology:
    """One skill per (topic, level) pair the blueprint requires."""
    seen: dict[tuple[str, CognitiveLevel], Skill] = {}
    for (topic, _, level), _count in matrix.required_cells():
        if (topic, level) not in seen:
            code = matrix.topic_code(topic)
            seen[(topic, level)] = Skill(f"S{code}.{int(level)}", topic, level)
    ontology = SkillOntology(tuple(seen.values()))
    ontology.check_covers(matrix)
    return ontology


@dataclass(frozen=True)
class AttemptRecord:
    item_id: str
    skill_id: str
    correct: bool
    timestamp: float


@dataclass(frozen=True)
class StudentProfile:
    student_id: str
    mastery: Mapping[str, float] = field(default_factory=dict)
    history: tuple[AttemptRecord, ...] = ()

    def __post_init__(self):
        clamped = {k: min(max(float(v), 0.0), 1.0) for k, v in self.mastery.items()}
        object.__setattr__(self, "mastery", clamped)
        object.__setattr__(self, "history", tuple(self.history))

    def mastery_of(self, skill_id: str) -> float:
        return self.mastery.get(skill_id, 0.0)

    def practiced(self, skill_id: str, item_id: str, correct: bool, learning_rate: float) -> "StudentProfile":
        mastery = dict(self.mastery)
        current = mastery.get(skill_id, 0.0)
        mastery[skill_id] = current + learning_rate * (1.0 - current)
        record = AttemptRecord(item_id, skill_id, correct, float(len(self.history)))
        return StudentProfile(self.student_id, mastery, self.history + (record,))

    def text_rendering(self) -> str:
        parts = [f"student {self.student_id}"]
        for skill_id in sorted(self.mastery):
            parts.append(f"{skill_id}={self.mastery[skill_id]:.3f}")
        return " ".join(parts)


# ----------------------------------------------------------------------
# error analysis


@dataclass(frozen=True)
class SkillGap:
    skill_id: str
    error_rate: float
    attempts: int
    errors: int


@dataclass(frozen=True)
class GapReport:
    gaps: tuple[SkillGap, ...]
    per_skill: Mapping[str, tuple[int, int]]  # skill -> (attempts, errors)
    unmapped_items: tuple[str, ...]


def analyze_errors(
    profile: StudentProfile,
    exam: Exam,
    scores: ExamScore,
    ontology: SkillOntology,
    threshold: float = 0.5,
    min_attempts: int = 2,
) -> GapReport:
    """Map wrong answers to skill gaps.

    A gap is a skill with error rate above the threshold on at least
    min_attempts attempts; items whose (topic, level) has no skill are
    reported as unmapped rather than failing the analysis.
    """
    attempts: dict[str, int] = {}
    errors: dict[str, int] = {}
    unmapped: list[str] = []
    for item, score in zip(exam.items, scores.item_scores):
        skills = ontology.skills_for(item.topic, item.level)
        if not skills:
            unmapped.append(item.id.render())
            continue
        for skill_id in skills:
            attempts[skill_id] = attempts.get(skill_id, 0) + 1
            if not score.full_credit:
                errors[skill_id] = errors.get(skill_id, 0) + 1

    gaps = []
    for skill_id, n in attempts.items():
        wrong = errors.get(skill_id, 0)
        rate = wrong / n
        if n >= min_attempts and rate > threshold:
            gaps.append(SkillGap(skill_id, rate, n, wrong))
    gaps.sort(key=lambda gap: (-gap.error_rate, gap.skill_id))
    per_skill = {skill_id: (n, errors.get(skill_id, 0)) for skill_id, n in attempts.items()}
    return GapReport(tuple(gaps), per_skill, tuple(unmapped))


# ----------------------------------------------------------------------
# study-path recommendation


@dataclass(frozen=True)
class PracticeUnit:
    skill_id: str
    item_count: int
    target_level: CognitiveLevel


@dataclass(frozen=True)
class StudyPlan:
    units: tuple[PracticeUnit, ...]
    rationale: str
    style: str = "standard"


class PlanStyleProposer(ActionProposer):
    """Adapts a retrieved tutoring case into a plan-style choice.

    A case that recorded a successful plan proposes its style outright;
    anything else falls back to the standard style.
    """

    def propose(self, state, case):
        if case is not None and case.success:
            style = case.annotations.get("style")
            if style in PLAN_STYLES:
                return ((AgentAction(f"plan style: {style}", {"style": style}), 1.0),)
        return ((AgentAction("plan style: standard", {"style": "standard"}), 1.0),)


def gap_state_text(profile: StudentProfile, gaps: Sequence[SkillGap]) -> str:
    gap_part = " ".join(f"{gap.skill_id}:{gap.error_rate:.2f}" for gap in gaps)
    return f"recommend path: {profile.text_rendering()} gaps: {gap_part or 'none'}"


def recommend_path(
    profile: StudentProfile,
    gaps: Sequence[SkillGap],
    bank: CaseBank,
    config: RetrievalConfig,
    estimator: QEstimator,
    ontology: SkillOntology,
    seed: int = 0,
    proposer: ActionProposer | None = None,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> StudyPlan:
    """Build a study plan ordered by gap severity.

    The practice volume per unit comes from the case-mixture policy: the
    retrieved tutoring cases vote on a plan style through the proposer and
    the highest-probability style wins (ties break lexicographically).
    """
    if not gaps:
        return StudyPlan((), "no gaps detected; practice plan not required", "standard")

    proposer = proposer or PlanStyleProposer()
    state = EnvState(gap_state_text(profile, gaps))
    actions, probabilities, _, _ = mixture_distribution(
        state, bank, config, estimator, proposer, index=index, stats=stats
    )
    best = max(zip(actions, probabilities), key=lambda pair: (pair[1], pair[0].text))
    style = best[0].annotations.get("style", "standard")
    item_count = PLAN_STYLES[style]

    ordered = sorted(gaps, key=lambda gap: (-gap.error_rate, gap.skill_id))
    units = tuple(
        PracticeUnit(gap.skill_id, item_count, ontology.skill(gap.skill_id).level)
        for gap in ordered
    )
    rationale = (
        f"{len(units)} gaps ranked by error rate; {style} plan "
        f"({item_count} items per unit)"
    )
    return StudyPlan(units, rationale, style)


def practice_item(skill: Skill, matrix: SpecificationMatrix, index: int) -> ExamItem:
    """A minimal short-answer drill item for one skill."""
    code = matrix.topic_code(skill.topic)
    return ExamItem(
        id=QuestionId(code, Section.III, skill.level, index),
        topic=skill.topic,
        level=skill.level,
        stem=f"practice drill {index + 1} for {skill.topic}",
        body=ShortAnswer(1.0, 2),
        solution="Step 1: apply the practiced technique.",
    )


# ----------------------------------------------------------------------
# simulated student


def simulate_student_step(
    profile: StudentProfile,
    item: ExamItem,
    ontology: SkillOntology,
    rng: np.random.Generator,
    learning_rate: float = DEFAULT_LEARNING_RATE,
) -> tuple[Response, StudentProfile]:
    """Answer one item as the simulated learner and practice its skill.

    Correctness probability is g + (1-g) * mastery with the per-section
    guess floor g (per statement for true/false groups). Practicing moves
    mastery up by learning_rate * (1 - mastery), clamped to [0, 1].
    """
    skills = ontology.skills_for(item.topic, item.level)
    if not skills:
        raise SimulationError(
            f"item {item.id.render()} has no mapped skill for "
            f"({item.topic}, level {int(item.level)})"
        )
    skill_id = skills[0]
    mastery = profile.mastery_of(skill_id)
    floor = GUESS_FLOOR[item.section]
    p_correct = floor + (1.0 - floor) * mastery

    body = item.body
    response: Response
    if isinstance(body, MultipleChoice):
        if rng.random() < p_correct:
            response = McqResponse(body.key)
        else:
            wrong = [i for i in range(4) if i != body.key]
            response = McqResponse(wrong[int(rng.integers(3))])
        correct = response.chosen == body.key
    elif isinstance(body, TrueFalseGroup):
        values = tuple(
            bit if rng.random() < p_correct else not bit for bit in body.key
        )
        response = TrueFalseResponse(values)
        correct = values == body.key
    elif isinstance(body, ShortAnswer):
        if rng.random() < p_correct:
            response = ShortAnswerResponse(body.key)
            correct = True
        else:
            response = ShortAnswerResponse(body.key + float(rng.integers(1, 10)))
            correct = False
    else:
        raise SimulationError(f"unknown body variant {type(body).__name__}")

    updated = profile.practiced(skill_id, item.id.render(), correct, learning_rate)
    return response, updated


def simulate_exam(
    profile: StudentProfile,
    exam: Exam,
    ontology: SkillOntology,
    rng: np.random.Generator,
    learning_rate: float = 0.0,
) -> tuple[list[Response], StudentProfile]:
    """Answer a whole exam as the simulated learner.

    Assessments use learning_rate 0 so taking the test does not itself move
    mastery; practice sessions pass the real rate.
    """
    responses: list[Response] = []
    for item in exam.items:
        response, profile = simulate_student_step(
            profile, item, ontology, rng, learning_rate
        )
        responses.append(response)
    return responses, profile


# ----------------------------------------------------------------------
# outcome metrics


@dataclass(frozen=True)
class AssessmentRecord:
    exam: Exam
    scores: ExamScore

    @property
    def percent(self) -> float:
        return self.scores.percent


@dataclass(frozen=True)
class TutoringMetrics:
    delta_score: float
    path_effectiveness: float | None
    repeated_errors_before: int
    repeated_errors_after: int

    @property
    def effectiveness_available(self) -> bool:
        return self.path_effectiveness is not None


def repeated_error_skills(record: AssessmentRecord, ontology: SkillOntology) -> set[str]:
    """Skills answered wrongly on at least two distinct attempts."""
    errors: dict[str, int] = {}
    for item, score in zip(record.exam.items, record.scores.item_scores):
        if score.full_credit:
            continue
        for skill_id in ontology.skills_for(item.topic, item.level):
            errors[skill_id] = errors.get(skill_id, 0) + 1
    return {skill_id for skill_id, count in errors.items() if count >= 2}


def tutoring_metrics(
    pre: AssessmentRecord,
    post: AssessmentRecord,
    ontology: SkillOntology,
) -> TutoringMetrics:
    """Score gain on the 0-100 scale plus repeated-error reduction.

    Path effectiveness is undefined (None) when the pre assessment had no
    repeated-error skill to resolve.
    """
    before = repeated_error_skills(pre, ontology)
    after = repeated_error_skills(post, ontology)
    delta = post.percent - pre.percent
    if before:
        effectiveness = 100.0 * (1.0 - len(after) / len(before))
    else:
        effectiveness = None
    return TutoringMetrics(delta, effectiveness, len(before), len(after))
