"""Planner-executor layer and the three executor agents."""

from .backend import ChatBackend, DecodeParams, HttpBackend, MockBackend
from .planner import PlannerRequest, RequestKind, Subtask, SubtaskStatus, plan
from .generator import GenerationResult, generate_exam
from .solver import ItemAnswer, SolveResult, normalize_input, solve_exam, solver_state_text
from .tutor import (
    AssessmentRecord,
    GapReport,
    PracticeUnit,
    SkillGap,
    SkillOntology,
    StudentProfile,
    StudyPlan,
    TutoringMetrics,
    analyze_errors,
    default_ontology,
    recommend_path,
    simulate_student_step,
    tutoring_metrics,
)
from .session import PipelineSession

__all__ = [
    "AssessmentRecord",
    "ChatBackend",
    "DecodeParams",
    "GapReport",
    "GenerationResult",
    "HttpBackend",
    "ItemAnswer",
    "MockBackend",
    "PipelineSession",
    "PlannerRequest",
    "PracticeUnit",
    "RequestKind",
    "SkillGap",
    "SkillOntology",
    "SolveResult",
    "StudentProfile",
    "StudyPlan",
    "Subtask",
    "SubtaskStatus",
    "TutoringMetrics",
    "analyze_errors",
    "default_ontology",
    "generate_exam",
    "normalize_input",
    "plan",
    "recommend_path",
    "simulate_student_step",
    "solve_exam",
    "solver_state_text",
    "tutoring_metrics",
]
