"""Exam blueprint, item formats, compliance, grading, novelty, interchange."""

from .types import (
    CognitiveLevel,
    Exam,
    ExamItem,
    ExamScore,
    ItemScore,
    McqResponse,
    MultipleChoice,
    Provenance,
    QuestionId,
    Response,
    ScoringScheme,
    Section,
    ShortAnswer,
    ShortAnswerResponse,
    TrueFalseGroup,
    TrueFalseResponse,
    make_question_id,
)
from .blueprint import ComplianceReport, SpecificationMatrix, default_matrix, validate_exam
from .grading import grade_item, score_exam
from .novelty import novelty_overlap, ngram_jaccard
from .serialization import parse_exam, serialize_exam

__all__ = [
    "CognitiveLevel",
    "ComplianceReport",
    "Exam",
    "ExamItem",
    "ExamScore",
    "ItemScore",
    "McqResponse",
    "MultipleChoice",
    "Provenance",
    "QuestionId",
    "Response",
    "ScoringScheme",
    "Section",
    "ShortAnswer",
    "ShortAnswerResponse",
    "SpecificationMatrix",
    "TrueFalseGroup",
    "TrueFalseResponse",
    "default_matrix",
    "grade_item",
    "make_question_id",
    "ngram_jaccard",
    "novelty_overlap",
    "parse_exam",
    "score_exam",
    "serialize_exam",
    "validate_exam",
]
