"""Specification matrix (blueprint) and compliance validation."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .types import CognitiveLevel, Exam, Section

CellKey = tuple[str, Section, CognitiveLevel]

DEFAULT_SECTION_TOTALS = {Section.I: 12, Section.II: 4, Section.III: 6}


@dataclass(frozen=True)
class SpecificationMatrix:
    """Blueprint mapping (topic, section, cognitive level) to a required item count.

    Per-section totals are part of the profile contract; the default 2025
    profile fixes them at 12/4/6 for Sections I/II/III.
    """

    topics: tuple[str, ...]
    cells: dict[CellKey, int] = field(compare=False)
    section_totals: dict[Section, int] = field(
        compare=False, default_factory=lambda: dict(DEFAULT_SECTION_TOTALS)
    )

    def __post_init__(self):
        object.__setattr__(self, "topics", tuple(self.topics))
        if len(set(self.topics)) != len(self.topics):
            raise ValueError("topics must be unique")
        for (topic, section, level), count in self.cells.items():
            if topic not in self.topics:
                raise ValueError(f"cell topic {topic!r} missing from topics")
            if count < 0:
                raise ValueError(f"negative required count for {(topic, section, level)}")
        for section, expected in self.section_totals.items():
            total = sum(
                count for (_, sec, _), count in self.cells.items() if sec is section
            )
            if total != expected:
                raise ValueError(
                    f"section {section.value} requires {expected} items, cells sum to {total}"
                )

    def topic_code(self, topic: str) -> int:
        """1-based position of a topic in the blueprint ordering."""
        try:
            return self.topics.index(topic) + 1
        except ValueError:
            raise KeyError(f"unknown topic {topic!r}") from None

    def topic_for_code(self, code: int) -> str:
        if not 1 <= code <= len(self.topics):
            raise KeyError(f"topic code {code} out of range")
        return self.topics[code - 1]

    def required_cells(self) -> list[tuple[CellKey, int]]:
        """Cells with a positive requirement, in blueprint order."""
        ordered = []
        for section in (Section.I, Section.II, Section.III):
            for topic in self.topics:
                for level in CognitiveLevel:
                    key = (topic, section, level)
                    count = self.cells.get(key, 0)
                    if count > 0:
                        ordered.append((key, count))
        return ordered

    def total_items(self) -> int:
        return sum(self.section_totals.values())


# Default 2025-profile blueprint. Topic codes 8 and 11 carry the Section III
# application slots (conditional probability and Oxyz geometry).
DEFAULT_TOPICS = (
    "Sequences and progressions",
    "Exponential and logarithmic functions",
    "Applications of derivatives",
    "Antiderivatives and integrals",
    "Statistics with grouped data",
    "Classical probability",
    "Function graphs and asymptotes",
    "Conditional probability",
    "Orthogonality and spatial measurement",
    "Vectors in space",
    "Analytic geometry in Oxyz",
)

_T = DEFAULT_TOPICS
_DEFAULT_CELLS: dict[CellKey, int] = {
    # Section I: 12 single-answer multiple-choice items.
    (_T[0], Section.I, CognitiveLevel.RECOGNITION): 1,
    (_T[1], Section.I, CognitiveLevel.RECOGNITION): 1,
    (_T[6], Section.I, CognitiveLevel.RECOGNITION): 2,
    (_T[5], Section.I, CognitiveLevel.RECOGNITION): 2,
    (_T[2], Section.I, CognitiveLevel.COMPREHENSION): 2,
    (_T[3], Section.I, CognitiveLevel.COMPREHENSION): 2,
    (_T[4], Section.I, CognitiveLevel.COMPREHENSION): 2,
    # Section II: 4 true/false groups.
    (_T[2], Section.II, CognitiveLevel.COMPREHENSION): 1,
    (_T[9], Section.II, CognitiveLevel.COMPREHENSION): 1,
    (_T[7], Section.II, CognitiveLevel.COMPREHENSION): 1,
    (_T[10], Section.II, CognitiveLevel.APPLICATION): 1,
    # Section III: 6 short answers.
    (_T[7], Section.III, CognitiveLevel.APPLICATION): 2,
    (_T[10], Section.III, CognitiveLevel.APPLICATION): 2,
    (_T[3], Section.III, CognitiveLevel.APPLICATION): 1,
    (_T[8], Section.III, CognitiveLevel.APPLICATION): 1,
}


def default_matrix() -> SpecificationMatrix:
    """The built-in 12/4/6 blueprint profile."""
    return SpecificationMatrix(topics=DEFAULT_TOPICS, cells=dict(_DEFAULT_CELLS))


@dataclass(frozen=True)
class Violation:
    topic: str
    section: Section
    level: CognitiveLevel
    required: int
    found: int


@dataclass(frozen=True)
class ComplianceReport:
    compliant: bool
    violations: tuple[Violation, ...]
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must be in [0, 1], got {self.rate}")


def validate_exam(exam: Exam, matrix: SpecificationMatrix) -> ComplianceReport:
    """Count items per (topic, section, level) cell and report mismatches.

    The rate counts only cells with a positive requirement: empty cells are
    vacuously satisfied and would inflate it. Items in topics the matrix
    does not know become violations, not errors.
    """
    required = {key: count for key, count in matrix.cells.items() if count > 0}
    if not required:
        raise ValueError("matrix has no cell with a positive requirement")

    found: Counter[CellKey] = Counter()
    for item in exam.items:
        found[(item.topic, item.section, item.level)] += 1

    violations: list[Violation] = []
    matched = 0
    for key, need in required.items():
        have = found.get(key, 0)
        if have == need:
            matched += 1
        else:
            violations.append(Violation(key[0], key[1], key[2], need, have))
    for key, have in sorted(found.items(), key=lambda kv: (kv[0][1].value, str(kv[0][0]), int(kv[0][2]))):
        if key not in required:
            violations.append(Violation(key[0], key[1], key[2], 0, have))

    rate = matched / len(required)
    return ComplianceReport(
        compliant=not violations, violations=tuple(violations), rate=rate
    )
