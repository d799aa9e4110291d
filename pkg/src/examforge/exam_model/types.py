"""Domain types for the three-section exam format.

Section I is single-answer multiple choice (four options, one key),
Section II is multi-part true/false (four statements judged independently),
Section III is short constructed answers compared after rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

from ..errors import FormatError


class CognitiveLevel(enum.IntEnum):
    """Hierarchical demand tiers; ordered Recognition < Comprehension < Application."""

    RECOGNITION = 1
    COMPREHENSION = 2
    APPLICATION = 3


class Section(enum.Enum):
    I = "I"
    II = "II"
    III = "III"


class Provenance(enum.Enum):
    GENERATED = "generated"
    INGESTED = "ingested"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class QuestionId:
    """Identifier rendered as ``<topic>_<section>_<level>`` plus an optional
    ``_<seq>`` suffix when one blueprint cell holds several items."""

    topic_code: int
    section: Section
    level: CognitiveLevel
    seq: int = 0

    def __post_init__(self):
        if self.topic_code < 1:
            raise ValueError(f"topic_code must be >= 1, got {self.topic_code}")
        if self.seq < 0:
            raise ValueError(f"seq must be >= 0, got {self.seq}")

    def render(self) -> str:
        base = f"{self.topic_code}_{self.section.value}_{int(self.level)}"
        return f"{base}_{self.seq}" if self.seq else base

    @classmethod
    def parse(cls, text: str) -> "QuestionId":
        parts = text.split("_")
        if len(parts) not in (3, 4):
            raise FormatError(f"malformed question id {text!r}")
        try:
            topic_code = int(parts[0])
            section = Section(parts[1])
            level = CognitiveLevel(int(parts[2]))
            seq = int(parts[3]) if len(parts) == 4 else 0
        except (ValueError, KeyError) as exc:
            raise FormatError(f"malformed question id {text!r}: {exc}") from exc
        return cls(topic_code, section, level, seq)


def make_question_id(
    topic_code: int, section: Section, level: CognitiveLevel, seq: int = 0
) -> QuestionId:
    """Build a QuestionId, rejecting non-positive topic codes."""
    if topic_code < 1:
        raise ValueError(f"topic_code must be >= 1, got {topic_code}")
    return QuestionId(topic_code, Section(section), CognitiveLevel(level), seq)


@dataclass(frozen=True)
class MultipleChoice:
    """Section I body: exactly four options, one keyed index."""

    choices: tuple[str, str, str, str]
    key: int

    def __post_init__(self):
        if len(self.choices) != 4:
            raise ValueError(f"multiple choice needs 4 options, got {len(self.choices)}")
        if not 0 <= self.key <= 3:
            raise ValueError(f"key index must be in 0..3, got {self.key}")
        object.__setattr__(self, "choices", tuple(self.choices))


@dataclass(frozen=True)
class TrueFalseGroup:
    """Section II body: four statements, each independently true or false."""

    statements: tuple[str, str, str, str]
    key: tuple[bool, bool, bool, bool]

    def __post_init__(self):
        if len(self.statements) != 4:
            raise ValueError(f"true/false group needs 4 statements, got {len(self.statements)}")
        if len(self.key) != 4:
            raise ValueError(f"true/false key needs 4 bits, got {len(self.key)}")
        object.__setattr__(self, "statements", tuple(self.statements))
        object.__setattr__(self, "key", tuple(bool(b) for b in self.key))


@dataclass(frozen=True)
class ShortAnswer:
    """Section III body: numeric key compared after rounding to round_digits."""

    key: float
    round_digits: int = 2

    def __post_init__(self):
        if not math.isfinite(self.key):
            raise ValueError("short-answer key must be finite")


Body = Union[MultipleChoice, TrueFalseGroup, ShortAnswer]

SECTION_FOR_BODY = {
    MultipleChoice: Section.I,
    TrueFalseGroup: Section.II,
    ShortAnswer: Section.III,
}


@dataclass(frozen=True)
class ExamItem:
    id: QuestionId
    topic: str
    level: CognitiveLevel
    stem: str
    body: Body
    solution: str = ""
    explanation: str = ""

    def __post_init__(self):
        expected = SECTION_FOR_BODY[type(self.body)]
        if expected is not self.id.section:
            raise ValueError(
                f"body variant {type(self.body).__name__} does not match section "
                f"{self.id.section.value} of id {self.id.render()}"
            )
        if self.level is not self.id.level:
            raise ValueError(
                f"item level {int(self.level)} disagrees with id {self.id.render()}"
            )

    @property
    def section(self) -> Section:
        return self.id.section


_SECTION_ORDER = {Section.I: 0, Section.II: 1, Section.III: 2}


@dataclass(frozen=True)
class Exam:
    exam_id: str
    items: tuple[ExamItem, ...]
    provenance: Provenance = Provenance.GENERATED

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        seen = set()
        for item in self.items:
            rendered = item.id.render()
            if rendered in seen:
                raise ValueError(f"duplicate item id {rendered}")
            seen.add(rendered)
        order = [_SECTION_ORDER[item.section] for item in self.items]
        if order != sorted(order):
            raise ValueError("items must be grouped by section in order I, II, III")

    def section_items(self, section: Section) -> tuple[ExamItem, ...]:
        return tuple(item for item in self.items if item.section is section)


@dataclass(frozen=True)
class McqResponse:
    chosen: int

    def __post_init__(self):
        if not 0 <= self.chosen <= 3:
            raise ValueError(f"chosen index must be in 0..3, got {self.chosen}")


@dataclass(frozen=True)
class TrueFalseResponse:
    values: tuple[bool, bool, bool, bool]

    def __post_init__(self):
        if len(self.values) != 4:
            raise ValueError(f"true/false response needs 4 bits, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(bool(b) for b in self.values))


@dataclass(frozen=True)
class ShortAnswerResponse:
    value: float


Response = Union[McqResponse, TrueFalseResponse, ShortAnswerResponse]

RESPONSE_FOR_BODY = {
    MultipleChoice: McqResponse,
    TrueFalseGroup: TrueFalseResponse,
    ShortAnswer: ShortAnswerResponse,
}


@dataclass(frozen=True)
class ItemScore:
    points: float
    max_points: float
    correct_parts: int

    def __post_init__(self):
        if self.max_points <= 0:
            raise ValueError("max_points must be positive")
        if self.points < 0 or self.points > self.max_points:
            raise ValueError("points must lie in [0, max_points]")

    @property
    def full_credit(self) -> bool:
        return self.points == self.max_points


@dataclass(frozen=True)
class ScoringScheme:
    """Point weights per section.

    Defaults mirror the public 2025 convention: 0.25 per Section I item,
    a 0.1/0.25/0.5/1.0 staircase for 1-4 correct Section II statements,
    and 0.5 per Section III item, for a 10.0-point exam at 12/4/6 items.
    """

    mcq_points: float = 0.25
    tf_staircase: tuple[float, float, float, float] = (0.1, 0.25, 0.5, 1.0)
    short_points: float = 0.5

    def __post_init__(self):
        if len(self.tf_staircase) != 4:
            raise ValueError("tf_staircase needs 4 entries (1..4 correct statements)")
        stair = tuple(float(p) for p in self.tf_staircase)
        if any(b < a for a, b in zip(stair, stair[1:])):
            raise ValueError("tf_staircase must be monotone non-decreasing")
        object.__setattr__(self, "tf_staircase", stair)

    def tf_points(self, correct_parts: int) -> float:
        if correct_parts == 0:
            return 0.0
        return self.tf_staircase[correct_parts - 1]

    def max_points(self, body: Body) -> float:
        if isinstance(body, MultipleChoice):
            return self.mcq_points
        if isinstance(body, TrueFalseGroup):
            return self.tf_staircase[-1]
        return self.short_points

    def max_total(self, exam: Exam) -> float:
        return sum(self.max_points(item.body) for item in exam.items)


@dataclass(frozen=True)
class ExamScore:
    item_scores: tuple[ItemScore, ...]
    per_section: dict[Section, float] = field(compare=False)
    total: float = 0.0
    max_total: float = 0.0
    set_perfect: bool = False

    @property
    def percent(self) -> float:
        return 100.0 * self.total / self.max_total if self.max_total else 0.0
