"""Deterministic grading for the three item formats."""

from __future__ import annotations

import math

from ..errors import FormatError
from .types import (
    Exam,
    ExamItem,
    ExamScore,
    ItemScore,
    McqResponse,
    MultipleChoice,
    Response,
    ScoringScheme,
    Section,
    ShortAnswer,
    ShortAnswerResponse,
    TrueFalseGroup,
    TrueFalseResponse,
)


def grade_item(item: ExamItem, response: Response, scheme: ScoringScheme) -> ItemScore:
    """Score one response.

    Section I awards full points only for the keyed option. Section II counts
    matching statements through the scheme's staircase. Section III rounds
    both sides to the item's round_digits and compares exactly.
    """
    body = item.body
    if isinstance(body, MultipleChoice):
        if not isinstance(response, McqResponse):
            raise FormatError(
                f"item {item.id.render()} expects a choice index, got {type(response).__name__}"
            )
        correct = response.chosen == body.key
        return ItemScore(
            points=scheme.mcq_points if correct else 0.0,
            max_points=scheme.mcq_points,
            correct_parts=1 if correct else 0,
        )

    if isinstance(body, TrueFalseGroup):
        if not isinstance(response, TrueFalseResponse):
            raise FormatError(
                f"item {item.id.render()} expects 4 booleans, got {type(response).__name__}"
            )
        correct_parts = sum(a == b for a, b in zip(response.values, body.key))
        return ItemScore(
            points=scheme.tf_points(correct_parts),
            max_points=scheme.tf_staircase[-1],
            correct_parts=correct_parts,
        )

    if isinstance(body, ShortAnswer):
        if not isinstance(response, ShortAnswerResponse):
            raise FormatError(
                f"item {item.id.render()} expects a numeric answer, got {type(response).__name__}"
            )
        if not math.isfinite(response.value):
            raise FormatError(f"item {item.id.render()}: non-finite short answer")
        digits = body.round_digits
        correct = round(response.value, digits) == round(body.key, digits)
        return ItemScore(
            points=scheme.short_points if correct else 0.0,
            max_points=scheme.short_points,
            correct_parts=1 if correct else 0,
        )

    raise FormatError(f"unknown body variant {type(body).__name__}")


def score_exam(
    exam: Exam,
    responses: list[Response | None],
    scheme: ScoringScheme,
) -> ExamScore:
    """Aggregate grade_item over an answer sheet.

    A None entry means the item went unanswered and scores zero; it still
    counts against set_perfect.
    """
    if len(responses) != len(exam.items):
        raise FormatError(
            f"{len(responses)} responses for {len(exam.items)} items"
        )
    item_scores: list[ItemScore] = []
    per_section = {Section.I: 0.0, Section.II: 0.0, Section.III: 0.0}
    for item, response in zip(exam.items, responses):
        if response is None:
            score = ItemScore(0.0, scheme.max_points(item.body), 0)
        else:
            score = grade_item(item, response, scheme)
        item_scores.append(score)
        per_section[item.section] += score.points

    total = sum(score.points for score in item_scores)
    max_total = scheme.max_total(exam)
    return ExamScore(
        item_scores=tuple(item_scores),
        per_section=per_section,
        total=total,
        max_total=max_total,
        set_perfect=all(score.full_credit for score in item_scores),
    )
