"""Deterministic fixtures: sample exams, grading items, oracle banks.

Fixture exams follow the same 12/4/6 blueprint as generated ones but use
their own stem wording, so novelty comparisons against generated items
stay meaningful. Everything is seeded; equal seeds give identical bytes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..case_memory import CaseBank
from ..exam_model import (
    CognitiveLevel,
    Exam,
    ExamItem,
    McqResponse,
    MultipleChoice,
    Provenance,
    QuestionId,
    Response,
    Section,
    ShortAnswer,
    ShortAnswerResponse,
    SpecificationMatrix,
    TrueFalseGroup,
    TrueFalseResponse,
    default_matrix,
)
from ..retrieval_rl import QEstimator, embed
from ..agents.solver import solver_state_text

_FIXTURE_MCQ = (
    "Review exercise on {topic}: the recorded values begin at {a} and rise by {b} "
    "each round. Identify the value reached after round {c}.",
    "Workbook item for {topic}: a table pairs inputs with outputs of g(x) = {a} x + {b}. "
    "Which output belongs to input {c}?",
)

_FIXTURE_TF = (
    "Homework set on {topic}: measurements {a}, {b}, and {c} were taken on consecutive "
    "days. Decide whether each claim below holds.",
)

_FIXTURE_TF_STATEMENTS = (
    "Day one's measurement is the smallest of the three.",
    "The middle measurement equals the average of the other two.",
    "The measurements sum to more than {t}.",
    "Halving day three's measurement leaves it above day one's.",
)

_FIXTURE_SHORT = (
    "Applied problem on {topic}: a plot measuring {a} by {b} units loses {c} square "
    "units to landscaping. State the remaining usable area.",
)


def fixture_exam(
    seed: int,
    matrix: SpecificationMatrix | None = None,
    exam_id: str | None = None,
) -> Exam:
    """A compliant exam for the given blueprint, with seeded stem numbers."""
    matrix = matrix or default_matrix()
    rng = np.random.default_rng(seed)
    items: list[ExamItem] = []
    for (topic, section, level), count in matrix.required_cells():
        code = matrix.topic_code(topic)
        for seq in range(count):
            a, b, c = (int(rng.integers(3, 90)) for _ in range(3))
            item_id = QuestionId(code, section, level, seq)
            if section is Section.I:
                stem = _FIXTURE_MCQ[int(rng.integers(len(_FIXTURE_MCQ)))].format(
                    topic=topic.lower(), a=a, b=b, c=c
                )
                correct = a + b * c
                options = [correct, correct + b, correct - b, correct + 3 * b + 1]
                key = int(rng.integers(4))
                options[0], options[key] = options[key], options[0]
                body = MultipleChoice(tuple(str(v) for v in options), key)
            elif section is Section.II:
                stem = _FIXTURE_TF[0].format(topic=topic.lower(), a=a, b=b, c=c)
                statements = tuple(
                    template.format(t=a + b + c)
                    for template in _FIXTURE_TF_STATEMENTS
                )
                bits = tuple(bool(rng.integers(2)) for _ in range(4))
                body = TrueFalseGroup(statements, bits)
            else:
                stem = _FIXTURE_SHORT[0].format(topic=topic.lower(), a=a, b=b, c=c)
                body = ShortAnswer(float(a * b - c), 2)
            items.append(
                ExamItem(
                    id=item_id,
                    topic=topic,
                    level=level,
                    stem=stem,
                    body=body,
                    solution=f"Step 1: set up the {topic.lower()} relation. "
                    f"Step 2: evaluate with {a}, {b}, {c}.",
                    explanation=f"Drill for {topic.lower()} at level {int(level)}.",
                )
            )
    return Exam(
        exam_id=exam_id or f"fixture-{seed:04d}",
        items=tuple(items),
        provenance=Provenance.FIXTURE,
    )


def fixture_corpus(
    count: int, base_seed: int = 100, matrix: SpecificationMatrix | None = None
) -> list[Exam]:
    return [fixture_exam(base_seed + i, matrix) for i in range(count)]


def grading_fixture_items() -> tuple[ExamItem, ...]:
    """Reference items whose keys match published worked solutions:
    choice A, choice B, the verdict pattern T/F/T/T, and the value 3200."""
    stddev = ExamItem(
        id=QuestionId(5, Section.I, CognitiveLevel.COMPREHENSION, 0),
        topic="Statistics with grouped data",
        level=CognitiveLevel.COMPREHENSION,
        stem=(
            "Two grouped frequency tables share the same class intervals, and every "
            "frequency in the second table is exactly double its counterpart in the "
            "first. Compare their standard deviations s1 and s2."
        ),
        body=MultipleChoice(
            ("s1 = s2", "s1 = 2 s2", "2 s1 = s2", "4 s1 = s2"), 0
        ),
        solution=(
            "Step 1: doubling every frequency scales both n and each class count "
            "alike. Step 2: the mean and spread are unchanged, so s1 = s2."
        ),
    )
    asymptote = ExamItem(
        id=QuestionId(7, Section.I, CognitiveLevel.RECOGNITION, 0),
        topic="Function graphs and asymptotes",
        level=CognitiveLevel.RECOGNITION,
        stem=(
            "A rational function levels off toward the same constant value 1/2 as its "
            "input grows without bound in either direction. Name the horizontal "
            "asymptote of its graph."
        ),
        body=MultipleChoice(
            ("x = -1", "y = 1/2", "y = -1", "x = 1/2"), 1
        ),
        solution="Step 1: read the limiting value 1/2. Step 2: the asymptote is y = 1/2.",
    )
    tracking = ExamItem(
        id=QuestionId(11, Section.II, CognitiveLevel.APPLICATION, 0),
        topic="Analytic geometry in Oxyz",
        level=CognitiveLevel.APPLICATION,
        stem=(
            "A probe travels in a straight line between two stations while a spherical "
            "tracking zone of radius 13 is centred at the origin. Judge each claim "
            "about its parametric path, entry point, chord length, and travel time."
        ),
        body=TrueFalseGroup(
            (
                "The stated parametric equations describe the probe's line.",
                "The claimed entry point is where the probe first enters the zone.",
                "The chord inside the zone rounds to the stated length.",
                "The full trip takes twice the time spent inside the zone.",
            ),
            (True, False, True, True),
        ),
        solution=(
            "Step 1: verify the direction vector. Step 2: intersect with the sphere "
            "and order the hits. Verdicts: true, false, true, true."
        ),
    )
    playground = ExamItem(
        id=QuestionId(4, Section.III, CognitiveLevel.APPLICATION, 0),
        topic="Antiderivatives and integrals",
        level=CognitiveLevel.APPLICATION,
        stem=(
            "A rectangular recreation ground of 60 by 80 meters gives up 1600 square "
            "meters to four parabolic flower beds. How many square meters remain for "
            "the playground?"
        ),
        body=ShortAnswer(3200.0, 2),
        solution=(
            "Step 1: integrate the parabolic borders to get 1600. "
            "Step 2: compute 60 x 80 - 1600 = 3200."
        ),
    )
    return (stddev, asymptote, tracking, playground)


# ----------------------------------------------------------------------
# answer sheets


def key_response(item: ExamItem) -> Response:
    body = item.body
    if isinstance(body, MultipleChoice):
        return McqResponse(body.key)
    if isinstance(body, TrueFalseGroup):
        return TrueFalseResponse(body.key)
    return ShortAnswerResponse(body.key)


def correct_responses(exam: Exam) -> list[Response]:
    return [key_response(item) for item in exam.items]


def wrong_responses(exam: Exam) -> list[Response]:
    responses: list[Response] = []
    for item in exam.items:
        body = item.body
        if isinstance(body, MultipleChoice):
            responses.append(McqResponse((body.key + 1) % 4))
        elif isinstance(body, TrueFalseGroup):
            responses.append(TrueFalseResponse(tuple(not bit for bit in body.key)))
        else:
            responses.append(ShortAnswerResponse(body.key + 1.0))
    return responses


# ----------------------------------------------------------------------
# perturbations


def perturb_remove_item(exam: Exam, index: int = 0) -> Exam:
    """Drop one item: exactly one blueprint cell comes up short."""
    items = list(exam.items)
    del items[index]
    return Exam(exam.exam_id + "-perturbed", tuple(items), exam.provenance)


def perturb_unknown_topic(exam: Exam, index: int = 0) -> Exam:
    """Relabel one item with a topic outside the blueprint."""
    items = list(exam.items)
    item = items[index]
    items[index] = ExamItem(
        id=item.id,
        topic="uncharted territory",
        level=item.level,
        stem=item.stem,
        body=item.body,
        solution=item.solution,
        explanation=item.explanation,
    )
    return Exam(exam.exam_id + "-retopic", tuple(items), exam.provenance)


# ----------------------------------------------------------------------
# oracle memory for the solver workloads


def answer_token(item: ExamItem) -> str:
    body = item.body
    if isinstance(body, MultipleChoice):
        return "ABCD"[body.key]
    if isinstance(body, TrueFalseGroup):
        return ",".join("T" if bit else "F" for bit in body.key)
    value = body.key
    return str(int(value)) if float(value).is_integer() else str(value)


def oracle_bank(exams: Sequence[Exam]) -> CaseBank:
    """One solved case per item, keyed by the solver's retrieval state."""
    bank = CaseBank()
    for exam in exams:
        for item in exam.items:
            case = bank.new_case(
                state_text=solver_state_text(item),
                action_text=f"ANSWER: {answer_token(item)}",
                reward=1.0,
                success=True,
                annotations={"item_id": item.id.render(), "exam_id": exam.exam_id},
            )
            bank.retain(case)
    return bank


def seed_oracle_estimator(estimator: QEstimator, bank: CaseBank) -> None:
    """Give every oracle case a high value at its own state.

    Each case also gets a low-value record at a shared off-topic anchor, so
    learned-value ranking prefers the case whose state matches the query
    instead of collapsing into a bank-wide tie.
    """
    away = embed("off-topic anchor far from any exam item", estimator.dim)
    for case in bank.snapshot():
        estimator.add_record(case.case_id, embed(case.state_text, estimator.dim), 1.0)
        estimator.add_record(case.case_id, away, 0.0)
