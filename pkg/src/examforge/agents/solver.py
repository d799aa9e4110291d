"""Input normalization and exam solving (executor agent 2).

Upstream document extraction is out of scope: normalize_input accepts the
JSON interchange format (lossless passthrough) or a documented plain-text
multiple-choice listing. solve_exam retrieves similar solved cases,
conditions the backend on them, parses the answer envelope, and retains
each solved item as a case with a binary reward against the key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..case_memory import Case, CaseBank
from ..errors import FormatError, SchemaError, UnsupportedInputError
from ..exam_model import (
    CognitiveLevel,
    Exam,
    ExamItem,
    McqResponse,
    MultipleChoice,
    QuestionId,
    Response,
    ScoringScheme,
    Section,
    ShortAnswer,
    ShortAnswerResponse,
    TrueFalseGroup,
    TrueFalseResponse,
    grade_item,
    parse_exam,
)
from ..retrieval_rl import EmbeddingIndex, QEstimator, RetrievalConfig, RetrievalStats
from .backend import ChatBackend, DecodeParams
from .generator import _render_cases, retrieve_cases

_BINARY_SIGNATURES = (b"%PDF", b"\x89PNG", b"\xff\xd8\xff", b"PK\x03\x04")


def solver_state_text(item: ExamItem) -> str:
    """Retrieval key for an item; oracle cases use the same rendering."""
    return f"solve item: {item.stem}"


# ----------------------------------------------------------------------
# normalization


def normalize_input(document: str | bytes) -> list[ExamItem]:
    """Turn an already-extracted document into exam items.

    Interchange-format JSON passes through losslessly. The plain-text form
    is a sequence of blank-line-separated multiple-choice blocks::

        Q1. stem text
        A) first option
        B) second option
        C) third option
        D) fourth option
        KEY: B

    Binary uploads (PDF, images, archives) are rejected outright.
    """
    if isinstance(document, bytes):
        if any(document.startswith(sig) for sig in _BINARY_SIGNATURES):
            raise UnsupportedInputError(
                "binary document detected; extraction happens upstream"
            )
        try:
            text = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UnsupportedInputError("document is not UTF-8 text") from exc
    else:
        text = document

    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return list(parse_exam(stripped).items)
        except SchemaError:
            raise
    return _parse_plain_items(text)


def _parse_plain_items(text: str) -> list[ExamItem]:
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line.rstrip())
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    if not blocks:
        raise FormatError("block 1: empty document")

    items: list[ExamItem] = []
    for number, block in enumerate(blocks, start=1):
        items.append(_parse_plain_block(block, number))
    return items


def _parse_plain_block(block: list[str], number: int) -> ExamItem:
    topic = "unspecified"
    explicit_id: QuestionId | None = None
    stem_lines: list[str] = []
    choices: dict[str, str] = {}
    key: str | None = None

    for line in block:
        stripped = line.strip()
        if stripped.startswith("TOPIC:"):
            topic = stripped[len("TOPIC:"):].strip()
        elif stripped.startswith("ID:"):
            try:
                explicit_id = QuestionId.parse(stripped[len("ID:"):].strip())
            except FormatError as exc:
                raise FormatError(f"block {number}: {exc}") from exc
        elif stripped.startswith("KEY:"):
            key = stripped[len("KEY:"):].strip()
        elif len(stripped) > 1 and stripped[0] in "ABCD" and stripped[1] in ").":
            choices[stripped[0]] = stripped[2:].strip()
        elif stripped:
            stem_lines.append(stripped)

    if not stem_lines:
        raise FormatError(f"block {number}: no stem line found")
    if len(choices) != 4:
        raise FormatError(f"block {number}: expected 4 choices, found {len(choices)}")
    if key is None or key not in "ABCD" or len(key) != 1:
        raise FormatError(f"block {number}: missing or malformed KEY line")

    stem = " ".join(stem_lines)
    # Strip a leading "Q<k>." question label if present.
    if stem.startswith("Q") and "." in stem[:6]:
        label, _, rest = stem.partition(".")
        if label[1:].isdigit():
            stem = rest.strip()

    item_id = explicit_id or QuestionId(number, Section.I, CognitiveLevel.RECOGNITION)
    if item_id.section is not Section.I:
        raise FormatError(f"block {number}: plain-text blocks must be Section I items")
    return ExamItem(
        id=item_id,
        topic=topic,
        level=item_id.level,
        stem=stem,
        body=MultipleChoice(
            tuple(choices[letter] for letter in "ABCD"), "ABCD".index(key)
        ),
    )


# ----------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class ItemAnswer:
    item_id: str
    response: Response | None
    steps: str
    flagged: bool
    raw: str


@dataclass(frozen=True)
class SolveResult:
    answers: tuple[ItemAnswer, ...]
    ce_samples: tuple[tuple[str, str, float], ...]
    retained_case_ids: tuple[str, ...]

    def responses(self) -> list[Response | None]:
        return [answer.response for answer in self.answers]


def _render_item_prompt(item: ExamItem, cases: Sequence[Case]) -> str:
    lines = [
        "TASK: solve-item",
        f"ITEM-STATE: {solver_state_text(item)}",
        f"SECTION: {item.section.value}",
        f"STEM: {item.stem}",
    ]
    body = item.body
    if isinstance(body, MultipleChoice):
        for letter, choice in zip("ABCD", body.choices):
            lines.append(f"CHOICE-{letter}: {choice}")
    elif isinstance(body, TrueFalseGroup):
        for letter, statement in zip("ABCD", body.statements):
            lines.append(f"STATEMENT-{letter}: {statement}")
    elif isinstance(body, ShortAnswer):
        lines.append(f"ROUND: {body.round_digits}")
    lines.append("CONTEXT-CASES:")
    lines.append(_render_cases(cases))
    return "\n".join(lines)


def _parse_answer(item: ExamItem, completion: str) -> tuple[Response | None, str, str]:
    """Returns (response, steps text, raw answer token)."""
    steps_lines: list[str] = []
    answer_token: str | None = None
    for line in completion.splitlines():
        if line.startswith("ANSWER:"):
            answer_token = line[len("ANSWER:"):].strip()
        elif line.strip() and not line.startswith("STEPS:"):
            steps_lines.append(line.strip())
    steps = "\n".join(steps_lines)
    if not answer_token or answer_token == "UNKNOWN":
        return None, steps, answer_token or ""

    token = answer_token.rstrip(".")
    body = item.body
    try:
        if isinstance(body, MultipleChoice):
            if token not in "ABCD" or len(token) != 1:
                return None, steps, answer_token
            return McqResponse("ABCD".index(token)), steps, answer_token
        if isinstance(body, TrueFalseGroup):
            bits = [part.strip().upper() for part in token.split(",")]
            if len(bits) != 4 or any(bit not in ("T", "F") for bit in bits):
                return None, steps, answer_token
            return TrueFalseResponse(tuple(bit == "T" for bit in bits)), steps, answer_token
        return ShortAnswerResponse(float(token)), steps, answer_token
    except ValueError:
        return None, steps, answer_token


def solve_exam(
    exam: Exam,
    bank: CaseBank,
    backend: ChatBackend,
    config: RetrievalConfig,
    estimator: QEstimator,
    seed: int,
    scheme: ScoringScheme | None = None,
    retain_into: CaseBank | None = None,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> SolveResult:
    """Answer every item, flagging unparseable completions as unanswered.

    Items are graded against their keys to produce the binary reward; each
    item adds exactly one case to retain_into when a bank is supplied.
    """
    scheme = scheme or ScoringScheme()
    params = DecodeParams()
    answers: list[ItemAnswer] = []
    ce_samples: list[tuple[str, str, float]] = []
    retained_ids: list[str] = []

    for position, item in enumerate(exam.items):
        state_text = solver_state_text(item)
        cases = retrieve_cases(state_text, bank, config, estimator, index, stats)
        prompt = _render_item_prompt(item, cases)
        completion = backend.complete(
            "You solve exam items and answer in the fixed envelope format.",
            [{"role": "user", "content": prompt}],
            params,
            seed + position,
        )
        response, steps, token = _parse_answer(item, completion)
        flagged = response is None
        if response is None:
            reward = 0.0
        else:
            reward = 1.0 if grade_item(item, response, scheme).full_credit else 0.0
        answers.append(
            ItemAnswer(
                item_id=item.id.render(),
                response=response,
                steps=steps,
                flagged=flagged,
                raw=completion,
            )
        )
        for case in cases:
            ce_samples.append((state_text, case.case_id, reward))
        if retain_into is not None:
            retained = retain_into.new_case(
                state_text=state_text,
                action_text=f"ANSWER: {token or 'UNKNOWN'}",
                reward=reward,
                next_state_text=None,
                success=reward == 1.0,
                annotations={"item_id": item.id.render(), "exam_id": exam.exam_id},
            )
            retain_into.retain(retained)
            retained_ids.append(retained.case_id)

    return SolveResult(
        answers=tuple(answers),
        ce_samples=tuple(ce_samples),
        retained_case_ids=tuple(retained_ids),
    )
