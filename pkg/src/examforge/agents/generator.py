"""Exam generation against the blueprint (executor agent 1).

Each required blueprint slot becomes one item: the prompt carries the cell
descriptor plus retrieved reference cases, the backend answers in the item
envelope, and the assembled exam must validate against the matrix before
it is returned. Per-item novelty against the reference stems is reported
alongside, and generated items can be retained as cases with a binary
reward (parsed, slot-compliant, novel enough).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..case_memory import Case, CaseBank
from ..errors import BackendError, FormatError, GenerationError
from ..exam_model import (
    CognitiveLevel,
    ComplianceReport,
    Exam,
    ExamItem,
    MultipleChoice,
    Provenance,
    QuestionId,
    Section,
    ShortAnswer,
    SpecificationMatrix,
    TrueFalseGroup,
    novelty_overlap,
    validate_exam,
)
from ..retrieval_rl import (
    EmbeddingIndex,
    QEstimator,
    RetrievalConfig,
    RetrievalMode,
    RetrievalStats,
    embed,
    read_np,
    read_p,
)
from .backend import ChatBackend, DecodeParams


@dataclass(frozen=True)
class GenerationResult:
    exam: Exam
    compliance: ComplianceReport
    novelty: tuple[float, ...]
    attempts: int
    ce_samples: tuple[tuple[str, str, float], ...]
    retained_case_ids: tuple[str, ...]


def generation_state_text(
    topic: str, section: Section, level: CognitiveLevel, seq: int, novelty_note: str
) -> str:
    return (
        f"generate item: topic={topic} section={section.value} "
        f"level={int(level)} slot={seq} novelty={novelty_note}"
    )


def _render_cases(cases: Sequence[Case]) -> str:
    if not cases:
        return "none"
    blocks = []
    for i, case in enumerate(cases, start=1):
        blocks.append(f"CASE {i}:\nSTATE: {case.state_text}\nACTION: {case.action_text}")
    return "\n".join(blocks)


def retrieve_cases(
    state_text: str,
    bank: CaseBank,
    config: RetrievalConfig,
    estimator: QEstimator,
    index: EmbeddingIndex | None,
    stats: RetrievalStats | None,
) -> list[Case]:
    """Mode-dispatched retrieval used by the generation and solving agents."""
    if config.mode is RetrievalMode.NONE or len(bank) == 0:
        return []
    query = embed(state_text, config.dim)
    if config.mode is RetrievalMode.READ_NP:
        return read_np(query, bank, config.k, index=index, stats=stats)
    return read_p(query, bank, estimator, config.k, stats=stats)


def _parse_generated_item(
    text: str, item_id: QuestionId, topic: str, level: CognitiveLevel
) -> ExamItem:
    fields: dict[str, str] = {}
    for line in text.splitlines():
        if ":" in line:
            prefix, _, value = line.partition(":")
            fields[prefix.strip()] = value.strip()
    stem = fields.get("STEM")
    key = fields.get("KEY")
    if not stem or key is None:
        raise FormatError("item block is missing STEM or KEY")

    section = item_id.section
    if section is Section.I:
        choices = tuple(fields.get(f"CHOICE-{letter}", "") for letter in "ABCD")
        if not all(choices):
            raise FormatError("multiple-choice block is missing options")
        if key not in "ABCD" or len(key) != 1:
            raise FormatError(f"bad multiple-choice key {key!r}")
        body = MultipleChoice(choices, "ABCD".index(key))
    elif section is Section.II:
        statements = tuple(fields.get(f"STATEMENT-{letter}", "") for letter in "ABCD")
        if not all(statements):
            raise FormatError("true/false block is missing statements")
        bits = [token.strip().upper() for token in key.split(",")]
        if len(bits) != 4 or any(bit not in ("T", "F") for bit in bits):
            raise FormatError(f"bad true/false key {key!r}")
        body = TrueFalseGroup(statements, tuple(bit == "T" for bit in bits))
    else:
        try:
            value = float(key)
        except ValueError:
            raise FormatError(f"bad short-answer key {key!r}") from None
        digits = int(fields.get("ROUND", "2"))
        body = ShortAnswer(value, digits)

    return ExamItem(
        id=item_id,
        topic=topic,
        level=level,
        stem=stem,
        body=body,
        solution=fields.get("SOLUTION", ""),
        explanation=fields.get("EXPLANATION", ""),
    )


def generate_exam(
    matrix: SpecificationMatrix,
    bank: CaseBank,
    backend: ChatBackend,
    config: RetrievalConfig,
    estimator: QEstimator,
    seed: int,
    exam_id: str | None = None,
    novelty_n: int = 3,
    novelty_threshold: float = 30.0,
    novelty_note: str = "prefer fresh numbers and contexts",
    max_attempts: int = 3,
    reference_stems: Sequence[str] | None = None,
    retain_into: CaseBank | None = None,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> GenerationResult:
    """Produce a blueprint-compliant exam through the backend.

    Unparseable completions are retried with a bumped seed up to
    max_attempts per slot; exhausting the budget (or failing matrix
    validation afterwards) raises GenerationError with the raw outputs.
    """
    if reference_stems is None:
        reference_stems = [
            case.annotations["stem"]
            for case in bank.snapshot()
            if "stem" in case.annotations
        ]

    items: list[ExamItem] = []
    slot_records: list[tuple[str, ExamItem, list[Case]]] = []
    attempts_used = 0
    raw_failures: list[str] = []
    params = DecodeParams()

    for (topic, section, level), count in matrix.required_cells():
        topic_code = matrix.topic_code(topic)
        for seq in range(count):
            item_id = QuestionId(topic_code, section, level, seq)
            state_text = generation_state_text(topic, section, level, seq, novelty_note)
            cases = retrieve_cases(state_text, bank, config, estimator, index, stats)
            prompt = "\n".join(
                [
                    "TASK: generate-item",
                    f"CELL: topic_code={topic_code} topic={topic.replace(' ', '+')} "
                    f"section={section.value} level={int(level)} slot={seq}",
                    f"NOVELTY: {novelty_note}",
                    "CONTEXT-CASES:",
                    _render_cases(cases),
                ]
            )
            item: ExamItem | None = None
            for attempt in range(max_attempts):
                attempts_used += 1
                completion = backend.complete(
                    "You write exam items in the fixed envelope format.",
                    [{"role": "user", "content": prompt}],
                    params,
                    seed + attempt,
                )
                try:
                    item = _parse_generated_item(completion, item_id, topic, level)
                    break
                except (FormatError, ValueError) as exc:
                    raw_failures.append(f"{item_id.render()} attempt {attempt}: {exc}\n{completion}")
            if item is None:
                raise GenerationError(
                    f"slot {item_id.render()} failed after {max_attempts} attempts",
                    raw_outputs=tuple(raw_failures),
                )
            items.append(item)
            slot_records.append((state_text, item, cases))

    exam = Exam(
        exam_id=exam_id or f"exam-{seed:08d}",
        items=tuple(items),
        provenance=Provenance.GENERATED,
    )
    compliance = validate_exam(exam, matrix)
    if not compliance.compliant:
        raise GenerationError(
            f"generated exam violates the blueprint in {len(compliance.violations)} cells",
            raw_outputs=tuple(raw_failures),
        )

    novelty = tuple(
        novelty_overlap(item, reference_stems, novelty_n) for item in exam.items
    )

    ce_samples: list[tuple[str, str, float]] = []
    retained_ids: list[str] = []
    for (state_text, item, cases), item_novelty in zip(slot_records, novelty):
        reward = 1.0 if item_novelty <= novelty_threshold else 0.0
        for case in cases:
            ce_samples.append((state_text, case.case_id, reward))
        if retain_into is not None:
            retained = retain_into.new_case(
                state_text=state_text,
                action_text=f"STEM: {item.stem}",
                reward=reward,
                next_state_text=None,
                success=reward == 1.0,
                annotations={"stem": item.stem, "item_id": item.id.render()},
            )
            retain_into.retain(retained)
            retained_ids.append(retained.case_id)

    return GenerationResult(
        exam=exam,
        compliance=compliance,
        novelty=novelty,
        attempts=attempts_used,
        ce_samples=tuple(ce_samples),
        retained_case_ids=tuple(retained_ids),
    )
