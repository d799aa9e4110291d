"""Exam interchange format: UTF-8 JSON with a stable field order.

Top level::

    {"exam_id": ..., "provenance": "generated"|"ingested"|"fixture",
     "items": [{"id", "topic", "section", "level", "stem",
                "body": {"kind": "mcq"|"tf"|"short", ...},
                "solution", "explanation"}]}

Body payloads: mcq carries "choices" (4 texts) and "key" (index 0..3);
tf carries "statements" (4 texts) and "key" (4 booleans); short carries
"key" (number) and "round_digits". serialize_exam always emits fields in
the order above, so parse -> serialize round-trips byte-identically.
"""

from __future__ import annotations

import json
from typing import Any

from ..errors import SchemaError
from .types import (
    CognitiveLevel,
    Exam,
    ExamItem,
    MultipleChoice,
    Provenance,
    QuestionId,
    Section,
    ShortAnswer,
    TrueFalseGroup,
)


def _body_to_dict(body) -> dict[str, Any]:
    if isinstance(body, MultipleChoice):
        return {"kind": "mcq", "choices": list(body.choices), "key": body.key}
    if isinstance(body, TrueFalseGroup):
        return {"kind": "tf", "statements": list(body.statements), "key": list(body.key)}
    if isinstance(body, ShortAnswer):
        return {"kind": "short", "key": body.key, "round_digits": body.round_digits}
    raise SchemaError(f"unknown body variant {type(body).__name__}")


def serialize_exam(exam: Exam) -> bytes:
    doc = {
        "exam_id": exam.exam_id,
        "provenance": exam.provenance.value,
        "items": [
            {
                "id": item.id.render(),
                "topic": item.topic,
                "section": item.section.value,
                "level": int(item.level),
                "stem": item.stem,
                "body": _body_to_dict(item.body),
                "solution": item.solution,
                "explanation": item.explanation,
            }
            for item in exam.items
        ],
    }
    return (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def _need(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise SchemaError("missing required field", f"{path}.{key}" if path else key)
    return obj[key]


def _parse_body(raw: Any, path: str):
    if not isinstance(raw, dict):
        raise SchemaError("body must be an object", path)
    kind = _need(raw, "kind", path)
    if kind == "mcq":
        choices = _need(raw, "choices", path)
        if not isinstance(choices, list) or len(choices) != 4:
            raise SchemaError("mcq needs exactly 4 choices", f"{path}.choices")
        key = _need(raw, "key", path)
        if not isinstance(key, int) or not 0 <= key <= 3:
            raise SchemaError("mcq key must be an index in 0..3", f"{path}.key")
        return MultipleChoice(tuple(str(c) for c in choices), key)
    if kind == "tf":
        statements = _need(raw, "statements", path)
        if not isinstance(statements, list) or len(statements) != 4:
            raise SchemaError("tf needs exactly 4 statements", f"{path}.statements")
        key = _need(raw, "key", path)
        if not isinstance(key, list) or len(key) != 4 or not all(
            isinstance(b, bool) for b in key
        ):
            raise SchemaError("tf key must be 4 booleans", f"{path}.key")
        return TrueFalseGroup(tuple(str(s) for s in statements), tuple(key))
    if kind == "short":
        key = _need(raw, "key", path)
        if not isinstance(key, (int, float)) or isinstance(key, bool):
            raise SchemaError("short key must be a number", f"{path}.key")
        digits = _need(raw, "round_digits", path)
        if not isinstance(digits, int) or isinstance(digits, bool):
            raise SchemaError("round_digits must be an integer", f"{path}.round_digits")
        return ShortAnswer(float(key), digits)
    raise SchemaError(f"unknown body kind {kind!r}", f"{path}.kind")


def _parse_item(raw: Any, path: str) -> ExamItem:
    if not isinstance(raw, dict):
        raise SchemaError("item must be an object", path)
    id_text = _need(raw, "id", path)
    try:
        item_id = QuestionId.parse(str(id_text))
    except Exception as exc:
        raise SchemaError(str(exc), f"{path}.id") from exc

    section_tag = _need(raw, "section", path)
    try:
        section = Section(section_tag)
    except ValueError:
        raise SchemaError(f"unknown section tag {section_tag!r}", f"{path}.section") from None
    if section is not item_id.section:
        raise SchemaError(
            f"section {section.value} disagrees with id {item_id.render()}",
            f"{path}.section",
        )

    level_raw = _need(raw, "level", path)
    try:
        level = CognitiveLevel(int(level_raw))
    except (ValueError, TypeError):
        raise SchemaError(f"unknown level {level_raw!r}", f"{path}.level") from None
    if level is not item_id.level:
        raise SchemaError(
            f"level {int(level)} disagrees with id {item_id.render()}", f"{path}.level"
        )

    body = _parse_body(_need(raw, "body", path), f"{path}.body")
    try:
        return ExamItem(
            id=item_id,
            topic=str(_need(raw, "topic", path)),
            level=level,
            stem=str(_need(raw, "stem", path)),
            body=body,
            solution=str(_need(raw, "solution", path)),
            explanation=str(_need(raw, "explanation", path)),
        )
    except ValueError as exc:
        raise SchemaError(str(exc), path) from exc


def response_to_dict(response) -> dict[str, Any] | None:
    """JSON-able rendering of a response; None stays None (unanswered)."""
    from .types import McqResponse, ShortAnswerResponse, TrueFalseResponse

    if response is None:
        return None
    if isinstance(response, McqResponse):
        return {"kind": "mcq", "chosen": response.chosen}
    if isinstance(response, TrueFalseResponse):
        return {"kind": "tf", "values": list(response.values)}
    if isinstance(response, ShortAnswerResponse):
        return {"kind": "short", "value": response.value}
    raise SchemaError(f"unknown response variant {type(response).__name__}")


def response_from_dict(raw: dict[str, Any] | None, path: str = "response"):
    from .types import McqResponse, ShortAnswerResponse, TrueFalseResponse

    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise SchemaError("response must be an object or null", path)
    kind = _need(raw, "kind", path)
    try:
        if kind == "mcq":
            return McqResponse(int(_need(raw, "chosen", path)))
        if kind == "tf":
            values = _need(raw, "values", path)
            return TrueFalseResponse(tuple(bool(b) for b in values))
        if kind == "short":
            return ShortAnswerResponse(float(_need(raw, "value", path)))
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), path) from exc
    raise SchemaError(f"unknown response kind {kind!r}", f"{path}.kind")


def parse_exam(data: bytes | str) -> Exam:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")

    provenance_tag = _need(doc, "provenance", "")
    try:
        provenance = Provenance(provenance_tag)
    except ValueError:
        raise SchemaError(f"unknown provenance {provenance_tag!r}", "provenance") from None

    items_raw = _need(doc, "items", "")
    if not isinstance(items_raw, list):
        raise SchemaError("items must be a list", "items")
    items = [_parse_item(raw, f"items[{i}]") for i, raw in enumerate(items_raw)]
    try:
        return Exam(
            exam_id=str(_need(doc, "exam_id", "")),
            items=tuple(items),
            provenance=provenance,
        )
    except ValueError as exc:
        raise SchemaError(str(exc), "items") from exc
