"""JSON Lines persistence for banks and logs.

One object per line keeps retain an O(1) append; the serialization is
canonical (sorted keys, no extra whitespace) so save -> load -> save is
byte-identical.
"""

from __future__ import annotations

import json
import os
from typing import Any

from ..errors import BankLoadError
from .bank import Case, CaseBank
from .logs import LogEntry, MemoryLog, SubtaskLogEntry, ToolLogEntry


def case_to_json(case: Case) -> str:
    payload = {
        "case_id": case.case_id,
        "state_text": case.state_text,
        "action_text": case.action_text,
        "reward": case.reward,
        "next_state_text": case.next_state_text,
        "success": case.success,
        "created_seq": case.created_seq,
        "annotations": dict(case.annotations),
    }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def case_from_dict(payload: dict[str, Any]) -> Case:
    return Case(
        case_id=payload["case_id"],
        state_text=payload["state_text"],
        action_text=payload["action_text"],
        reward=float(payload["reward"]),
        next_state_text=payload["next_state_text"],
        success=bool(payload["success"]),
        created_seq=int(payload["created_seq"]),
        annotations=payload.get("annotations", {}),
    )


def save_bank(bank: CaseBank, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        for case in bank.snapshot():
            sink.write(case_to_json(case))
            sink.write("\n")


def load_bank(
    path: str | os.PathLike, tolerate_partial_trailing: bool = False
) -> CaseBank:
    """Load a bank, checking id uniqueness and sequence monotonicity.

    A malformed line raises BankLoadError with its 1-based line number. When
    tolerate_partial_trailing is set, an unparseable final line with no
    newline terminator (an interrupted append) is skipped and reported in
    the returned bank's ``load_warnings`` attribute instead.
    """
    with open(path, "r", encoding="utf-8", newline="") as source:
        raw = source.read()

    bank = CaseBank()
    warnings: list[str] = []
    lines = raw.split("\n")
    trailing_complete = raw.endswith("\n")
    if trailing_complete:
        lines = lines[:-1]
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        is_last = number == len(lines)
        try:
            payload = json.loads(line)
            case = case_from_dict(payload)
        except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
            if is_last and not trailing_complete and tolerate_partial_trailing:
                warnings.append(f"line {number}: skipped partial trailing line")
                continue
            raise BankLoadError(f"unreadable case ({exc})", line=number) from exc
        try:
            bank.retain(case)
        except Exception as exc:
            raise BankLoadError(str(exc), line=number) from exc
    bank.load_warnings = tuple(warnings)  # type: ignore[attr-defined]
    return bank


_ENTRY_KINDS = {"subtask": SubtaskLogEntry, "tool": ToolLogEntry}


def _entry_to_json(entry: LogEntry) -> str:
    if isinstance(entry, SubtaskLogEntry):
        payload = {
            "kind": "subtask",
            "entry_id": entry.entry_id,
            "parent_id": entry.parent_request_id,
            "payload": entry.payload,
            "outcome": entry.outcome,
            "timestamp": entry.timestamp,
        }
    else:
        payload = {
            "kind": "tool",
            "entry_id": entry.entry_id,
            "parent_id": entry.parent_subtask_id,
            "payload": entry.payload,
            "outcome": entry.outcome,
            "timestamp": entry.timestamp,
        }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def save_log(log: MemoryLog, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        for entry in log.entries():
            sink.write(_entry_to_json(entry))
            sink.write("\n")


def load_log(path: str | os.PathLike) -> MemoryLog:
    log = MemoryLog()
    with open(path, "r", encoding="utf-8") as source:
        for number, line in enumerate(source, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                kind = _ENTRY_KINDS[payload["kind"]]
                entry = kind(
                    payload["entry_id"],
                    payload["parent_id"],
                    payload["payload"],
                    payload["outcome"],
                    float(payload["timestamp"]),
                )
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                raise BankLoadError(f"unreadable log entry ({exc})", line=number) from exc
            log.append(entry)
    return log
