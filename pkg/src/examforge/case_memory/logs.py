"""Append-only text logs for subtask orchestration and tool interactions."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnknownParentError
from .bank import Case, CaseBank


@dataclass(frozen=True)
class SubtaskLogEntry:
    entry_id: str
    parent_request_id: str
    payload: str
    outcome: str
    timestamp: float


@dataclass(frozen=True)
class ToolLogEntry:
    entry_id: str
    parent_subtask_id: str
    payload: str
    outcome: str
    timestamp: float


LogEntry = SubtaskLogEntry | ToolLogEntry

# Tool log entries whose outcome is RETAIN_OUTCOME carry a canonical case
# JSON payload; replay_bank rebuilds a bank from them.
RETAIN_OUTCOME = "retained"


class MemoryLog:
    """Interleaved subtask/tool log preserving global append order.

    Tool entries must reference a subtask id already present in the log.
    """

    def __init__(self):
        self._entries: list[LogEntry] = []
        self._subtask_ids: set[str] = set()

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> tuple[LogEntry, ...]:
        return tuple(self._entries)

    def append(self, entry: LogEntry) -> "MemoryLog":
        if isinstance(entry, ToolLogEntry):
            if entry.parent_subtask_id not in self._subtask_ids:
                raise UnknownParentError(
                    f"tool entry {entry.entry_id!r} references unknown subtask "
                    f"{entry.parent_subtask_id!r}"
                )
        else:
            self._subtask_ids.add(entry.entry_id)
        self._entries.append(entry)
        return self


def replay_bank(log: MemoryLog) -> CaseBank:
    """Rebuild the case bank recorded in a session log's retain events."""
    from .persistence import case_from_dict
    import json

    bank = CaseBank()
    for entry in log.entries():
        if isinstance(entry, ToolLogEntry) and entry.outcome == RETAIN_OUTCOME:
            bank.retain(case_from_dict(json.loads(entry.payload)))
    return bank


def retain_and_log(
    bank: CaseBank, case: Case, log: MemoryLog, parent_subtask_id: str, timestamp: float = 0.0
) -> Case:
    """Retain a case and record the event so the session can be replayed."""
    from .persistence import case_to_json

    bank.retain(case)
    log.append(
        ToolLogEntry(
            entry_id=f"retain:{case.case_id}",
            parent_subtask_id=parent_subtask_id,
            payload=case_to_json(case),
            outcome=RETAIN_OUTCOME,
            timestamp=timestamp,
        )
    )
    return case
