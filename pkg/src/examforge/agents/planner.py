"""Planner: turns a user request into an ordered subtask list."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..errors import DispatchError


class RequestKind(enum.Enum):
    GENERATE_EXAM = "generate-exam"
    SOLVE_EXAM = "solve-exam"
    TUTOR_STUDENT = "tutor-student"


@dataclass(frozen=True)
class PlannerRequest:
    kind: RequestKind
    payload: Mapping[str, Any] = field(default_factory=dict)


class SubtaskStatus(enum.Enum):
    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


_STATUS_RANK = {
    SubtaskStatus.PENDING: 0,
    SubtaskStatus.RUNNING: 1,
    SubtaskStatus.DONE: 2,
    SubtaskStatus.FAILED: 2,
}


@dataclass
class Subtask:
    subtask_id: str
    role: str
    payload: Mapping[str, Any] = field(default_factory=dict)
    status: SubtaskStatus = SubtaskStatus.PENDING

    def advance(self, status: SubtaskStatus) -> "Subtask":
        """Move the status forward; regressions are rejected."""
        if _STATUS_RANK[status] < _STATUS_RANK[self.status]:
            raise ValueError(
                f"subtask {self.subtask_id}: cannot move {self.status.value} -> {status.value}"
            )
        self.status = status
        return self


# Deterministic dispatch table: request kind -> executor roles in order.
_DISPATCH: dict[RequestKind, tuple[str, ...]] = {
    RequestKind.GENERATE_EXAM: ("generate", "validate"),
    RequestKind.SOLVE_EXAM: ("normalize", "solve", "grade"),
    RequestKind.TUTOR_STUDENT: ("analyze", "recommend", "simulate"),
}


def plan(request: PlannerRequest) -> list[Subtask]:
    """Expand a request into its subtask sequence.

    Failure handling (e.g. regenerate-on-violation) appends further
    subtasks at execution time; the initial plan is the happy path.
    """
    roles = _DISPATCH.get(request.kind)
    if roles is None:
        raise DispatchError(f"unknown request kind {request.kind!r}")
    return [
        Subtask(subtask_id=f"{request.kind.value}:{index}:{role}", role=role, payload=request.payload)
        for index, role in enumerate(roles)
    ]
