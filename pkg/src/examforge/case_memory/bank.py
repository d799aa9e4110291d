"""Online-growing case bank.

A case records one (state, action, reward, next state) experience as text;
failures are first-class entries. The bank only appends: nothing mutates
or deletes a stored case through the public surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from ..errors import ConflictError


@dataclass(frozen=True)
class Case:
    case_id: str
    state_text: str
    action_text: str
    reward: float
    next_state_text: str | None = None
    success: bool = False
    created_seq: int = 0
    annotations: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.case_id:
            raise ValueError("case_id must be non-empty")
        if not math.isfinite(self.reward):
            raise ValueError("reward must be finite")
        object.__setattr__(self, "annotations", dict(self.annotations))


class CaseBank:
    """Append-only store of cases with strictly increasing created_seq.

    Writers serialize retains; readers take immutable snapshot() tuples.
    A size cap may be set but is off by default, matching the grow-only
    memory model.
    """

    def __init__(self, cases: tuple[Case, ...] | list[Case] = (), max_size: int | None = None):
        self._cases: list[Case] = []
        self._by_id: dict[str, Case] = {}
        self._max_size = max_size
        for case in cases:
            self.retain(case)

    def __len__(self) -> int:
        return len(self._cases)

    def __iter__(self) -> Iterator[Case]:
        return iter(self.snapshot())

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._by_id

    def get(self, case_id: str) -> Case:
        return self._by_id[case_id]

    def snapshot(self) -> tuple[Case, ...]:
        return tuple(self._cases)

    def next_seq(self) -> int:
        return self._cases[-1].created_seq + 1 if self._cases else 0

    def new_case(
        self,
        state_text: str,
        action_text: str,
        reward: float,
        next_state_text: str | None = None,
        success: bool = False,
        case_id: str | None = None,
        annotations: Mapping[str, str] | None = None,
    ) -> Case:
        """Build a case with the next sequence number (not yet retained)."""
        seq = self.next_seq()
        return Case(
            case_id=case_id or f"case-{seq:06d}",
            state_text=state_text,
            action_text=action_text,
            reward=reward,
            next_state_text=next_state_text,
            success=success,
            created_seq=seq,
            annotations=annotations or {},
        )

    def retain(self, case: Case) -> "CaseBank":
        """Append one case; failures are retained like successes."""
        if case.case_id in self._by_id:
            raise ConflictError(f"duplicate case_id {case.case_id!r}")
        if self._max_size is not None and len(self._cases) >= self._max_size:
            raise ConflictError(f"bank is capped at {self._max_size} cases")
        if self._cases and case.created_seq <= self._cases[-1].created_seq:
            raise ConflictError(
                f"created_seq {case.created_seq} does not increase past "
                f"{self._cases[-1].created_seq}"
            )
        self._cases.append(case)
        self._by_id[case.case_id] = case
        return self
