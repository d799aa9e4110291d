"""Episodic case bank and append-only subtask/tool logs."""

from .bank import Case, CaseBank
from .logs import MemoryLog, SubtaskLogEntry, ToolLogEntry, replay_bank
from .persistence import load_bank, load_log, save_bank, save_log

__all__ = [
    "Case",
    "CaseBank",
    "MemoryLog",
    "SubtaskLogEntry",
    "ToolLogEntry",
    "load_bank",
    "load_log",
    "replay_bank",
    "save_bank",
    "save_log",
]
