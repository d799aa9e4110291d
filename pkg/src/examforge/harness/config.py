"""Run configuration, embedded verbatim in every report."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

from ..errors import ConfigError
from ..retrieval_rl import DEFAULT_DIM, RetrievalConfig, RetrievalMode


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    mode: str = "readnp"  # none | readnp | readp
    k: int = 4
    k_pre: int = 32
    alpha: float = 1.0
    dim: int = DEFAULT_DIM
    backend: str = "mock"  # mock | http
    blueprint: str = "default-2025"
    exams: int = 10
    students: int = 20
    bank_path: str = ""
    out_path: str = ""

    def __post_init__(self):
        if self.mode not in ("none", "readnp", "readp"):
            raise ConfigError(f"unknown retrieval mode {self.mode!r}")
        if self.backend not in ("mock", "http"):
            raise ConfigError(f"unknown backend {self.backend!r}")

    def retrieval_config(self) -> RetrievalConfig:
        return RetrievalConfig(
            mode=RetrievalMode(self.mode),
            k=self.k,
            k_pre=self.k_pre,
            alpha=self.alpha,
            dim=self.dim,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {name: raw[name] for name in cls.__dataclass_fields__ if name in raw}
        return cls(**known)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as source:
            return cls.from_dict(json.load(source))
