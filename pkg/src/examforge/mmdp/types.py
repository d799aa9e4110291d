"""States, actions, trajectories, and the composite reward."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import ConfigError, ContractViolationError


@dataclass(frozen=True)
class EnvState:
    """A decision-process state; the text rendering feeds the embedder."""

    text: str
    annotations: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.text:
            raise ValueError("state text must be non-empty")
        object.__setattr__(self, "annotations", dict(self.annotations))


@dataclass(frozen=True)
class AgentAction:
    text: str
    annotations: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.text:
            raise ValueError("action text must be non-empty")
        object.__setattr__(self, "annotations", dict(self.annotations))


@dataclass(frozen=True)
class TrajectoryStep:
    state: EnvState
    retrieved_case_ids: tuple[str, ...]
    mu: tuple[float, ...] | None
    action: AgentAction
    probability: float
    reward: float
    next_state: EnvState | None

    def __post_init__(self):
        if not math.isfinite(self.reward):
            raise ValueError("reward must be finite")


@dataclass(frozen=True)
class Trajectory:
    steps: tuple[TrajectoryStep, ...]
    horizon: int
    aborted: bool = False

    def __post_init__(self):
        if len(self.steps) > self.horizon:
            raise ValueError(
                f"{len(self.steps)} steps exceed the horizon {self.horizon}"
            )

    def rewards(self) -> tuple[float, ...]:
        return tuple(step.reward for step in self.steps)


@dataclass(frozen=True)
class CompositeRewardConfig:
    """Weights for the quantitative / qualitative / binary reward channels."""

    quantitative_weight: float = 1.0
    qualitative_weight: float = 0.0
    binary_weight: float = 1.0

    def __post_init__(self):
        weights = (self.quantitative_weight, self.qualitative_weight, self.binary_weight)
        if any(w < 0 for w in weights):
            raise ConfigError("reward weights must be non-negative")
        if sum(weights) <= 0:
            raise ConfigError("at least one reward weight must be positive")


def composite_reward(
    quantitative: float,
    qualitative: float,
    binary: float,
    config: CompositeRewardConfig,
) -> float:
    """Weighted mean of the three reward channels."""
    weight_sum = (
        config.quantitative_weight + config.qualitative_weight + config.binary_weight
    )
    weighted = (
        config.quantitative_weight * quantitative
        + config.qualitative_weight * qualitative
        + config.binary_weight * binary
    )
    return weighted / weight_sum


def require_mu(step: TrajectoryStep) -> tuple[float, ...]:
    if step.mu is None:
        raise ContractViolationError(
            "trajectory step is missing its retrieval distribution"
        )
    return step.mu
