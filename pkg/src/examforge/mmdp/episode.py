"""Episode loop: retrieve, act, evaluate, retain.

Each executed step appends exactly one case to the bank, so the bank grows
by the number of steps. After the episode every (state, retrieved case)
pair receives an interaction record holding the observed discounted return
from that state, which seeds the value estimator's datasets.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from ..case_memory import CaseBank
from ..retrieval_rl import EmbeddingIndex, QEstimator, RetrievalConfig, RetrievalStats, embed
from .envs import Environment
from .policy import ActionProposer, cbr_action
from .types import Trajectory, TrajectoryStep, require_mu


@dataclass
class EpisodeResult:
    trajectory: Trajectory
    bank: CaseBank
    estimator: QEstimator


def discounted_return(trajectory: Trajectory, gamma: float) -> float:
    """Sum of gamma^t * r_t over the trajectory."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    return sum(gamma**t * reward for t, reward in enumerate(trajectory.rewards()))


def entropy_regularized_return(
    trajectory: Trajectory,
    gamma: float,
    alpha: float,
    discounted: bool = False,
) -> float:
    """Diagnostic return including the retrieval-entropy bonus per step.

    Uses each step's stored retrieval distribution; a step that never stored
    one is a contract error. The sum is undiscounted unless asked otherwise.
    """
    from ..retrieval_rl import entropy

    total = 0.0
    for t, step in enumerate(trajectory.steps):
        mu = require_mu(step)
        bonus = alpha * entropy(mu) if mu else 0.0
        weight = gamma**t if discounted else 1.0
        total += weight * (step.reward + bonus)
    return total


def run_episode(
    env: Environment,
    bank: CaseBank,
    estimator: QEstimator,
    proposer: ActionProposer,
    config: RetrievalConfig,
    gamma: float,
    horizon: int,
    seed: int,
    case_prefix: str | None = None,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> EpisodeResult:
    """Run one seeded episode, retaining every executed step as a case."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    rng = np.random.default_rng(seed)
    index = index or EmbeddingIndex(config.dim)
    state = env.initial_state(rng)
    steps: list[TrajectoryStep] = []
    aborted = False

    for t in range(horizon):
        decision = cbr_action(
            state, bank, config, estimator, proposer, rng, index=index, stats=stats
        )
        try:
            next_state, reward = env.step(state, decision.action, rng)
        except Exception:
            # The failed step executed nothing: no retain, trajectory flagged.
            aborted = True
            break
        case = bank.new_case(
            state_text=state.text,
            action_text=decision.action.text,
            reward=reward,
            next_state_text=next_state.text if next_state else None,
            success=reward > 0.0,
            case_id=(
                f"{case_prefix}-{bank.next_seq():06d}" if case_prefix else None
            ),
        )
        bank.retain(case)
        steps.append(
            TrajectoryStep(
                state=state,
                retrieved_case_ids=tuple(c.case_id for c in decision.retrieved),
                mu=decision.mu,
                action=decision.action,
                probability=decision.probability,
                reward=reward,
                next_state=next_state,
            )
        )
        if next_state is None:
            break
        state = next_state

    _record_returns(steps, estimator, gamma, config.dim)
    trajectory = Trajectory(steps=tuple(steps), horizon=horizon, aborted=aborted)
    return EpisodeResult(trajectory=trajectory, bank=bank, estimator=estimator)


def _record_returns(
    steps: list[TrajectoryStep], estimator: QEstimator, gamma: float, dim: int
) -> None:
    """Append the observed return from each state to every case retrieved there."""
    running = 0.0
    returns: list[float] = [0.0] * len(steps)
    for t in range(len(steps) - 1, -1, -1):
        running = steps[t].reward + gamma * running
        returns[t] = running
    for step, value in zip(steps, returns):
        if not step.retrieved_case_ids:
            continue
        state_embedding = embed(step.state.text, dim)
        for case_id in step.retrieved_case_ids:
            estimator.add_record(case_id, state_embedding, value)


def dump_trajectory(trajectory: Trajectory, path: str | os.PathLike) -> None:
    """Write one step per line, including the stored retrieval weights."""
    with open(path, "w", encoding="utf-8") as sink:
        for t, step in enumerate(trajectory.steps):
            payload = {
                "t": t,
                "state": step.state.text,
                "retrieved": list(step.retrieved_case_ids),
                "mu": list(step.mu) if step.mu is not None else None,
                "action": step.action.text,
                "probability": step.probability,
                "reward": step.reward,
                "next_state": step.next_state.text if step.next_state else None,
                "aborted": trajectory.aborted,
            }
            sink.write(json.dumps(payload, ensure_ascii=False, sort_keys=True))
            sink.write("\n")
