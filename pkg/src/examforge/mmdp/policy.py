"""The case-conditioned mixture policy.

The acting policy mixes per-case action distributions: each retrieved case
gets a retrieval weight, the proposer adapts it into a distribution over
actions, and the policy samples from the weighted mixture. The proposer
stays fixed; only the retrieval weights are learned.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from ..case_memory import Case, CaseBank
from ..errors import ContractViolationError
from ..retrieval_rl import (
    Embedding,
    EmbeddingIndex,
    QEstimator,
    RetrievalConfig,
    RetrievalMode,
    RetrievalStats,
    embed,
    read_np,
)
from .types import AgentAction, EnvState

_NORMALIZATION_TOL = 1e-9


class ActionProposer(abc.ABC):
    """Adapts one retrieved case (or none, on cold start) into an action
    distribution. Returned probabilities must sum to 1."""

    @abc.abstractmethod
    def propose(
        self, state: EnvState, case: Case | None
    ) -> tuple[tuple[AgentAction, float], ...]:
        ...


class TableProposer(ActionProposer):
    """Deterministic proposer backed by a lookup table, for tests and the
    tutoring policy. Keys are (state text, case action text) with None
    wildcards; the fallback distribution covers everything else."""

    def __init__(
        self,
        fallback: tuple[tuple[AgentAction, float], ...],
        table: dict[tuple[str | None, str | None], tuple[tuple[AgentAction, float], ...]] | None = None,
    ):
        self.fallback = fallback
        self.table = table or {}

    def propose(self, state, case):
        case_text = case.action_text if case is not None else None
        for key in (
            (state.text, case_text),
            (None, case_text),
            (state.text, None),
        ):
            if key in self.table:
                return self.table[key]
        return self.fallback


def _validated(
    distribution: tuple[tuple[AgentAction, float], ...], origin: str
) -> tuple[tuple[AgentAction, float], ...]:
    if not distribution:
        raise ContractViolationError(f"{origin}: empty action distribution")
    total = sum(p for _, p in distribution)
    if abs(total - 1.0) > _NORMALIZATION_TOL:
        raise ContractViolationError(
            f"{origin}: action probabilities sum to {total}, not 1"
        )
    if any(p < 0 for _, p in distribution):
        raise ContractViolationError(f"{origin}: negative action probability")
    return distribution


@dataclass(frozen=True)
class CbrDecision:
    action: AgentAction
    retrieved: tuple[Case, ...]
    probability: float
    mu: tuple[float, ...]


def retrieve_with_weights(
    state_embedding: Embedding,
    bank: CaseBank,
    config: RetrievalConfig,
    estimator: QEstimator,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> tuple[tuple[Case, ...], tuple[float, ...]]:
    """Retrieved cases plus their retrieval weights for the configured mode.

    Non-parametric mode weights the k nearest uniformly. Parametric mode
    draws the candidate pool from the k_pre nearest (the full bank once it
    fits) and weights it by the softmax over learned values.
    """
    if config.mode is RetrievalMode.NONE or len(bank) == 0:
        return (), ()
    if config.mode is RetrievalMode.READ_NP:
        cases = read_np(state_embedding, bank, config.k, index=index, stats=stats)
        weight = 1.0 / len(cases)
        return tuple(cases), tuple(weight for _ in cases)
    candidates = read_np(state_embedding, bank, config.k_pre, index=index)
    if stats is not None:
        stats.read_p_calls += 1
    mu = estimator.retrieval_distribution(
        state_embedding, [case.case_id for case in candidates]
    )
    return tuple(candidates), tuple(float(w) for w in mu)


def mixture_distribution(
    state: EnvState,
    bank: CaseBank,
    config: RetrievalConfig,
    estimator: QEstimator,
    proposer: ActionProposer,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> tuple[tuple[AgentAction, ...], tuple[float, ...], tuple[Case, ...], tuple[float, ...]]:
    """The policy's full action distribution at a state.

    Returns (actions, probabilities, retrieved cases, retrieval weights)
    with actions keyed by text and sorted for a stable order. With an empty
    bank (or retrieval off) the proposer runs unconditioned.
    """
    state_embedding = embed(state.text, config.dim)
    retrieved, mu = retrieve_with_weights(
        state_embedding, bank, config, estimator, index=index, stats=stats
    )

    mixture: dict[str, float] = {}
    actions: dict[str, AgentAction] = {}
    if not retrieved:
        for action, p in _validated(proposer.propose(state, None), "proposer(cold)"):
            mixture[action.text] = mixture.get(action.text, 0.0) + p
            actions.setdefault(action.text, action)
    else:
        for case, weight in zip(retrieved, mu):
            distribution = _validated(
                proposer.propose(state, case), f"proposer(case {case.case_id})"
            )
            for action, p in distribution:
                mixture[action.text] = mixture.get(action.text, 0.0) + weight * p
                actions.setdefault(action.text, action)

    texts = sorted(mixture)
    return (
        tuple(actions[text] for text in texts),
        tuple(mixture[text] for text in texts),
        retrieved,
        mu,
    )


def cbr_action(
    state: EnvState,
    bank: CaseBank,
    config: RetrievalConfig,
    estimator: QEstimator,
    proposer: ActionProposer,
    rng: np.random.Generator,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> CbrDecision:
    """Sample one action from the case-mixture policy.

    The reported probability is the mixture mass of the sampled action.
    """
    actions, probabilities, retrieved, mu = mixture_distribution(
        state, bank, config, estimator, proposer, index=index, stats=stats
    )
    weights = np.array(probabilities)
    chosen = int(rng.choice(len(actions), p=weights / weights.sum()))
    return CbrDecision(
        action=actions[chosen],
        retrieved=retrieved,
        probability=probabilities[chosen],
        mu=mu,
    )
