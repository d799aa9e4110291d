"""Case retrieval modes over a bank.

read_np ranks by semantic similarity alone (non-parametric); read_p ranks
by learned case values (parametric). Both are exact full scans; ties break
toward the earlier created_seq and results come back best-first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..case_memory import Case, CaseBank
from ..errors import ConfigError
from .embedding import DEFAULT_DIM, Embedding, cosine_similarity, embed
from .estimator import QEstimator


class RetrievalMode(enum.Enum):
    NONE = "none"
    READ_NP = "readnp"
    READ_P = "readp"


@dataclass
class RetrievalConfig:
    mode: RetrievalMode = RetrievalMode.READ_NP
    k: int = 4
    k_pre: int = 32  # candidate pool for the softmax in parametric mode
    alpha: float = 1.0
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.k_pre < 1:
            raise ConfigError(f"k_pre must be >= 1, got {self.k_pre}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")


class EmbeddingIndex:
    """Caches embeddings keyed by the exact text embedded.

    Case ids are only unique within one bank, so the cache keys on the
    state text itself; equal texts share one vector.
    """

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim
        self._cache: dict[str, Embedding] = {}

    def state_embedding(self, case: Case) -> Embedding:
        return self.text_embedding(case.state_text)

    def text_embedding(self, text: str) -> Embedding:
        cached = self._cache.get(text)
        if cached is None:
            cached = embed(text, self.dim)
            self._cache[text] = cached
        return cached


@dataclass
class RetrievalStats:
    """Counts retrieval invocations; the no-memory pipeline must stay at 0."""

    read_np_calls: int = 0
    read_p_calls: int = 0

    @property
    def total_calls(self) -> int:
        return self.read_np_calls + self.read_p_calls


def read_np(
    state: Embedding,
    bank: CaseBank,
    k: int,
    index: EmbeddingIndex | None = None,
    stats: RetrievalStats | None = None,
) -> list[Case]:
    """The k bank cases most cosine-similar to the query state."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if stats is not None:
        stats.read_np_calls += 1
    index = index or EmbeddingIndex(state.dim)
    ranked = sorted(
        bank.snapshot(),
        key=lambda case: (-cosine_similarity(state, index.state_embedding(case)), case.created_seq),
    )
    return ranked[:k]


def read_p(
    state: Embedding,
    bank: CaseBank,
    estimator: QEstimator,
    k: int,
    stats: RetrievalStats | None = None,
) -> list[Case]:
    """The k bank cases with the highest learned values at the query state.

    Cases without interaction records score the estimator's cold-start
    prior, so a fresh bank degenerates to created_seq order.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if stats is not None:
        stats.read_p_calls += 1
    ranked = sorted(
        bank.snapshot(),
        key=lambda case: (-estimator.q_value(state, case.case_id), case.created_seq),
    )
    return ranked[:k]
