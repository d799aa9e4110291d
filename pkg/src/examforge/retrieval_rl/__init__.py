"""Learned case retrieval: embeddings, kernel value estimates, soft policies."""

from .embedding import DEFAULT_DIM, Embedding, embed
from .kernel import KernelParams, kernel_value
from .estimator import DatasetRecord, QEstimator, TdTransition, entropy, softmax
from .embedding import cosine_similarity
from .retrieval import (
    EmbeddingIndex,
    RetrievalConfig,
    RetrievalMode,
    RetrievalStats,
    read_np,
    read_p,
)

__all__ = [
    "DEFAULT_DIM",
    "DatasetRecord",
    "Embedding",
    "EmbeddingIndex",
    "KernelParams",
    "QEstimator",
    "RetrievalConfig",
    "RetrievalMode",
    "RetrievalStats",
    "TdTransition",
    "cosine_similarity",
    "embed",
    "entropy",
    "kernel_value",
    "read_np",
    "read_p",
    "softmax",
]
