"""Deterministic text embeddings.

The default embedder hashes character trigrams into a fixed-width count
vector and L2-normalizes it. It is a stable stand-in for a semantic
embedder: equal texts always map to equal vectors, across processes and
platforms. A remote embedder can be plugged in behind the same contract.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

DEFAULT_DIM = 256

# Boundary sentinels guarantee at least one trigram for any non-empty text.
_PAD_LEFT = "\x02"
_PAD_RIGHT = "\x03"


@dataclass(frozen=True, eq=False)
class Embedding:
    values: np.ndarray
    norm: float = field(default=0.0)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError(f"embedding must be 1-d, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("embedding entries must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "norm", float(np.linalg.norm(values)))

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _bucket(gram: str, dim: int) -> int:
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % dim


def embed(text: str, dim: int = DEFAULT_DIM) -> Embedding:
    """Embed a text; empty text maps to the zero vector by convention."""
    counts = np.zeros(dim, dtype=np.float64)
    if text:
        padded = _PAD_LEFT + text + _PAD_RIGHT
        for i in range(len(padded) - 2):
            counts[_bucket(padded[i : i + 3], dim)] += 1.0
        counts /= np.linalg.norm(counts)
    return Embedding(counts)


def cosine_similarity(a: Embedding, b: Embedding) -> float:
    """Cosine similarity; zero vectors are orthogonal to everything."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    return float(np.dot(a.values, b.values) / (a.norm * b.norm))
