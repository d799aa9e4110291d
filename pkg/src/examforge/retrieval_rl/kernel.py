"""Anisotropic RBF kernel over embeddings with learnable scaling.

k(e1, e2) = exp(-||W (e1 - e2)||^2 / (2 l^2)) with W = diag(diag_scale).
Both the per-dimension scales and the length scale l are trained by the
estimator's gradient updates; all parameters stay strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import Embedding

# Positivity floor applied after gradient steps.
PARAM_FLOOR = 1e-6


@dataclass
class KernelParams:
    diag_scale: np.ndarray
    length_scale: float

    def __post_init__(self):
        scale = np.asarray(self.diag_scale, dtype=np.float64).copy()
        if scale.ndim != 1:
            raise ValueError("diag_scale must be a vector")
        if not np.all(scale > 0):
            raise ValueError("diag_scale entries must be positive")
        if not self.length_scale > 0:
            raise ValueError("length_scale must be positive")
        self.diag_scale = scale
        self.length_scale = float(self.length_scale)

    @classmethod
    def identity(cls, dim: int) -> "KernelParams":
        return cls(diag_scale=np.ones(dim), length_scale=1.0)

    @property
    def dim(self) -> int:
        return self.diag_scale.shape[0]

    def copy(self) -> "KernelParams":
        return KernelParams(self.diag_scale.copy(), self.length_scale)

    def step(self, grad_scale: np.ndarray, grad_length: float, step_size: float) -> None:
        """One projected gradient-descent step keeping parameters positive."""
        self.diag_scale = np.maximum(self.diag_scale - step_size * grad_scale, PARAM_FLOOR)
        self.length_scale = max(self.length_scale - step_size * grad_length, PARAM_FLOOR)


def scaled_sq_distances(params: KernelParams, query: Embedding, anchors: np.ndarray) -> np.ndarray:
    """||W (query - anchor)||^2 for each anchor row."""
    if anchors.shape[1] != query.dim:
        raise ValueError(f"dimension mismatch: {anchors.shape[1]} vs {query.dim}")
    delta = query.values[None, :] - anchors
    return (delta * delta) @ (params.diag_scale * params.diag_scale)


def kernel_value(params: KernelParams, e1: Embedding, e2: Embedding) -> float:
    """Pairwise kernel value in (0, 1]; equals 1 exactly at zero distance."""
    if e1.dim != e2.dim:
        raise ValueError(f"dimension mismatch: {e1.dim} vs {e2.dim}")
    if params.dim != e1.dim:
        raise ValueError(f"params dimension {params.dim} does not match embeddings {e1.dim}")
    delta = (e1.values - e2.values) * params.diag_scale
    sq = float(np.dot(delta, delta))
    return float(np.exp(-sq / (2.0 * params.length_scale**2)))
