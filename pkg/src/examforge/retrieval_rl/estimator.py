"""Kernel episodic-control value estimates and their training updates.

Each case keeps a dataset of (state embedding, stored value) records from
past interactions. A case's value at a query state is the kernel-weighted
mean of its stored values, so it always stays inside their range. Training
never touches the stored values: gradient steps reshape the kernel (the
per-dimension scales and the length scale), which re-weights them.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ..errors import CheckpointError, ConfigError
from .embedding import Embedding
from .kernel import KernelParams, scaled_sq_distances

CE_CLIP = 1e-7

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class DatasetRecord:
    state: Embedding
    q_value: float


@dataclass(frozen=True)
class TdTransition:
    """One (s, c, r, s') step plus the candidate cases available at s'.

    A terminal transition has next_state None; its target is the bare reward.
    """

    state: Embedding
    case_id: str
    reward: float
    next_state: Embedding | None = None
    next_candidates: tuple[str, ...] = ()


class QValueInfo(NamedTuple):
    value: float
    cold_start: bool


def softmax(values: Sequence[float], alpha: float = 1.0) -> np.ndarray:
    """Temperature softmax with max-subtraction stabilization."""
    if alpha <= 0:
        raise ConfigError(f"softmax temperature must be positive, got {alpha}")
    scaled = np.asarray(values, dtype=np.float64) / alpha
    if scaled.size == 0:
        raise ValueError("softmax over an empty set")
    scaled -= scaled.max()
    weights = np.exp(scaled)
    return weights / weights.sum()


def entropy(probabilities: Sequence[float]) -> float:
    """Shannon entropy in nats, with 0 * ln 0 = 0."""
    p = np.asarray(probabilities, dtype=np.float64)
    if p.size == 0:
        return 0.0
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total}, not 1")
    nonzero = p[p > 0]
    return float(-(nonzero * np.log(nonzero)).sum())


def _logsumexp(values: np.ndarray) -> float:
    top = values.max()
    return float(top + np.log(np.exp(values - top).sum()))


class _CaseStats(NamedTuple):
    q: float
    weights: np.ndarray  # normalized kernel weights per record
    deltas_sq: np.ndarray  # (m, dim) squared coordinate differences
    sq_dists: np.ndarray  # (m,) scaled squared distances
    q_values: np.ndarray  # (m,) stored values


class QEstimator:
    """Learns the retrieval value function over a case bank.

    Single-writer: training updates are serialized by the caller. Scoring
    reads (q_value, retrieval_distribution) are pure.
    """

    def __init__(
        self,
        dim: int,
        alpha: float = 1.0,
        gamma: float = 0.9,
        step_size: float = 0.05,
        q0: float = 0.0,
        sync_every: int = 50,
        literal_backup: bool = False,
        params: KernelParams | None = None,
    ):
        if alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {alpha}")
        if not 0.0 <= gamma < 1.0:
            raise ConfigError(f"gamma must be in [0, 1), got {gamma}")
        if step_size <= 0:
            raise ConfigError(f"step_size must be positive, got {step_size}")
        if sync_every < 1:
            raise ConfigError(f"sync_every must be >= 1, got {sync_every}")
        self.dim = dim
        self.alpha = alpha
        self.gamma = gamma
        self.step_size = step_size
        self.q0 = q0
        self.sync_every = sync_every
        self.literal_backup = literal_backup
        self.params = params if params is not None else KernelParams.identity(dim)
        if self.params.dim != dim:
            raise ConfigError(f"params dimension {self.params.dim} != {dim}")
        self.target = self.params.copy()
        self.datasets: dict[str, list[DatasetRecord]] = {}
        self.update_count = 0
        self.sync_count = 0

    # ------------------------------------------------------------------
    # dataset maintenance

    def add_record(self, case_id: str, state: Embedding, q_value: float) -> None:
        if state.dim != self.dim:
            raise ValueError(f"record dimension {state.dim} != {self.dim}")
        if not np.isfinite(q_value):
            raise ValueError("stored value must be finite")
        self.datasets.setdefault(case_id, []).append(DatasetRecord(state, float(q_value)))

    def dataset_size(self, case_id: str) -> int:
        return len(self.datasets.get(case_id, ()))

    # ------------------------------------------------------------------
    # scoring

    def _case_stats(
        self, state: Embedding, case_id: str, params: KernelParams
    ) -> _CaseStats | None:
        records = self.datasets.get(case_id)
        if not records:
            return None
        anchors = np.stack([record.state.values for record in records])
        q_values = np.array([record.q_value for record in records])
        delta = state.values[None, :] - anchors
        deltas_sq = delta * delta
        sq_dists = deltas_sq @ (params.diag_scale * params.diag_scale)
        # The weighted mean is invariant to a common kernel factor, so shift
        # by the minimum distance to avoid exp underflow.
        shifted = -(sq_dists - sq_dists.min()) / (2.0 * params.length_scale**2)
        kernels = np.exp(shifted)
        weights = kernels / kernels.sum()
        q = float(weights @ q_values)
        return _CaseStats(q, weights, deltas_sq, sq_dists, q_values)

    def q_value_info(
        self, state: Embedding, case_id: str, use_target: bool = False
    ) -> QValueInfo:
        params = self.target if use_target else self.params
        stats = self._case_stats(state, case_id, params)
        if stats is None:
            return QValueInfo(self.q0, True)
        return QValueInfo(stats.q, False)

    def q_value(self, state: Embedding, case_id: str, use_target: bool = False) -> float:
        return self.q_value_info(state, case_id, use_target).value

    def retrieval_distribution(
        self, state: Embedding, case_ids: Sequence[str]
    ) -> np.ndarray:
        """Softmax over case values at the given state; order-covariant."""
        if not case_ids:
            raise ValueError("candidate set must be non-empty")
        qs = [self.q_value(state, case_id) for case_id in case_ids]
        return softmax(qs, self.alpha)

    def soft_backup(self, state: Embedding, candidate_ids: Sequence[str]) -> float:
        """Value of the next state under the softmax retrieval policy.

        Default form is alpha * logsumexp(Q / alpha), consistent with the
        softmax policy; literal_backup drops the inner /alpha.
        """
        if not candidate_ids:
            return 0.0
        qs = np.array(
            [self.q_value(state, case_id, use_target=True) for case_id in candidate_ids]
        )
        if self.literal_backup:
            return self.alpha * _logsumexp(qs)
        return self.alpha * _logsumexp(qs / self.alpha)

    # ------------------------------------------------------------------
    # gradients

    def _q_gradient(
        self, stats: _CaseStats, params: KernelParams
    ) -> tuple[np.ndarray, float]:
        """dQ/d(diag_scale), dQ/d(length_scale) at a single query."""
        residual = stats.weights * (stats.q_values - stats.q)
        grad_scale = -(params.diag_scale / params.length_scale**2) * (
            residual @ stats.deltas_sq
        )
        grad_length = float(residual @ stats.sq_dists) / params.length_scale**3
        return grad_scale, grad_length

    def td_loss_and_gradient(
        self, batch: Sequence[TdTransition], params: KernelParams | None = None
    ) -> tuple[float, np.ndarray, float]:
        """Mean squared TD error and its gradient w.r.t. the kernel parameters.

        Targets use the frozen target parameters and carry no gradient.
        """
        if not batch:
            raise ValueError("batch must be non-empty")
        params = params if params is not None else self.params
        total_loss = 0.0
        grad_scale = np.zeros(self.dim)
        grad_length = 0.0
        for transition in batch:
            if transition.next_state is None:
                target = transition.reward
            else:
                target = transition.reward + self.gamma * self.soft_backup(
                    transition.next_state, transition.next_candidates
                )
            stats = self._case_stats(transition.state, transition.case_id, params)
            if stats is None:
                q = self.q0
            else:
                q = stats.q
            error = q - target
            total_loss += error * error
            if stats is not None:
                g_scale, g_length = self._q_gradient(stats, params)
                grad_scale += 2.0 * error * g_scale
                grad_length += 2.0 * error * g_length
        n = len(batch)
        return total_loss / n, grad_scale / n, grad_length / n

    def ce_loss_and_gradient(
        self,
        batch: Sequence[tuple[Embedding, str, float]],
        params: KernelParams | None = None,
    ) -> tuple[float, np.ndarray, float]:
        """Mean binary cross-entropy treating each value as P(success)."""
        if not batch:
            raise ValueError("batch must be non-empty")
        params = params if params is not None else self.params
        total_loss = 0.0
        grad_scale = np.zeros(self.dim)
        grad_length = 0.0
        for state, case_id, reward in batch:
            if reward not in (0.0, 1.0):
                raise ValueError(f"binary reward must be 0 or 1, got {reward}")
            stats = self._case_stats(state, case_id, params)
            q = self.q0 if stats is None else stats.q
            clipped = min(max(q, CE_CLIP), 1.0 - CE_CLIP)
            total_loss += -reward * np.log(clipped) - (1.0 - reward) * np.log(1.0 - clipped)
            if stats is not None and CE_CLIP < q < 1.0 - CE_CLIP:
                dloss_dq = (clipped - reward) / (clipped * (1.0 - clipped))
                g_scale, g_length = self._q_gradient(stats, params)
                grad_scale += dloss_dq * g_scale
                grad_length += dloss_dq * g_length
        n = len(batch)
        return total_loss / n, grad_scale / n, grad_length / n

    # ------------------------------------------------------------------
    # training

    def _apply_step(
        self, grad_scale: np.ndarray, grad_length: float, step_size: float | None
    ) -> None:
        if step_size is None:
            step_size = self.step_size
        elif step_size < 0:
            raise ConfigError(f"step_size must be >= 0, got {step_size}")
        self.params.step(grad_scale, grad_length, step_size)
        self.update_count += 1

    def td_update(
        self, batch: Sequence[TdTransition], step_size: float | None = None
    ) -> float:
        """One gradient-descent step on the TD loss; returns the loss."""
        loss, grad_scale, grad_length = self.td_loss_and_gradient(batch)
        self._apply_step(grad_scale, grad_length, step_size)
        return loss

    def ce_update(
        self,
        batch: Sequence[tuple[Embedding, str, float]],
        step_size: float | None = None,
    ) -> float:
        """One gradient-descent step on the cross-entropy loss."""
        loss, grad_scale, grad_length = self.ce_loss_and_gradient(batch)
        self._apply_step(grad_scale, grad_length, step_size)
        return loss

    def sync_target(self) -> None:
        self.target = self.params.copy()
        self.sync_count += 1

    def maybe_sync_target(self) -> bool:
        """Sync on the configured cadence; returns whether a sync happened."""
        if self.update_count and self.update_count % self.sync_every == 0:
            self.sync_target()
            return True
        return False

    # ------------------------------------------------------------------
    # persistence

    def save(self, path: str | os.PathLike) -> None:
        payload = {
            "version": CHECKPOINT_VERSION,
            "dim": self.dim,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "step_size": self.step_size,
            "q0": self.q0,
            "sync_every": self.sync_every,
            "literal_backup": self.literal_backup,
            "update_count": self.update_count,
            "sync_count": self.sync_count,
            "params": {
                "diag_scale": self.params.diag_scale.tolist(),
                "length_scale": self.params.length_scale,
            },
            "target": {
                "diag_scale": self.target.diag_scale.tolist(),
                "length_scale": self.target.length_scale,
            },
            "datasets": {
                case_id: [
                    {"state": record.state.values.tolist(), "q": record.q_value}
                    for record in records
                ]
                for case_id, records in self.datasets.items()
            },
        }
        with open(path, "w", encoding="utf-8") as sink:
            json.dump(payload, sink, ensure_ascii=False, sort_keys=True)
            sink.write("\n")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "QEstimator":
        with open(path, "r", encoding="utf-8") as source:
            payload = json.load(source)
        version = payload.get("version")
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"checkpoint version {version!r} not supported (expected {CHECKPOINT_VERSION})"
            )
        estimator = cls(
            dim=payload["dim"],
            alpha=payload["alpha"],
            gamma=payload["gamma"],
            step_size=payload["step_size"],
            q0=payload["q0"],
            sync_every=payload["sync_every"],
            literal_backup=payload["literal_backup"],
            params=KernelParams(
                np.array(payload["params"]["diag_scale"]),
                payload["params"]["length_scale"],
            ),
        )
        estimator.target = KernelParams(
            np.array(payload["target"]["diag_scale"]),
            payload["target"]["length_scale"],
        )
        estimator.update_count = payload["update_count"]
        estimator.sync_count = payload["sync_count"]
        for case_id, records in payload["datasets"].items():
            for record in records:
                estimator.add_record(
                    case_id, Embedding(np.array(record["state"])), record["q"]
                )
        return estimator
