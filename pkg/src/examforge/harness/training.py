"""Training loops for the value estimator on the toy environments."""

from __future__ import annotations

from dataclasses import dataclass

from ..case_memory import CaseBank
from ..mmdp import ChainEnv
from ..retrieval_rl import QEstimator, TdTransition, embed


@dataclass
class ChainTrainingResult:
    estimator: QEstimator
    bank: CaseBank
    case_id: str
    losses: list[float]
    q_start: float
    oracle_start: float

    @property
    def start_gap(self) -> float:
        return abs(self.q_start - self.oracle_start)


def train_chain_estimator(
    updates: int = 3000,
    gamma: float = 0.9,
    dim: int = 64,
    step_size: float = 0.5,
    sync_every: int = 50,
    alpha: float = 1.0,
    rewards: tuple[float, ...] = (0.0, 0.0, 1.0),
    literal_backup: bool = False,
) -> ChainTrainingResult:
    """Fit the kernel on the deterministic chain's TD fixed point.

    One reusable "advance" case serves every chain position; its dataset
    holds the observed return from each position (the episode loop's
    population rule applied to the optimal walk). Training never moves the
    stored returns; it sharpens the kernel until each position's value
    reads back its own return, which is exactly the fixed point the
    Bellman targets demand.
    """
    env = ChainEnv(rewards)
    bank = CaseBank()
    case = bank.new_case(
        state_text="advance along the chain",
        action_text="advance",
        reward=rewards[-1],
        success=True,
    )
    bank.retain(case)

    estimator = QEstimator(
        dim=dim,
        alpha=alpha,
        gamma=gamma,
        step_size=step_size,
        sync_every=sync_every,
        literal_backup=literal_backup,
    )
    states = [embed(env.state_at(i).text, dim) for i in range(len(rewards))]
    for position, state in enumerate(states):
        estimator.add_record(case.case_id, state, env.optimal_value(position, gamma))

    batch = []
    for position in range(len(rewards)):
        terminal = position + 1 >= len(rewards)
        batch.append(
            TdTransition(
                state=states[position],
                case_id=case.case_id,
                reward=rewards[position],
                next_state=None if terminal else states[position + 1],
                next_candidates=() if terminal else (case.case_id,),
            )
        )

    losses: list[float] = []
    for _ in range(updates):
        losses.append(estimator.td_update(batch))
        estimator.maybe_sync_target()

    return ChainTrainingResult(
        estimator=estimator,
        bank=bank,
        case_id=case.case_id,
        losses=losses,
        q_start=estimator.q_value(states[0], case.case_id),
        oracle_start=env.optimal_value(0, gamma),
    )
