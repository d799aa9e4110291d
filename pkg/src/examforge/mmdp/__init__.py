"""Memory-based decision process: CBR policy, episode loop, toy environments."""

from .types import (
    AgentAction,
    CompositeRewardConfig,
    EnvState,
    Trajectory,
    TrajectoryStep,
    composite_reward,
)
from .envs import ChainEnv, ContextualBanditEnv, Environment
from .policy import (
    ActionProposer,
    CbrDecision,
    TableProposer,
    cbr_action,
    mixture_distribution,
)
from .episode import (
    EpisodeResult,
    discounted_return,
    dump_trajectory,
    entropy_regularized_return,
    run_episode,
)

__all__ = [
    "ActionProposer",
    "AgentAction",
    "CbrDecision",
    "ChainEnv",
    "CompositeRewardConfig",
    "ContextualBanditEnv",
    "EnvState",
    "Environment",
    "EpisodeResult",
    "TableProposer",
    "Trajectory",
    "TrajectoryStep",
    "cbr_action",
    "composite_reward",
    "discounted_return",
    "dump_trajectory",
    "entropy_regularized_return",
    "mixture_distribution",
    "run_episode",
]
