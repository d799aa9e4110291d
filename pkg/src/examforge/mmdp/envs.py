"""Environment contract and the toy environments used for verification."""

from __future__ import annotations

import abc

import numpy as np

from .types import AgentAction, EnvState

ADVANCE = AgentAction("advance")
STAY = AgentAction("stay")


class Environment(abc.ABC):
    """Transition dynamics and rewards behind a two-method contract.

    Steps must be deterministic given the rng state; rewards finite.
    """

    @abc.abstractmethod
    def initial_state(self, rng: np.random.Generator) -> EnvState:
        ...

    @abc.abstractmethod
    def step(
        self, state: EnvState, action: AgentAction, rng: np.random.Generator
    ) -> tuple[EnvState | None, float]:
        """Returns (next state, reward); next state None means terminal."""

    @abc.abstractmethod
    def candidate_actions(self, state: EnvState) -> tuple[AgentAction, ...]:
        ...


class ChainEnv(Environment):
    """Deterministic left-to-right chain with a reward per advance.

    With rewards (r_0, ..., r_{n-1}), advancing from position i pays r_i and
    the optimal value of position i is sum_{j>=i} gamma^(j-i) * r_j. "stay"
    pays nothing and keeps the position, so always-advance is optimal.
    """

    def __init__(self, rewards: tuple[float, ...] = (0.0, 0.0, 1.0)):
        if not rewards:
            raise ValueError("chain needs at least one position")
        self.rewards = tuple(float(r) for r in rewards)

    def state_at(self, position: int) -> EnvState:
        return EnvState(
            f"chain position {position} of {len(self.rewards)}",
            {"position": str(position)},
        )

    def position_of(self, state: EnvState) -> int:
        return int(state.annotations["position"])

    def initial_state(self, rng: np.random.Generator) -> EnvState:
        return self.state_at(0)

    def step(self, state, action, rng):
        position = self.position_of(state)
        if action.text == "advance":
            reward = self.rewards[position]
            if position + 1 >= len(self.rewards):
                return None, reward
            return self.state_at(position + 1), reward
        return state, 0.0

    def candidate_actions(self, state):
        return (ADVANCE, STAY)

    def optimal_value(self, position: int, gamma: float) -> float:
        value = 0.0
        for offset, reward in enumerate(self.rewards[position:]):
            value += gamma**offset * reward
        return value


class ContextualBanditEnv(Environment):
    """One-step bandit: two contexts, two arms, Bernoulli payoffs.

    The optimal expected reward per context is max over arms of the payoff
    probability, which makes returns easy to check in closed form.
    """

    def __init__(
        self,
        payoffs: dict[str, tuple[float, float]] | None = None,
    ):
        self.payoffs = payoffs or {
            "context A": (0.9, 0.1),
            "context B": (0.2, 0.8),
        }
        self.arms = (AgentAction("pull arm 0"), AgentAction("pull arm 1"))

    def initial_state(self, rng: np.random.Generator) -> EnvState:
        context = sorted(self.payoffs)[int(rng.integers(len(self.payoffs)))]
        return EnvState(f"bandit {context}", {"context": context})

    def step(self, state, action, rng):
        context = state.annotations["context"]
        arm = 0 if action.text.endswith("0") else 1
        p = self.payoffs[context][arm]
        reward = 1.0 if rng.random() < p else 0.0
        return None, reward

    def candidate_actions(self, state):
        return self.arms

    def optimal_expected_reward(self, context: str) -> float:
        return max(self.payoffs[context])
