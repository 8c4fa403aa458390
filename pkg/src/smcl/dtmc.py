"""State and chain types produced by the exploration of a learning run.

An exploration state pairs the joint strategy the players would use with the
full parameter vector of the learning algorithm, plus the bookkeeping the
merge relation needs: the generating parent, the joint action that led here,
and snapshots of the predecessor's strategy and expected rewards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .game import argmax_with_ties

STRATEGY_TOL = 1e-9


class Transition(NamedTuple):
    target: int
    probability: float
    action: tuple[int, ...] | None  # None for transitions into the sink


@dataclass
class ExplorationState:
    """One node of the chain: joint strategy plus learner parameters."""

    id: int
    strategy: tuple[np.ndarray, ...] | None
    learner: object | None
    depth: int
    parent_id: int | None = None
    executed_from_parent: tuple[int, ...] | None = None
    expected_rewards: tuple[np.ndarray, ...] | None = None
    predecessor_strategy: tuple[np.ndarray, ...] | None = None
    predecessor_expected_rewards: tuple[np.ndarray, ...] | None = None
    # Joint action executed here when the strategy is degenerate.
    pure_action: tuple[int, ...] | None = None
    # The predecessor's pure action, cached so the merge relation can
    # compare predecessor strategies without touching the arrays.
    predecessor_pure_action: tuple[int, ...] | None = None
    # Per player, argmax of (expected rewards here - at the predecessor);
    # cached because the merge relation compares it for every candidate.
    reward_gain_argmax: tuple[int, ...] | None = None
    is_sink: bool = False

    @classmethod
    def sink(cls, state_id: int, depth: int) -> "ExplorationState":
        return cls(id=state_id, strategy=None, learner=None, depth=depth,
                   is_sink=True)

    def positive_actions(self, floor: float = 0.0):
        """Joint actions this state fires, with probabilities, flat order."""
        if self.is_sink:
            return []
        if self.pure_action is not None:
            return [(self.pure_action, 1.0)]
        out = []
        counts = tuple(len(s) for s in self.strategy)
        for action in np.ndindex(*counts):
            p = 1.0
            for i, a in enumerate(action):
                p *= float(self.strategy[i][a])
            if p > floor:
                out.append((tuple(int(a) for a in action), p))
        return out


def pure_action_of(strategy, tol: float = STRATEGY_TOL):
    """The single supported joint action, or None if any player mixes."""
    action = []
    for dist in strategy:
        idx = int(np.argmax(dist))
        if dist[idx] < 1.0 - tol:
            return None
        action.append(idx)
    return tuple(action)


def one_hot(index: int, size: int) -> np.ndarray:
    out = np.zeros(size)
    out[index] = 1.0
    return out


def reward_gain_argmax(current, previous) -> tuple[int, ...]:
    """Per player, the action whose expected reward grew the most."""
    return tuple(
        argmax_with_ties(np.asarray(c) - np.asarray(p))
        for c, p in zip(current, previous)
    )


class MergeEvent(NamedTuple):
    source_id: int
    action: tuple[int, ...]
    target_id: int
    candidate: ExplorationState  # the state that was folded away (id == -1)


@dataclass
class Dtmc:
    """A finite chain over exploration states.

    Transitions are stored one entry per fired joint action, so a source can
    carry several entries to the same target; probabilities of a state's
    entries sum to 1.  The optional sink absorbs truncated branches with a
    self-loop of probability 1.
    """

    states: list[ExplorationState]
    transitions: dict[int, list[Transition]]
    initial_id: int = 0
    sink_id: int | None = None
    truncated: bool = False
    merge_events: list[MergeEvent] = field(default_factory=list)

    @property
    def num_states(self) -> int:
        return len(self.states)

    def state(self, state_id: int) -> ExplorationState:
        return self.states[state_id]

    def out(self, state_id: int) -> list[Transition]:
        return self.transitions.get(state_id, [])

    def out_probability_sum(self, state_id: int) -> float:
        return sum(t.probability for t in self.out(state_id))

    def successors(self, state_id: int) -> list[int]:
        seen = []
        for t in self.out(state_id):
            if t.probability > 0 and t.target not in seen:
                seen.append(t.target)
        return seen
