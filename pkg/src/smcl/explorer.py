"""Breadth-first construction of the chain of learning states.

Exploration starts from the initial learner state, whose strategy uses the
smooth best response with temperature ``tau0`` (the one probabilistic step);
every later state plays deterministic best responses.  Each positive-
probability joint action of a dequeued state yields a candidate successor,
which is either folded into an earlier state accepted by the merge relation
(scanning newest first) or appended and enqueued.  When the depth bound is
hit with work remaining, the open frontier is redirected into an absorbing
sink state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import learners
from .dtmc import (
    Dtmc,
    ExplorationState,
    MergeEvent,
    Transition,
    one_hot,
    pure_action_of,
    reward_gain_argmax,
)
from .game import Game, argmax_with_ties, smooth_best_response
from .similarity import SimilarityContext, _rewards_of, similar


class StateBudgetError(RuntimeError):
    """Raised when exploration outgrows the configured state cap."""

    def __init__(self, state_count: int, cap: int):
        super().__init__(
            f"exploration exceeded the state cap ({state_count} > {cap})"
        )
        self.state_count = state_count
        self.cap = cap


@dataclass(frozen=True)
class ExploreConfig:
    max_depth: int = 100
    tau0: float = 0.01
    prob_floor: float = 0.0
    merge_enabled: bool = True
    state_cap: int = 1_000_000

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")
        if self.prob_floor < 0:
            raise ValueError("prob_floor must be non-negative")


def _validate_learner(game: Game, learner) -> None:
    for i in range(game.num_players):
        ests = learners.estimates(learner, i, game)
        for j, sigma in enumerate(ests):
            if j == i:
                continue
            if sigma is None or len(sigma) != game.action_counts[j]:
                raise ValueError(
                    "learner state does not match the game's action counts"
                )


def successor(
    state: ExplorationState,
    action,
    game: Game,
    rule: str = "br",
    tau: float | None = None,
) -> ExplorationState:
    """Candidate state reached by firing ``action`` from ``state``.

    ``rule`` selects the decision rule of the new state: ``"br"`` (the
    default past the first iteration) or ``"sbr"`` with temperature ``tau``.
    The candidate carries no id (-1) until the explorer adopts it.
    """
    action = game.validate_joint_action(action)
    learner = learners.observe(state.learner, game, action)
    rewards = tuple(_rewards_of(game, learner))
    if rule == "br":
        choice = tuple(argmax_with_ties(r) for r in rewards)
        strategy = tuple(
            one_hot(choice[i], game.action_counts[i])
            for i in range(game.num_players)
        )
        pure = choice
    elif rule == "sbr":
        strategy = tuple(
            smooth_best_response(
                game, i, learners.estimates(learner, i, game), tau
            )
            for i in range(game.num_players)
        )
        pure = pure_action_of(strategy)
    else:
        raise ValueError(f"unknown decision rule {rule!r}")
    return ExplorationState(
        id=-1,
        strategy=strategy,
        learner=learner,
        depth=state.depth + 1,
        parent_id=state.id,
        executed_from_parent=action,
        expected_rewards=rewards,
        predecessor_strategy=state.strategy,
        predecessor_expected_rewards=state.expected_rewards,
        pure_action=pure,
        predecessor_pure_action=state.pure_action,
        reward_gain_argmax=reward_gain_argmax(rewards, state.expected_rewards),
    )


def _initial_state(game: Game, learner, tau0: float) -> ExplorationState:
    rewards = tuple(_rewards_of(game, learner))
    strategy = tuple(
        smooth_best_response(game, i, learners.estimates(learner, i, game),
                             tau0)
        for i in range(game.num_players)
    )
    return ExplorationState(
        id=0,
        strategy=strategy,
        learner=learner,
        depth=0,
        expected_rewards=rewards,
        pure_action=pure_action_of(strategy),
    )


def explore(game: Game, initial_learner, cfg: ExploreConfig) -> Dtmc:
    """Build the chain of reachable learning states breadth first."""
    _validate_learner(game, initial_learner)
    ctx = SimilarityContext(
        game=game,
        algorithm=learners.algorithm_of(initial_learner),
        get_state=lambda sid: states[sid],
    )

    states = [_initial_state(game, initial_learner, cfg.tau0)]
    transitions: dict[int, list[Transition]] = {}
    merge_events: list[MergeEvent] = []
    # Merge candidates are grouped by executed joint action: states with a
    # different action can never merge, so the newest-first scan only has to
    # touch the matching bucket.  The initial state never joins a bucket.
    buckets: dict[tuple[int, ...], list[int]] = {}

    queue1 = deque([0])
    queue2: deque[int] = deque()
    depth = 0
    truncated = False
    sink_id = None

    while queue1:
        while queue1:
            sid = queue1.popleft()
            state = states[sid]
            out: list[Transition] = []
            for action, prob in state.positive_actions(cfg.prob_floor):
                candidate = successor(state, action, game)
                target = None
                if cfg.merge_enabled:
                    distances = _ancestor_distances(candidate, states)
                    bucket = buckets.get(candidate.pure_action, ())
                    for tid in reversed(bucket):
                        if similar(states[tid], candidate, ctx,
                                   distance=distances.get(tid)):
                            target = tid
                            merge_events.append(
                                MergeEvent(sid, action, tid, candidate)
                            )
                            break
                if target is None:
                    target = len(states)
                    if target + 1 > cfg.state_cap:
                        raise StateBudgetError(target + 1, cfg.state_cap)
                    candidate.id = target
                    states.append(candidate)
                    if candidate.pure_action is not None:
                        buckets.setdefault(
                            candidate.pure_action, []
                        ).append(target)
                    queue2.append(target)
                out.append(Transition(target, prob, action))
            if cfg.prob_floor > 0:
                total = sum(t.probability for t in out)
                if out and total < 1.0:
                    out = [
                        Transition(t.target, t.probability / total, t.action)
                        for t in out
                    ]
            transitions[sid] = out
        queue1, queue2 = queue2, deque()
        depth += 1
        if depth >= cfg.max_depth and queue1:
            sink_id = len(states)
            states.append(ExplorationState.sink(sink_id, depth))
            transitions[sink_id] = [Transition(sink_id, 1.0, None)]
            for sid in queue1:
                transitions[sid] = [Transition(sink_id, 1.0, None)]
            truncated = True
            break

    return Dtmc(
        states=states,
        transitions=transitions,
        initial_id=0,
        sink_id=sink_id,
        truncated=truncated,
        merge_events=merge_events,
    )


def _ancestor_distances(candidate: ExplorationState, states) -> dict:
    """Map each generation-tree ancestor's id to its distance upward."""
    distances = {}
    current = candidate
    steps = 0
    while current.parent_id is not None:
        current = states[current.parent_id]
        steps += 1
        distances[current.id] = steps
    return distances
