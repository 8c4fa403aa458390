"""The merge relation between exploration states.

A freshly generated state is folded into an earlier one when both would
behave the same from now on.  Structural requirements first: both states are
pure, fire the same joint action, and their expected rewards grew towards
the same action at the last step.  The remaining checks depend on how the
two states are related in the generation tree:

* identical states: nothing further;
* direct successor (distance 1): the executed action's expected reward must
  not have dropped, for any player;
* longer ancestor path: replaying the path's joint-action word from the new
  state must reproduce the same strategies step by step, and the expected
  reward of each step's action must have moved the right way -- shrunk for
  plain FP (its oscillations damp out on a loop) and grown for the
  discounted variants (their estimates keep strengthening on a loop);
* no path: the two predecessors must have used the same strategy, the
  rewards must show the same movement as on a path relative to the other
  actions (under plain FP the executed action's reward has damped while no
  other action's dropped; under the discounted variants the executed
  action's reward has grown while no other action's rose -- the signature
  of two branches approaching one loop from opposite phases), and playing
  both states forward in lockstep must produce identical strategies over
  twice the generation lag.  The last check separates genuinely equivalent
  branches from loops whose repetition pattern is still stretching, which
  show the same reward movements but drift apart when replayed.

A separate guard applies when both predecessors already played the same
strategy as the states themselves: every unplayed action must be falling
behind the played one, unless the played action is already the best raw
reply to the opponents' executed actions.

All comparisons use an absolute tolerance, so branches that differ only by
floating-point noise still merge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import learners
from .dtmc import ExplorationState
from .game import Game, argmax_with_ties, expected_reward_vector

DEFAULT_TOL = 1e-9

_UNRESOLVED = object()


@dataclass(frozen=True)
class SimilarityContext:
    """Everything the relation needs besides the two states."""

    game: Game
    algorithm: str  # "fp" | "gfp" | "afffp"
    get_state: Callable[[int], ExplorationState]
    tol: float = DEFAULT_TOL


def _strategies_equal(a, b, tol: float) -> bool:
    if a is None or b is None:
        return False
    if a is b:
        return True
    return all(
        np.allclose(da, db, rtol=0.0, atol=tol) for da, db in zip(a, b)
    )


def _predecessors_equal(s1, s2, tol: float) -> bool:
    # Pure predecessors compare by executed action; the mixed initial state
    # is a single shared object, so identity covers it.
    if s1.predecessor_pure_action is not None \
            and s2.predecessor_pure_action is not None:
        return s1.predecessor_pure_action == s2.predecessor_pure_action
    if s1.predecessor_pure_action is None \
            and s2.predecessor_pure_action is None:
        return _strategies_equal(
            s1.predecessor_strategy, s2.predecessor_strategy, tol
        )
    return False


def ancestor_distance(s1, s2, get_state) -> int | None:
    """Length of the generation-tree path from s1 down to s2, if any."""
    if s1 is s2 or (s2.id >= 0 and s1.id == s2.id):
        return 0
    steps = 0
    current = s2
    while current.parent_id is not None:
        current = get_state(current.parent_id)
        steps += 1
        if current.id == s1.id:
            return steps
    return None


def _chain_between(s1, s2, get_state) -> list[ExplorationState]:
    """States along the generation path, s1 first, s2 last."""
    chain = [s2]
    current = s2
    while current.id != s1.id:
        current = get_state(current.parent_id)
        chain.append(current)
    chain.reverse()
    return chain


def _rewards_of(game: Game, learner) -> list[np.ndarray]:
    return [
        expected_reward_vector(game, i, learners.estimates(learner, i, game))
        for i in range(game.num_players)
    ]


def replay_strategies(from_state: ExplorationState, word, game: Game):
    """Joint strategies produced by playing ``word`` from a state.

    The learner is cloned, each joint action observed in turn, and the
    best-response strategy recorded after every step (replays only ever
    happen past the first iteration, where best response is the rule).
    """
    if not word:
        raise ValueError("replay needs a non-empty action word")
    learner = from_state.learner
    strategies = []
    for action in word:
        learner = learners.observe(learner, game, action)
        rewards = _rewards_of(game, learner)
        strategies.append(tuple(argmax_with_ties(r) for r in rewards))
    return strategies


def _initial_step_agrees(s1, s2, ctx: SimilarityContext) -> bool:
    # Both states' expected rewards must have grown fastest towards the
    # same action, player by player, relative to their predecessors.
    return s1.reward_gain_argmax == s2.reward_gain_argmax


def _shared_prefix_guard(s1, s2, ctx: SimilarityContext) -> bool:
    # Applies only when both predecessors played the states' own strategy.
    if not (
        s1.predecessor_pure_action == s1.pure_action
        and s2.predecessor_pure_action == s1.pure_action
    ):
        return True
    executed = s1.pure_action
    game = ctx.game
    for i in range(game.num_players):
        slicer = tuple(
            a if j != i else slice(None) for j, a in enumerate(executed)
        )
        raw = game.reward_tensor(i)[slicer]
        if raw[executed[i]] >= raw.max() - ctx.tol:
            continue  # executed action already the best raw reply
        r1 = s1.expected_rewards[i]
        r2 = s2.expected_rewards[i]
        gap_exec = r2[executed[i]] - r1[executed[i]]
        for a in range(game.action_counts[i]):
            if a == executed[i]:
                continue
            if r2[a] - r1[a] > gap_exec + ctx.tol:
                return False
    return True


def _executed_reward_not_dropped(s1, s2, ctx: SimilarityContext) -> bool:
    executed = s1.pure_action
    for i in range(ctx.game.num_players):
        if (
            s2.expected_rewards[i][executed[i]]
            < s1.expected_rewards[i][executed[i]] - ctx.tol
        ):
            return False
    return True


def _path_replay_agrees(s1, s2, ctx: SimilarityContext) -> bool:
    # Replay the path word from s2 and compare against the actual path step
    # by step: same strategies, and the step action's expected reward damped
    # (fp) or strengthened (gfp/afffp) relative to one lap earlier.
    game = ctx.game
    chain = _chain_between(s1, s2, ctx.get_state)
    learner = s2.learner
    for j in range(1, len(chain)):
        learner = learners.observe(learner, game, chain[j - 1].pure_action)
        rewards = _rewards_of(game, learner)
        step = chain[j].pure_action
        replayed = tuple(argmax_with_ties(r) for r in rewards)
        if replayed != step:
            return False
        for i in range(game.num_players):
            lap1 = chain[j].expected_rewards[i][step[i]]
            lap2 = rewards[i][step[i]]
            if ctx.algorithm == "fp":
                if lap2 > lap1 + ctx.tol:
                    return False
            elif lap2 < lap1 - ctx.tol:
                return False
    return True


# Bound on the lockstep-replay window for the no-path case; divergence of
# non-equivalent branches shows up within their generation lag.
MAX_LOCKSTEP_HORIZON = 512


def _disjoint_branches_agree(s1, s2, ctx: SimilarityContext) -> bool:
    if not _predecessors_equal(s1, s2, ctx.tol):
        return False
    damped = ctx.algorithm == "fp"
    executed = s1.pure_action
    for i in range(ctx.game.num_players):
        r1 = s1.expected_rewards[i]
        r2 = s2.expected_rewards[i]
        for a in range(ctx.game.action_counts[i]):
            if a == executed[i]:
                ok = r2[a] <= r1[a] + ctx.tol if damped \
                    else r2[a] >= r1[a] - ctx.tol
            else:
                ok = r2[a] >= r1[a] - ctx.tol if damped \
                    else r2[a] <= r1[a] + ctx.tol
            if not ok:
                return False
    horizon = min(max(2 * (s2.depth - s1.depth), 2), MAX_LOCKSTEP_HORIZON)
    return _futures_agree(s1, s2, horizon, ctx)


def _futures_agree(s1, s2, horizon: int, ctx: SimilarityContext) -> bool:
    """Play both states forward together; strategies must stay identical."""
    game = ctx.game
    action = s1.pure_action
    learner1, learner2 = s1.learner, s2.learner
    for _ in range(horizon):
        learner1 = learners.observe(learner1, game, action)
        learner2 = learners.observe(learner2, game, action)
        next1 = tuple(
            argmax_with_ties(r) for r in _rewards_of(game, learner1)
        )
        next2 = tuple(
            argmax_with_ties(r) for r in _rewards_of(game, learner2)
        )
        if next1 != next2:
            return False
        action = next1
    return True


def similar(
    s1: ExplorationState,
    s2: ExplorationState,
    ctx: SimilarityContext,
    distance=_UNRESOLVED,
) -> bool:
    """Whether the earlier state s1 subsumes the later state s2.

    ``distance`` may carry a precomputed generation-tree distance from s1
    down to s2 (``None`` when no path exists); it is derived from the parent
    links otherwise.
    """
    if s1.is_sink or s2.is_sink:
        return False
    # States without a predecessor (the initial state) carry no reward
    # history to compare; they never merge.
    if (
        s1.predecessor_expected_rewards is None
        or s2.predecessor_expected_rewards is None
    ):
        return False
    if s1.pure_action is None or s2.pure_action is None:
        return False
    if s1.pure_action != s2.pure_action:
        return False
    if not _initial_step_agrees(s1, s2, ctx):
        return False
    if not _shared_prefix_guard(s1, s2, ctx):
        return False
    if distance is _UNRESOLVED:
        distance = ancestor_distance(s1, s2, ctx.get_state)
    if distance == 0:
        return True
    if distance == 1:
        return _executed_reward_not_dropped(s1, s2, ctx)
    if distance is not None:
        return _path_replay_agrees(s1, s2, ctx)
    return _disjoint_branches_agree(s1, s2, ctx)
