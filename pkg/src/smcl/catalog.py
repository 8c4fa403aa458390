"""Built-in benchmark games and initialisation generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import Game
from .learners import ordered_pairs

# Initial weights used throughout the bundled walkthroughs of the simple
# coordination game: player 1 slightly expects action 0 from player 2, and
# vice versa slightly expects action 1.
SIMPLE_COORDINATION_WEIGHTS = {
    (0, 1): (0.511, 0.489),
    (1, 0): (0.489, 0.511),
}

# Equal initial weights for the cyclic 3x3 game; the only initialisation
# from which both players keep tying and time-share the diagonal.
SHAPLEY_EQUAL_WEIGHTS = {
    (0, 1): (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
    (1, 0): (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
}


def simple_coordination() -> Game:
    """2x2 game paying (1, 1) on the diagonal and (0, 0) off it."""
    table = np.array([[1.0, 0.0], [0.0, 1.0]])
    return Game.from_tables([table, table])


def shapley() -> Game:
    """3x3 cyclic game with no pure equilibrium.

    Each action beats one opponent action (reward 1 to one player), loses
    to another, and draws on the diagonal.
    """
    row = np.array([
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
    ])
    col = np.array([
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
    ])
    return Game.from_tables([row, col])


@dataclass(frozen=True)
class ComplexGameParams:
    n: int = 5
    delta: float = 0.03

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def zeta(self) -> float:
        return 1.0 + 1.0 / self.n ** (1.0 - self.delta)

    @property
    def beta(self) -> float:
        return 1.0 - 1.0 / self.n ** (2.0 * (1.0 - self.delta))


def _complex_entry(i: int, j: int, n: int, zeta: float, beta: float) -> float:
    """Reward for row i, column j (1-based); first matching rule wins."""
    if n + 1 <= i <= 4 * n and j == i:
        return 1.0
    if 2 <= i <= n and j == i - 1:
        return 1.0
    if n + 1 <= i <= 4 * n and j == i - 1:
        return zeta
    if i == 2 * n + 1 and j == 4 * n:
        return zeta
    if j <= 2 * n and i > j:
        return beta
    if i - j <= n and i > j:
        return beta
    if 2 * n + 1 <= i <= j - n and 3 * n + 1 <= j <= 4 * n:
        return beta
    return 0.0


def complex_coordination(params: ComplexGameParams | None = None,
                         **kwargs) -> Game:
    """Banded symmetric coordination game with 4n actions per player.

    Both players receive the same reward for every joint action.  The
    values are drawn from {0, 1, zeta, beta} with zeta = 1 + 1/n^(1-delta)
    and beta = 1 - 1/n^(2(1-delta)); the sub-diagonal zeta band holds the
    Pareto-efficient equilibria.
    """
    if params is None:
        params = ComplexGameParams(**kwargs)
    elif kwargs:
        raise ValueError("pass either params or keyword arguments, not both")
    size = 4 * params.n
    table = np.array([
        [
            _complex_entry(i, j, params.n, params.zeta, params.beta)
            for j in range(1, size + 1)
        ]
        for i in range(1, size + 1)
    ])
    return Game.from_tables([table, table])


def random_initial_weights(game: Game, seed) -> dict:
    """Per-pair weights sampled uniformly from (0, 1] and normalised.

    Deterministic per seed; pairs are filled observer-major so the stream
    consumption order is fixed.
    """
    rng = np.random.default_rng(seed)
    out = {}
    for i, j in ordered_pairs(game.num_players):
        raw = 1.0 - rng.random(game.action_counts[j])  # (0, 1]
        out[(i, j)] = raw / raw.sum()
    return out
