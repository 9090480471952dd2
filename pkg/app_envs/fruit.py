"""
FruitLine: a scrolling three-lane track.

Every step the track scrolls one row towards the agent. Fruit in the
agent's lane pays +1; a barrier in the agent's lane ends the episode.
Barrier density grows along the track, so surviving longer means both
more reward and harder rows. Episodes are capped at 500 steps.

Actions: 0 stay, 1 move up a lane, 2 move down a lane.
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from .base import MultiSceneEnv


LANES = 3
ROWS = 500
LOOKAHEAD = 6
LABEL_DEPTH = 3

STAY, UP, DOWN = 0, 1, 2


@dataclass(frozen=True)
class FruitLevel:
    """
    Attributes:
        seed (int): Level seed.
        barriers (np.ndarray): bool (rows, lanes).
        fruit (np.ndarray): bool (rows, lanes); never on a barrier.
    """
    seed: int
    barriers: np.ndarray
    fruit: np.ndarray


class FruitLine(MultiSceneEnv):
    name = 'fruit-line'
    n_actions = 3
    obs_dim = LOOKAHEAD * LANES * 2 + LANES + 1
    max_steps = ROWS
    obstacle_labels = ('barrier', 'fruit', 'open')

    def generate_level(self, seed):
        rng = np.random.default_rng(seed)
        total = ROWS + LOOKAHEAD + 1
        barriers = np.zeros((total, LANES), dtype=bool)
        fruit = np.zeros((total, LANES), dtype=bool)
        for row in range(2, total):
            density = 0.08 + 0.32 * min(row, ROWS) / ROWS
            if rng.random() < density:
                # a double barrier only after a clear row, so a path always exists
                double = not barriers[row - 1].any() and rng.random() < 0.25
                lanes = rng.permutation(LANES)[:2] if double else [int(rng.integers(LANES))]
                barriers[row, lanes] = True
            if rng.random() < 0.35:
                free = np.flatnonzero(~barriers[row])
                fruit[row, int(rng.choice(free))] = True
        return FruitLevel(seed=int(seed), barriers=barriers, fruit=fruit)

    def _start(self, level):
        self.row = 0
        self.lane = 1

    def _advance(self, action):
        if action == UP:
            self.lane = max(self.lane - 1, 0)
        elif action == DOWN:
            self.lane = min(self.lane + 1, LANES - 1)
        self.row += 1
        if self.level.barriers[self.row, self.lane]:
            return 0.0, True
        return (1.0 if self.level.fruit[self.row, self.lane] else 0.0), False

    def observe(self):
        ahead = slice(self.row + 1, self.row + 1 + LOOKAHEAD)
        lanes = np.zeros(LANES)
        lanes[self.lane] = 1.0
        return np.concatenate([
            self.level.barriers[ahead].astype(np.float64).reshape(-1),
            self.level.fruit[ahead].astype(np.float64).reshape(-1),
            lanes,
            [self.t / self.max_steps],
        ])

    def cell(self):
        return self.row * LANES + self.lane

    def obstacle_label(self):
        for row in range(self.row + 1, self.row + 1 + LABEL_DEPTH):
            if self.level.barriers[row, self.lane]:
                return 'barrier'
            if self.level.fruit[row, self.lane]:
                return 'fruit'
        return 'open'
