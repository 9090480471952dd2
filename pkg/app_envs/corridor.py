"""
CorridorCoin: a seeded 1-D platformer strip.

The agent starts at cell 0 and must reach the coin at the far end (+10,
episode ends). Between them the level seed places hazards of three
archetypes, each asking for a different skill:

- pit:  walking in ends the episode with 0 reward; jump over it.
- wall: blocks walking; jump over it.
- saw:  alternates between active and idle every tick (phase from the seed);
        being on or flying over an active saw ends the episode.

Actions: 0 noop, 1 right, 2 jump (advance two cells), 3 left.
Episodes are capped at 200 steps.
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from .base import MultiSceneEnv


EMPTY, PIT, WALL, SAW = 0, 1, 2, 3
HAZARD_LABELS = {PIT: 'pit', WALL: 'wall', SAW: 'saw'}

NOOP, RIGHT, JUMP, LEFT = 0, 1, 2, 3

LENGTH = 32
COIN = LENGTH - 1
BEHIND = 1
AHEAD = 6
CHANNELS = 5
COIN_REWARD = 10.0


@dataclass(frozen=True)
class CorridorLevel:
    """
    Attributes:
        seed (int): Level seed.
        cells (tuple[int]): Hazard code per cell (EMPTY, PIT, WALL, SAW).
        phases (tuple[int]): Saw phase per cell (0 or 1); unused elsewhere.
    """
    seed: int
    cells: tuple
    phases: tuple


class CorridorCoin(MultiSceneEnv):
    name = 'corridor-coin'
    n_actions = 4
    obs_dim = (BEHIND + 1 + AHEAD) * CHANNELS + 2
    max_steps = 200
    obstacle_labels = ('pit', 'wall', 'saw', 'open')

    def generate_level(self, seed):
        rng = np.random.default_rng(seed)
        cells = [EMPTY] * LENGTH
        phases = [0] * LENGTH
        position = 3
        while True:
            # gaps of at least 2 keep a free landing cell behind every hazard
            position += int(rng.integers(2, 5))
            if position > LENGTH - 3:
                break
            cells[position] = 1 + int(rng.integers(3))
            phases[position] = int(rng.integers(2))
        return CorridorLevel(seed=int(seed), cells=tuple(cells), phases=tuple(phases))

    def _start(self, level):
        self.position = 0

    def _kind(self, cell):
        if cell < 0 or cell > COIN:
            return WALL
        return self.level.cells[cell]

    def saw_active(self, cell, t):
        return self._kind(cell) == SAW and (t + self.level.phases[cell]) % 2 == 0

    def _advance(self, action):
        now = self.t + 1
        position = self.position
        if action == RIGHT:
            target = position + 1
        elif action == LEFT:
            target = max(position - 1, 0)
        elif action == JUMP:
            over = position + 1
            if self.saw_active(over, now):
                return 0.0, True
            target = min(position + 2, COIN)
            if self._kind(target) == WALL:
                target = over
        else:
            target = position

        if self._kind(target) == WALL:
            target = position
        kind = self._kind(target)
        self.position = target
        if kind == PIT or self.saw_active(target, now):
            return 0.0, True
        if target == COIN:
            return COIN_REWARD, True
        return 0.0, False

    def observe(self):
        window = np.zeros((BEHIND + 1 + AHEAD, CHANNELS))
        upcoming = self.t + 1
        for row, cell in enumerate(range(self.position - BEHIND, self.position + AHEAD + 1)):
            kind = self._kind(cell)
            window[row, 0] = kind == PIT
            window[row, 1] = kind == WALL
            window[row, 2] = kind == SAW
            window[row, 3] = self.saw_active(cell, upcoming)
            window[row, 4] = cell == COIN
        status = [self.position / COIN, self.t / self.max_steps]
        return np.concatenate([window.reshape(-1), status])

    def cell(self):
        return self.position

    def obstacle_label(self):
        for cell in range(self.position + 1, min(self.position + AHEAD, COIN) + 1):
            kind = self.level.cells[cell]
            if kind != EMPTY:
                return HAZARD_LABELS[kind]
        return 'open'
