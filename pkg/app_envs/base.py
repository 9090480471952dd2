"""
Common interface over a set of seeded MDPs.

Contains:
- StepResult: outcome of one environment step.
- EpisodeReturn: discounted and undiscounted totals of a finished episode.
- MultiSceneEnv: base class; subclasses generate a level from its seed and
  implement the level dynamics.

The agent only ever sees observation vectors. Level id, discrete cell and
obstacle label travel in StepResult.info for analysis code.
"""

# 1. Standard library
from dataclasses import dataclass, field

# 2. Third-party
import numpy as np

# 3. Local imports
from .exceptions import EmptyLevelSetError, EnvError, EpisodeDoneError, InvalidActionError


@dataclass(frozen=True)
class StepResult:
    """
    Attributes:
        next_state (np.ndarray): Observation after the action.
        reward (float): Reward for the transition.
        done (bool): Episode ended (terminal or step cap).
        info (dict): level_id, cell, obstacle_label, truncated. Analysis only.
    """
    next_state: np.ndarray
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EpisodeReturn:
    """
    Attributes:
        discounted (float): sum_t gamma^t r_t.
        total (float): Undiscounted reward sum.
        length (int): Number of steps T (>= 1).
        level_id (int): Seed of the level played.
    """
    discounted: float
    total: float
    length: int
    level_id: int

    @classmethod
    def from_rewards(cls, rewards, gamma, level_id):
        if not rewards:
            raise ValueError('an episode has at least one step')
        rewards = np.asarray(rewards, dtype=np.float64)
        discounts = gamma ** np.arange(len(rewards))
        return cls(discounted=float(np.dot(discounts, rewards)), total=float(rewards.sum()),
                   length=len(rewards), level_id=int(level_id))


class MultiSceneEnv:
    """
    One environment family played over a list of level seeds.

    reset() draws a level uniformly from `level_seeds` with the env's own rng
    (or plays a forced level). Levels are generated lazily and cached, so the
    same seed list always yields the same level set.

    Subclasses set `name`, `n_actions`, `obs_dim`, `max_steps`,
    `obstacle_labels` and implement:
        generate_level(seed) -> level object
        _start(level) -> None
        _advance(action) -> (reward, terminal)
        observe() -> np.ndarray
        cell() -> int
        obstacle_label() -> str
    """
    name = None
    n_actions = None
    obs_dim = None
    max_steps = None
    obstacle_labels = ()

    def __init__(self, level_seeds, rng=None, levels=None):
        self.level_seeds = [int(seed) for seed in level_seeds]
        if not self.level_seeds:
            raise EmptyLevelSetError(f'{self.name} needs at least one level seed')
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self._levels = dict(levels or {})
        self.level = None
        self.level_id = None
        self.t = 0
        self.done = True

    def get_level(self, seed):
        if seed not in self._levels:
            self._levels[seed] = self.generate_level(seed)
        return self._levels[seed]

    def reset(self, level_id=None):
        """
        Start an episode.

        Args:
            level_id (int | None): Force a level from the configured set;
                None samples one uniformly.

        Returns:
            tuple: (observation, level id). The id is for analysis only.
        """
        if level_id is None:
            level_id = self.level_seeds[int(self.rng.integers(len(self.level_seeds)))]
        elif level_id not in self.level_seeds:
            raise EnvError(f'level {level_id} is not part of this environment')
        self.level_id = int(level_id)
        self.level = self.get_level(self.level_id)
        self.t = 0
        self.done = False
        self._start(self.level)
        return self.observe(), self.level_id

    def step(self, action):
        if self.done:
            raise EpisodeDoneError('episode finished; call reset() first')
        if isinstance(action, (bool, np.bool_)) or not isinstance(action, (int, np.integer)) \
                or not 0 <= action < self.n_actions:
            raise InvalidActionError(f'action {action!r} not in [0, {self.n_actions})')
        reward, terminal = self._advance(int(action))
        self.t += 1
        truncated = not terminal and self.t >= self.max_steps
        self.done = terminal or truncated
        info = {
            'level_id': self.level_id,
            'cell': self.cell(),
            'obstacle_label': self.obstacle_label(),
            'truncated': truncated,
        }
        return StepResult(next_state=self.observe(), reward=float(reward), done=self.done, info=info)

    def generate_level(self, seed):
        raise NotImplementedError

    def _start(self, level):
        raise NotImplementedError

    def _advance(self, action):
        raise NotImplementedError

    def observe(self):
        raise NotImplementedError

    def cell(self):
        raise NotImplementedError

    def obstacle_label(self):
        raise NotImplementedError
