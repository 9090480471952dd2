"""
Held-out evaluation of a network.

Episode i plays level `level_seeds[i % len(level_seeds)]` with action and
environment streams derived from (seed, stream, i), so results do not depend
on how many episodes ran before.
"""

# 1. Standard library
from dataclasses import dataclass, field

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.metrics import confusion
from app_envs.base import EpisodeReturn
from app_envs.registry import make_env, spawn_rng


EVAL_STREAM = 0x6576616c


@dataclass
class StepRecord:
    """State the agent acted in (cell, label, observation) and what it did there."""
    step: int
    action: int
    reward: float
    alpha: np.ndarray
    delta: float
    cell: int
    obstacle_label: str
    obs: np.ndarray

    def as_dump(self, episode, level_id):
        return {
            'episode': episode,
            'level_id': level_id,
            'step': self.step,
            'action': self.action,
            'reward': self.reward,
            'alpha': [float(a) for a in self.alpha],
            'delta': self.delta,
            'cell': self.cell,
            'obstacle_label': self.obstacle_label,
        }


@dataclass
class EpisodeRecord:
    """
    Attributes:
        episode (int): Index within the evaluation.
        level_id (int): Level played.
        total_reward (float): Undiscounted return.
        discounted_return (float): sum_t gamma^t r_t.
        length (int): Steps taken.
        cells (list[int]): Start cell then the cell after every step, for revisit counts.
        deltas (np.ndarray): Confusion at every step.
        steps (list[StepRecord]): Filled only for recorded episodes.
    """
    episode: int
    level_id: int
    total_reward: float
    discounted_return: float
    length: int
    cells: list
    deltas: np.ndarray
    steps: list = field(default_factory=list)

    @property
    def mean_delta(self):
        return float(self.deltas.mean())


@dataclass
class EvalSummary:
    mean_reward: float
    mean_episode_length: float
    mean_delta: float
    mean_inverse_delta: float
    episodes: int

    @classmethod
    def from_records(cls, records):
        if not records:
            raise ValueError('an evaluation needs at least one episode')
        deltas = np.concatenate([r.deltas for r in records])
        return cls(
            mean_reward=float(np.mean([r.total_reward for r in records])),
            mean_episode_length=float(np.mean([r.length for r in records])),
            mean_delta=float(deltas.mean()),
            mean_inverse_delta=float((1.0 / deltas).mean()),
            episodes=len(records),
        )


def run_episode(net, env, level_id, action_rng, gamma, episode=0, record=False):
    obs, level_id = env.reset(level_id=level_id)
    state = net.initial_state(1)
    rewards, deltas, steps = [], [], []
    cells = [int(env.cell())]
    done = False
    while not done:
        label = env.obstacle_label()
        result = net.act(obs[None], state, action_rng)
        action = int(result.actions[0])
        outcome = env.step(action)
        delta = confusion(result.alpha[0])
        rewards.append(outcome.reward)
        cells.append(int(outcome.info['cell']))
        deltas.append(delta)
        if record:
            steps.append(StepRecord(step=len(rewards) - 1, action=action, reward=outcome.reward,
                                    alpha=result.alpha[0].copy(), delta=delta, cell=cells[-2],
                                    obstacle_label=label, obs=obs.copy()))
        obs, state, done = outcome.next_state, result.state, outcome.done
    summary = EpisodeReturn.from_rewards(rewards, gamma, level_id)
    return EpisodeRecord(episode=episode, level_id=level_id, total_reward=summary.total,
                         discounted_return=summary.discounted, length=summary.length,
                         cells=cells, deltas=np.asarray(deltas), steps=steps)


def evaluate(net, config, level_seeds, episodes, seed=None, record_episodes=0):
    """
    Play `episodes` episodes round-robin over `level_seeds`.

    Args:
        net (PolicyValueNet): Network to evaluate; not modified.
        config (TrainConfig): Supplies the environment family and gamma.
        level_seeds (list[int]): Levels to play.
        episodes (int): Number of episodes (>= 1).
        seed (int | None): Stream seed; defaults to the config seed.
        record_episodes (int): Keep per-step records for the first this many episodes.

    Raises:
        ValueError: episodes < 1.
    """
    if episodes < 1:
        raise ValueError('an evaluation needs at least one episode')
    seed = config.seed if seed is None else seed
    level_seeds = list(level_seeds)
    env = make_env(config.env.name, level_seeds, **config.env_options())
    records = []
    for i in range(episodes):
        env.rng = spawn_rng(seed, EVAL_STREAM, i, 0)
        records.append(run_episode(net, env, level_seeds[i % len(level_seeds)], spawn_rng(seed, EVAL_STREAM, i, 1),
                                   config.ppo.gamma, episode=i, record=i < record_episodes))
    return records
