"""
Parallel rollout collection.

Each RolloutWorker owns one environment, its own rng stream and the episode
in progress; the episode and recurrent state carry over between updates.
collect_rollouts runs the workers on a thread pool, each with a frozen copy
of the network, and merges their results in worker-id order.
"""

# 1. Standard library
import logging
from concurrent.futures import ThreadPoolExecutor

# 2. Local imports
from app_envs.registry import make_env, spawn_rng

from .buffer import EpisodeSummary, RolloutBuffer
from .exceptions import RolloutError


logger = logging.getLogger(__name__)

ENV_STREAM = 0
ACTION_STREAM = 1


class RolloutWorker:
    """
    Attributes:
        worker_id (int): Position of this worker's rows in the buffer.
        env (MultiSceneEnv): Environment over the full training level set.
        rng (np.random.Generator): Action sampling stream.
    """

    def __init__(self, worker_id, env, rng):
        self.worker_id = worker_id
        self.env = env
        self.rng = rng
        self.obs = None
        self.state = None
        self.start = True
        self.episode_reward = 0.0
        self.episode_length = 0

    @classmethod
    def for_config(cls, worker_id, config, generation=0):
        """Worker whose streams derive from (seed, worker id, generation); resumed runs bump generation."""
        env = make_env(config.env.name, config.env.seeds(),
                       rng=spawn_rng(config.seed, worker_id, generation, ENV_STREAM), **config.env_options())
        return cls(worker_id, env, spawn_rng(config.seed, worker_id, generation, ACTION_STREAM))

    def _begin_episode(self, net):
        self.obs, _ = self.env.reset()
        h, c = net.initial_state(1)
        self.state = (h[0], c[0])
        self.start = True
        self.episode_reward = 0.0
        self.episode_length = 0

    def collect(self, net, steps, buffer):
        """Fill row `worker_id` of `buffer` with `steps` steps; returns finished episodes."""
        w = self.worker_id
        finished = []
        if self.obs is None:
            self._begin_episode(net)
        for t in range(steps):
            h, c = self.state
            buffer.obs[w, t] = self.obs
            buffer.starts[w, t] = self.start
            buffer.h[w, t] = h
            buffer.c[w, t] = c
            result = net.act(self.obs[None], (h[None], c[None]), self.rng)
            action = int(result.actions[0])
            step = self.env.step(action)

            buffer.actions[w, t] = action
            buffer.logp[w, t] = result.logp[0]
            buffer.rewards[w, t] = step.reward
            buffer.dones[w, t] = step.done
            buffer.alpha[w, t] = result.alpha[0]
            buffer.means[w, t] = result.means[0]
            buffer.values[w, t] = result.value[0]
            buffer.level_ids[w, t] = step.info['level_id']

            self.episode_reward += step.reward
            self.episode_length += 1
            if step.done:
                finished.append(EpisodeSummary(w, step.info['level_id'], self.episode_reward, self.episode_length))
                self._begin_episode(net)
            else:
                self.obs = step.next_state
                self.state = (result.state[0][0], result.state[1][0])
                self.start = False

        if buffer.dones[w, -1]:
            buffer.bootstrap[w] = 0.0
        else:
            h, c = self.state
            buffer.bootstrap[w] = net.value(self.obs[None], (h[None], c[None]))[0]
        return finished


def collect_rollouts(net, workers, segment_length):
    """
    Collect `segment_length` steps from every worker.

    Returns:
        RolloutBuffer: (len(workers), segment_length) arrays plus finished episodes.

    Raises:
        RolloutError: a worker failed; the first failure by worker id is raised.
    """
    buffer = RolloutBuffer.allocate(len(workers), segment_length, net.obs_dim, net.n_clusters, net.hidden)
    with ThreadPoolExecutor(max_workers=len(workers), thread_name_prefix='rollout') as pool:
        futures = [pool.submit(worker.collect, net.clone(), segment_length, buffer) for worker in workers]
        results = []
        for worker, future in zip(workers, futures):
            try:
                results.append(future.result())
            except RolloutError:
                raise
            except Exception as exc:
                logger.error('rollout worker %d failed: %s', worker.worker_id, exc)
                raise RolloutError(worker.worker_id, str(exc)) from exc
    for finished in results:
        buffer.episodes.extend(finished)
    return buffer


def build_workers(config, generation=0):
    return [RolloutWorker.for_config(w, config, generation) for w in range(config.ppo.workers)]

