"""
Recurrent actor-critic network.

observation -> Affine + tanh -> LSTMCell -> latent
latent -> policy logits (Affine)
latent -> ClusterHead (assignments alpha, cluster means, value)

rl2 runs the same network with a single cluster, so its value is the one
cluster mean.
"""

# 1. Standard library
import copy
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from app_dve.heads import ClusterHead
from app_envs.registry import spawn_rng
from app_numerics.layers import Affine, LSTMCell, Module
from app_numerics.tensor import Tensor, concat, log_softmax, softmax, tanh


@dataclass
class NetOutput:
    logits: Tensor
    alpha: Tensor
    means: Tensor
    value: Tensor
    alpha_cc: Tensor


@dataclass
class ActResult:
    """Arrays for one batched step taken outside any tape."""
    actions: np.ndarray
    logp: np.ndarray
    alpha: np.ndarray
    means: np.ndarray
    value: np.ndarray
    state: tuple


class PolicyValueNet(Module):
    """
    Attributes:
        obs_dim (int): Observation size.
        n_actions (int): Size of the discrete action space.
        hidden (int): Encoder width and LSTM size.
        n_clusters (int): N_b.
    """

    def __init__(self, obs_dim, n_actions, hidden, n_clusters, rng, dtype=np.float64):
        super().__init__()
        self.obs_dim = obs_dim
        self.n_actions = n_actions
        self.hidden = hidden
        self.n_clusters = n_clusters
        self.dtype = np.dtype(dtype)
        self.encoder = self.add_module('encoder', Affine(obs_dim, hidden, rng, dtype=dtype))
        self.lstm = self.add_module('lstm', LSTMCell(hidden, hidden, rng, dtype=dtype))
        self.policy = self.add_module('policy', Affine(hidden, n_actions, rng, gain=0.01, dtype=dtype))
        self.critic = self.add_module('critic', ClusterHead(hidden, n_clusters, rng, dtype=dtype))

    @classmethod
    def from_config(cls, config, obs_dim, n_actions):
        """Network of a run; initial weights depend only on the master seed."""
        return cls(obs_dim, n_actions, config.net.hidden, config.dve.n_clusters,
                   spawn_rng(config.seed, 0x6e6574), dtype=config.dtype)

    def architecture(self):
        return {'obs_dim': self.obs_dim, 'n_actions': self.n_actions,
                'hidden': self.hidden, 'n_clusters': self.n_clusters}

    def initial_state(self, batch):
        zeros = np.zeros((batch, self.hidden), dtype=self.dtype)
        return zeros, zeros.copy()

    def _as_input(self, value):
        return value if isinstance(value, Tensor) else Tensor(np.asarray(value), dtype=self.dtype)

    def _heads(self, latent, detach_for_cc):
        critic = self.critic(latent, detach_for_cc=detach_for_cc)
        return NetOutput(logits=self.policy(latent), alpha=critic.alpha, means=critic.means,
                         value=critic.value, alpha_cc=critic.alpha_cc)

    def forward(self, obs, state, detach_for_cc=False):
        """One step for a batch: (B, obs_dim) observations and (h, c) of shape (B, hidden)."""
        h, c = state
        x = tanh(self.encoder(self._as_input(obs)))
        h, c = self.lstm(x, (self._as_input(h), self._as_input(c)))
        return self._heads(h, detach_for_cc), (h, c)

    def act(self, obs, state, rng):
        """
        Sample one action per row. Meant for rollout and evaluation code that
        runs with no tape active.
        """
        out, (h, c) = self.forward(obs, state)
        probs = softmax(out.logits).data
        log_probs = log_softmax(out.logits).data
        draws = rng.random(probs.shape[0])
        cumulative = np.cumsum(probs, axis=-1)
        actions = np.minimum((cumulative < draws[:, None] * cumulative[:, -1:]).sum(axis=-1), self.n_actions - 1)
        return ActResult(
            actions=actions.astype(np.int64),
            logp=log_probs[np.arange(actions.size), actions],
            alpha=out.alpha.data,
            means=out.means.data,
            value=out.value.data,
            state=(h.data, c.data),
        )

    def value(self, obs, state):
        out, _ = self.forward(obs, state)
        return out.value.data

    def unroll(self, obs, starts, h0, c0, detach_for_cc=False):
        """
        Replay (L, B) chunks of recorded observations.

        The recurrent state is zeroed before every step flagged in `starts`,
        matching the reset the rollout worker performed. Outputs have L * B
        rows in t-major order (row t * B + b).

        Args:
            obs (np.ndarray): (L, B, obs_dim) observations.
            starts (np.ndarray): (L, B) episode-start flags.
            h0, c0 (np.ndarray): (B, hidden) state before the first step.
        """
        obs = np.asarray(obs, dtype=self.dtype)
        keep = 1.0 - np.asarray(starts, dtype=self.dtype)[..., None]
        h, c = self._as_input(h0), self._as_input(c0)
        latents = []
        for t in range(obs.shape[0]):
            h, c = h * keep[t], c * keep[t]
            x = tanh(self.encoder(self._as_input(obs[t])))
            h, c = self.lstm(x, (h, c))
            latents.append(h)
        return self._heads(concat(latents, axis=0), detach_for_cc)

    def clone(self):
        """Independent copy with the same weights, for a rollout worker."""
        return copy.deepcopy(self)
