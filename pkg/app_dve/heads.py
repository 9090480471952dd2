"""
Clustered critic head.

The assignment subnetwork maps the recurrent latent to N_b logits and a
softmax gives alpha. The mean subnetwork maps its input (the same latent
unless another one is given) to N_b cluster means. The value estimate is
sum_i alpha_i * mean_i.
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from app_numerics.layers import Affine, Module
from app_numerics.tensor import Tensor, softmax


@dataclass
class ClusterOutput:
    alpha: Tensor
    means: Tensor
    value: Tensor
    alpha_cc: Tensor


class ClusterHead(Module):
    """
    Attributes:
        n_clusters (int): N_b.
        assign (Affine): latent -> N_b logits.
        means (Affine): mean input -> N_b cluster means.
    """

    def __init__(self, latent_size, n_clusters, rng, mean_input_size=None, assign_gain=0.1, dtype=np.float64):
        super().__init__()
        self.n_clusters = n_clusters
        self.assign = self.add_module('assign', Affine(latent_size, n_clusters, rng, gain=assign_gain, dtype=dtype))
        self.means = self.add_module(
            'means', Affine(mean_input_size or latent_size, n_clusters, rng, dtype=dtype))

    def __call__(self, latent, mean_input=None, detach_for_cc=False):
        """
        Args:
            latent (Tensor): (..., latent_size) input of the assignment subnetwork.
            mean_input (Tensor | None): input of the mean subnetwork; defaults to latent.
            detach_for_cc (bool): compute `alpha_cc` from a detached latent so the
                sparsity loss only trains the assignment subnetwork.
        """
        alpha = softmax(self.assign(latent))
        means = self.means(latent if mean_input is None else mean_input)
        value = (alpha * means).sum(axis=-1)
        alpha_cc = softmax(self.assign(latent.detach())) if detach_for_cc else alpha
        return ClusterOutput(alpha=alpha, means=means, value=value, alpha_cc=alpha_cc)
