"""
Adam optimizer and gradient-norm clipping.

Contains:
- AdamState: moments, step counter and hyperparameters for one parameter list.
- adam_step: bias-corrected Adam update applied in place.
- clip_grad_norm: global L2 rescaling of a gradient list.
"""

# 1. Standard library
from dataclasses import dataclass, field

# 2. Third-party
import numpy as np

# 3. Local imports
from .exceptions import ShapeError


@dataclass
class AdamState:
    """
    Optimizer state for one parameter list.

    Attributes:
        lr (float): Learning rate.
        beta1, beta2 (float): Moment decay rates.
        eps (float): Denominator guard.
        step (int): Number of updates applied so far.
        m, v (list[np.ndarray]): First and second moments, one per parameter.
    """
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_parameters(cls, params, **hyper):
        state = cls(**hyper)
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
        return state

    def state_dict(self):
        arrays = {'adam.step': np.asarray(self.step), 'adam.lr': np.asarray(self.lr)}
        for i, (m, v) in enumerate(zip(self.m, self.v)):
            arrays[f'adam.m.{i}'] = m
            arrays[f'adam.v.{i}'] = v
        return arrays

    def load_state_dict(self, arrays):
        count = len(self.m)
        self.step = int(arrays['adam.step'])
        self.lr = float(arrays['adam.lr'])
        self.m = [np.array(arrays[f'adam.m.{i}']) for i in range(count)]
        self.v = [np.array(arrays[f'adam.v.{i}']) for i in range(count)]


def adam_step(state, params, grads):
    """
    Apply one Adam update to `params` (Tensors) in place and return them.

    Raises:
        ShapeError: list lengths or any parameter/gradient shape disagree.
    """
    if len(params) != len(grads):
        raise ShapeError(f'{len(params)} parameters but {len(grads)} gradients')
    if not state.m:
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
    if len(state.m) != len(params):
        raise ShapeError('optimizer state was built for a different parameter list')
    for param, grad, m in zip(params, grads, state.m):
        if param.shape != np.shape(grad) or m.shape != param.shape:
            raise ShapeError(f'parameter {param.shape} vs gradient {np.shape(grad)}')

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for param, grad, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        update = state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        param.data = (param.data - update).astype(param.dtype, copy=False)
    return params


def clip_grad_norm(grads, max_norm):
    """Rescale grads so their joint L2 norm is at most max_norm; returns (grads, norm)."""
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads)))
    if max_norm <= 0 or norm <= max_norm:
        return grads, norm
    scale = max_norm / (norm + 1e-12)
    return [g * scale for g in grads], norm
