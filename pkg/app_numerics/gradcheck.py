"""
Central finite-difference oracle for tape gradients.

check_gradients(fn, params) evaluates fn() under a tape for the analytic
gradients and perturbs every parameter entry by +/-h for the numeric ones.
Checks run in 64-bit precision.
"""

# 1. Standard library
from dataclasses import dataclass

# 2. Third-party
import numpy as np

# 3. Local imports
from .tensor import Tape


@dataclass
class GradCheckResult:
    max_rel_error: float
    analytic: list
    numeric: list
    rtol: float

    @property
    def passed(self):
        return self.max_rel_error <= self.rtol


def numerical_gradient(fn, params, h=1e-5):
    grads = []
    for param in params:
        grad = np.zeros_like(param.data)
        flat = param.data.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            plus = fn().item()
            flat[i] = original - h
            minus = fn().item()
            flat[i] = original
            grad.reshape(-1)[i] = (plus - minus) / (2.0 * h)
        grads.append(grad)
    return grads


def relative_error(analytic, numeric, floor=1e-6):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / denom


def check_gradients(fn, params, h=1e-5, rtol=1e-4, floor=1e-6):
    """
    Compare tape gradients of the scalar fn() against central differences.

    Args:
        fn: Zero-argument callable rebuilding the computation from `params`.
        params (list[Tensor]): float64 parameters to differentiate.
        h (float): Finite-difference step.
        rtol (float): Elementwise relative tolerance for `passed`.
        floor (float): Denominator floor so that both-near-zero entries pass.

    Raises:
        TypeError: a parameter is not float64.
    """
    for param in params:
        if param.dtype != np.float64:
            raise TypeError('gradient checks need float64 parameters')
    with Tape() as tape:
        out = fn()
    analytic = [g.copy() for g in tape.gradient(out, params)]
    numeric = numerical_gradient(fn, params, h=h)
    worst = max((float(relative_error(a, n, floor).max()) for a, n in zip(analytic, numeric) if a.size),
                default=0.0)
    return GradCheckResult(max_rel_error=worst, analytic=analytic, numeric=numeric, rtol=rtol)
