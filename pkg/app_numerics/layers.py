"""
Layer primitives built on the tape engine.

Contains:
- Module: ordered container of named parameters and child modules.
- Affine: x @ W + b.
- LSTMCell: single-layer LSTM step with input, forget, cell and output gates.
- Activation lookup (`ACTIVATIONS`) used by network configuration.
"""

# 1. Third-party
import numpy as np

# 2. Local imports
from .exceptions import ShapeError
from .tensor import Tensor, relu, sigmoid, tanh


ACTIVATIONS = {
    'tanh': tanh,
    'relu': relu,
}


class Module:
    """
    Parameter container.

    Parameters and children keep registration order, so `parameters()` and
    `state_dict()` are stable across runs and processes.
    """

    def __init__(self):
        self._parameters = {}
        self._children = {}

    def add_parameter(self, name, array, dtype=np.float64):
        param = Tensor(np.array(array, dtype=dtype), requires_grad=True)
        self._parameters[name] = param
        return param

    def add_module(self, name, module):
        self._children[name] = module
        return module

    def named_parameters(self, prefix=''):
        for name, param in self._parameters.items():
            yield prefix + name, param
        for child_name, child in self._children.items():
            yield from child.named_parameters(prefix=f'{prefix}{child_name}.')

    def parameters(self):
        return [param for _, param in self.named_parameters()]

    def state_dict(self):
        return {name: param.data.copy() for name, param in self.named_parameters()}

    def load_state_dict(self, state):
        """
        Copy arrays into the existing parameters.

        Raises:
            ShapeError: a key is missing or unexpected, or a shape differs.
        """
        own = dict(self.named_parameters())
        if set(own) != set(state):
            missing = sorted(set(own) - set(state))
            extra = sorted(set(state) - set(own))
            raise ShapeError(f'state mismatch: missing={missing} unexpected={extra}')
        for name, param in own.items():
            value = np.asarray(state[name])
            if value.shape != param.shape:
                raise ShapeError(f'{name}: expected {param.shape}, got {value.shape}')
            param.data = value.astype(param.dtype, copy=True)


class Affine(Module):
    """
    Fully connected layer.

    Weights are drawn from N(0, (gain^2) / in_features); biases start at 0.
    """

    def __init__(self, in_features, out_features, rng, gain=1.0, dtype=np.float64):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        scale = gain / np.sqrt(in_features)
        self.weight = self.add_parameter('weight', rng.normal(0.0, scale, (in_features, out_features)), dtype)
        self.bias = self.add_parameter('bias', np.zeros(out_features), dtype)

    def __call__(self, x):
        if x.shape[-1] != self.in_features:
            raise ShapeError(f'affine expects {self.in_features} inputs, got {x.shape[-1]}')
        return x @ self.weight + self.bias


class LSTMCell(Module):
    """
    LSTM step.

    Gate layout in the fused weights is [input, forget, candidate, output]:
        i = sigmoid(z_i), f = sigmoid(z_f), g = tanh(z_g), o = sigmoid(z_o)
        c' = f * c + i * g
        h' = o * tanh(c')
    """

    def __init__(self, input_size, hidden_size, rng, dtype=np.float64):
        super().__init__()
        self.input_size = input_size
        self.hidden_size = hidden_size
        self.weight_x = self.add_parameter(
            'weight_x', rng.normal(0.0, 1.0 / np.sqrt(input_size), (input_size, 4 * hidden_size)), dtype)
        self.weight_h = self.add_parameter(
            'weight_h', rng.normal(0.0, 1.0 / np.sqrt(hidden_size), (hidden_size, 4 * hidden_size)), dtype)
        bias = np.zeros(4 * hidden_size)
        bias[hidden_size:2 * hidden_size] = 1.0
        self.bias = self.add_parameter('bias', bias, dtype)

    def __call__(self, x, state):
        h, c = state
        if x.shape[-1] != self.input_size:
            raise ShapeError(f'lstm expects input size {self.input_size}, got {x.shape[-1]}')
        if h.shape[-1] != self.hidden_size or c.shape[-1] != self.hidden_size:
            raise ShapeError(f'lstm expects hidden size {self.hidden_size}, got {h.shape[-1]}/{c.shape[-1]}')
        n = self.hidden_size
        z = x @ self.weight_x + h @ self.weight_h + self.bias
        i = sigmoid(z[..., :n])
        f = sigmoid(z[..., n:2 * n])
        g = tanh(z[..., 2 * n:3 * n])
        o = sigmoid(z[..., 3 * n:])
        c_next = f * c + i * g
        h_next = o * tanh(c_next)
        return h_next, c_next


def lstm_cell(cell, x, state):
    """Functional form of LSTMCell.__call__ accepting arrays or tensors."""
    def as_t(value):
        return value if isinstance(value, Tensor) else Tensor(np.asarray(value), dtype=cell.bias.dtype)

    h, c = state
    return cell(as_t(x), (as_t(h), as_t(c)))
