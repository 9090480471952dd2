"""
Dense tensors with reverse-mode gradients recorded on a tape.

Provides:
- Tensor: ndarray wrapper with an optional gradient slot.
- Tape: context manager recording every primitive executed while it is
  active, and replaying them in reverse for backward().
- Primitive operations: add, sub, mul, div, power, matmul, exp, log, tanh,
  sigmoid, relu, softmax, log_softmax, sum, mean, maximum, minimum, clip,
  concat, reshape, take_along, plus indexing through Tensor.__getitem__.

Operations executed while no tape is active only compute values. Rollout
workers run their frozen policy copies this way.

Example:
    w = Tensor(np.ones(3), requires_grad=True)
    with Tape() as tape:
        loss = (w * w).sum()
    grads = tape.gradient(loss, [w])
"""

# 1. Standard library
import threading

# 2. Third-party
import numpy as np

# 3. Local imports
from .exceptions import NonFiniteError, ShapeError, TapeError


_local = threading.local()


def active_tape():
    """Return the innermost tape active on this thread, or None."""
    stack = getattr(_local, 'stack', None)
    return stack[-1] if stack else None


class Tensor:
    """
    A float array that can take part in recorded computations.

    Attributes:
        data (np.ndarray): Values, float64 unless created from a float32 array.
        grad (np.ndarray | None): Gradient filled in by Tape.backward.
        requires_grad (bool): Whether operations on this tensor are recorded.
    """
    __slots__ = ('data', 'grad', 'requires_grad')
    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, dtype=None):
        if isinstance(data, Tensor):
            data = data.data
        if dtype is None:
            is_float = isinstance(data, np.ndarray) and data.dtype in (np.float32, np.float64)
            dtype = data.dtype if is_float else np.float64
        self.data = np.asarray(data, dtype=dtype)
        self.grad = None
        self.requires_grad = requires_grad

    def __repr__(self):
        return f'Tensor(shape={self.shape}, requires_grad={self.requires_grad})'

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self):
        if self.data.size != 1:
            raise ShapeError(f'item() needs a single element, got shape {self.shape}')
        return float(self.data.reshape(-1)[0])

    def numpy(self):
        return self.data

    def detach(self):
        """Same values, cut off from the tape."""
        return Tensor(self.data, dtype=self.data.dtype)

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)

    def sum(self, axis=None, keepdims=False):
        return tensor_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)


class _Record:
    __slots__ = ('out', 'inputs', 'backward')

    def __init__(self, out, inputs, backward):
        self.out = out
        self.inputs = inputs
        self.backward = backward


class Tape:
    """
    Ordered record of primitive operations.

    Use as a context manager; every operation that touches a tensor with
    requires_grad=True while the tape is active is appended to `records`.
    backward() visits each record exactly once, newest first.
    """

    def __init__(self):
        self.records = []

    def __enter__(self):
        stack = getattr(_local, 'stack', None)
        if stack is None:
            stack = _local.stack = []
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _local.stack.pop()
        return False

    def __len__(self):
        return len(self.records)

    def record(self, out, inputs, backward):
        self.records.append(_Record(out, inputs, backward))

    def backward(self, output):
        """
        Accumulate d(output)/d(x) into x.grad for every recorded tensor.

        Raises:
            TapeError: nothing has been recorded yet.
            ShapeError: output is not a scalar.
            NonFiniteError: output is NaN or infinite.
        """
        if not self.records:
            raise TapeError('backward called before any operation was recorded')
        if output.size != 1:
            raise ShapeError(f'backward needs a scalar output, got shape {output.shape}')
        if not np.all(np.isfinite(output.data)):
            raise NonFiniteError('backward called on a non-finite output')

        for rec in self.records:
            rec.out.grad = None
            for tensor in rec.inputs:
                tensor.grad = None
        if not output.requires_grad:
            return
        output.grad = np.ones_like(output.data)

        for rec in reversed(self.records):
            upstream = rec.out.grad
            if upstream is None:
                continue
            for tensor, grad in zip(rec.inputs, rec.backward(upstream)):
                if grad is None or not tensor.requires_grad:
                    continue
                grad = _unbroadcast(np.asarray(grad, dtype=tensor.dtype), tensor.shape)
                tensor.grad = grad if tensor.grad is None else tensor.grad + grad

    def gradient(self, output, params):
        """Run backward and return one gradient array per parameter (zeros if unreached)."""
        for param in params:
            param.grad = None
        self.backward(output)
        return [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]


def _unbroadcast(grad, shape):
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def as_tensor(value, dtype=None):
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value), dtype=dtype)


def _make(data, inputs, backward):
    data = np.asarray(data)
    tape = active_tape()
    needs_grad = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=needs_grad, dtype=data.dtype if data.dtype.kind == 'f' else np.float64)
    if needs_grad:
        tape.record(out, inputs, backward)
    return out


def _pair(a, b):
    if isinstance(a, Tensor):
        return a, as_tensor(b, dtype=a.dtype)
    b = as_tensor(b)
    return as_tensor(a, dtype=b.dtype), b


# Elementwise arithmetic

def add(a, b):
    a, b = _pair(a, b)
    return _make(a.data + b.data, (a, b), lambda g: (g, g))


def sub(a, b):
    a, b = _pair(a, b)
    return _make(a.data - b.data, (a, b), lambda g: (g, -g))


def mul(a, b):
    a, b = _pair(a, b)
    return _make(a.data * b.data, (a, b), lambda g: (g * b.data, g * a.data))


def div(a, b):
    a, b = _pair(a, b)
    return _make(a.data / b.data, (a, b),
                 lambda g: (g / b.data, -g * a.data / (b.data * b.data)))


def power(a, exponent):
    exponent = float(exponent)
    return _make(a.data ** exponent, (a,),
                 lambda g: (g * exponent * a.data ** (exponent - 1.0),))


def square(a):
    return _make(a.data * a.data, (a,), lambda g: (2.0 * g * a.data,))


def exp(a):
    out = np.exp(a.data)
    return _make(out, (a,), lambda g: (g * out,))


def log(a):
    return _make(np.log(a.data), (a,), lambda g: (g / a.data,))


def tanh(a):
    out = np.tanh(a.data)
    return _make(out, (a,), lambda g: (g * (1.0 - out * out),))


def sigmoid(a):
    out = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return _make(out, (a,), lambda g: (g * out * (1.0 - out),))


def relu(a):
    mask = a.data > 0
    return _make(a.data * mask, (a,), lambda g: (g * mask,))


def maximum(a, b):
    a, b = _pair(a, b)
    pick_a = a.data >= b.data
    return _make(np.where(pick_a, a.data, b.data), (a, b),
                 lambda g: (g * pick_a, g * ~pick_a))


def minimum(a, b):
    a, b = _pair(a, b)
    pick_a = a.data <= b.data
    return _make(np.where(pick_a, a.data, b.data), (a, b),
                 lambda g: (g * pick_a, g * ~pick_a))


def clip(a, low, high):
    inside = (a.data >= low) & (a.data <= high)
    return _make(np.clip(a.data, low, high), (a,), lambda g: (g * inside,))


# Linear algebra

def matmul(a, b):
    """Matrix product for 1-D or 2-D left operands and 2-D right operands."""
    a, b = _pair(a, b)
    if b.ndim != 2 or a.ndim not in (1, 2) or a.shape[-1] != b.shape[0]:
        raise ShapeError(f'cannot multiply {a.shape} by {b.shape}')

    def backward(g):
        g2 = np.atleast_2d(g)
        a2 = np.atleast_2d(a.data)
        return (g2 @ b.data.T).reshape(a.shape), a2.T @ g2

    return _make(a.data @ b.data, (a, b), backward)


# Reductions and shape plumbing

def tensor_sum(a, axis=None, keepdims=False):
    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape),)

    return _make(np.asarray(a.data.sum(axis=axis, keepdims=keepdims)), (a,), backward)


def mean(a, axis=None, keepdims=False):
    count = a.data.size if axis is None else a.data.shape[axis]
    return tensor_sum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


def reshape(a, shape):
    return _make(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),))


def _is_basic_index(index):
    parts = index if isinstance(index, tuple) else (index,)
    return all(isinstance(p, (slice, int, type(Ellipsis), type(None))) for p in parts)


def getitem(a, index):
    basic = _is_basic_index(index)

    def backward(g):
        full = np.zeros_like(a.data)
        if basic:
            full[index] = g
        else:
            np.add.at(full, index, g)
        return (full,)

    return _make(np.asarray(a.data[index]), (a,), backward)


def take_along(a, indices):
    """Pick a[i, indices[i]] for each row of a 2-D tensor."""
    indices = np.asarray(indices, dtype=np.int64)
    rows = np.arange(a.shape[0])

    def backward(g):
        full = np.zeros_like(a.data)
        np.add.at(full, (rows, indices), g)
        return (full,)

    return _make(a.data[rows, indices], (a,), backward)


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]
    return _make(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors),
                 lambda g: tuple(np.split(g, splits, axis=axis)))


# Probability maps

def _check_finite(a, what):
    if not np.all(np.isfinite(a.data)):
        raise NonFiniteError(f'{what} received non-finite input')


def softmax(a, axis=-1):
    """Max-shifted softmax; rows lie on the probability simplex."""
    a = as_tensor(a)
    _check_finite(a, 'softmax')
    shifted = np.exp(a.data - a.data.max(axis=axis, keepdims=True))
    out = shifted / shifted.sum(axis=axis, keepdims=True)
    return _make(out, (a,),
                 lambda g: (out * (g - (g * out).sum(axis=axis, keepdims=True)),))


def log_softmax(a, axis=-1):
    a = as_tensor(a)
    _check_finite(a, 'log_softmax')
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    probs = np.exp(out)
    return _make(out, (a,), lambda g: (g - probs * g.sum(axis=axis, keepdims=True),))
