"""
Exceptions raised by the tensor engine.

Contains:
- ShapeError: operands or parameters have incompatible shapes.
- NonFiniteError: a value that must be finite is NaN or infinite.
- TapeError: the tape is used out of order (e.g. backward before forward).
"""


class ShapeError(ValueError):
    """Operand shapes do not match what the operation requires."""


class NonFiniteError(ValueError):
    """Input or result contains NaN or infinity."""


class TapeError(RuntimeError):
    """Reverse pass requested on a tape that cannot serve it."""
