"""
Exception hierarchy for tensorproof

Errors that describe bad input values also derive from the matching builtin
(ValueError, ZeroDivisionError) so callers can catch them either way.
"""

from typing import Optional


class TensorProofError(Exception):
    """Base class for all tensorproof errors"""


class DivisionByZero(TensorProofError, ZeroDivisionError):
    """A field inversion hit zero"""

    def __init__(self, message: str = "division by zero", index: Optional[int] = None):
        if index is not None:
            message = f"{message} (index {index})"
        super().__init__(message)
        self.index = index


class ShapeError(TensorProofError, ValueError):
    """Operand shapes or point dimensions do not line up"""


class CapacityError(TensorProofError, ValueError):
    """Tensor does not fit the public parameters"""


class DecodeError(TensorProofError, ValueError):
    """Malformed bytes or documents"""


class NotInTable(TensorProofError, ValueError):
    """A looked-up value is missing from its table"""

    def __init__(self, index: int, value: int):
        super().__init__(f"value {value} at index {index} is not in the table")
        self.index = index
        self.value = value


class RangeError(TensorProofError, ValueError):
    """A witness value falls outside the domain its tables cover"""


class ParamError(TensorProofError, ValueError):
    """Protocol parameters cannot be realized"""


class ConfigError(TensorProofError, ValueError):
    """Invalid configuration"""


class ChallengeCollision(TensorProofError):
    """A challenge landed on a pole of the lookup identity"""


class BindingError(TensorProofError):
    """Prover-side tensors do not match their published commitment"""


class ProofRejected(TensorProofError):
    """Verification failed"""
