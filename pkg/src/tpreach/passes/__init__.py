"""Semantics-preserving lowerings: push-copy, pop-integer-free, fractional."""

from tpreach.passes.push_copy import PushCopyResult, pass_a
from tpreach.passes.pop_integer_free import PopIntegerFreeResult, pass_b
from tpreach.passes.diagonal_free import DiagonalFreeResult, pass_c0
from tpreach.passes.fractional import FractionalResult, pass_c

__all__ = [
    "pass_a", "PushCopyResult",
    "pass_b", "PopIntegerFreeResult",
    "pass_c0", "DiagonalFreeResult",
    "pass_c", "FractionalResult",
]
