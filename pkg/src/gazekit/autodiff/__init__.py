"""Minimal reverse-mode automatic differentiation over dense arrays."""

from gazekit.autodiff.check import finite_difference_check
from gazekit.autodiff.tensor import (
    FAST_DTYPE,
    REFERENCE_DTYPE,
    Tensor,
    backward,
    constant,
    dtype_for_mode,
    grads_for,
    parameter,
    zero_grad,
)

__all__ = [
    "FAST_DTYPE",
    "REFERENCE_DTYPE",
    "Tensor",
    "backward",
    "constant",
    "dtype_for_mode",
    "finite_difference_check",
    "grads_for",
    "parameter",
    "zero_grad",
]
