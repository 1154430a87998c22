"""Differentiable primitives.

Shape discipline is strict: elementwise ops take equal shapes, except that
add/mul also accept a trailing-dimension vector (bias form). matmul takes two
matrices or two stacks of matrices with identical leading dimensions. No
other implicit broadcasting.
"""

import numpy as np

from gazekit.errors import ShapeError
from gazekit.autodiff.tensor import Tensor, accumulate_grad

_GELU_C = np.sqrt(2.0 / np.pi)
_GELU_A = 0.044715


def _result(data, op_name, inputs, vjp):
    req = any(t.requires_grad for t in inputs)
    return Tensor(data, requires_grad=req, op_name=op_name, _inputs=tuple(inputs), _vjp=vjp if req else None)


def _bias_form(a: Tensor, b: Tensor, op: str) -> bool:
    if a.shape == b.shape:
        return False
    if b.data.ndim == 1 and a.data.ndim >= 1 and a.shape[-1] == b.shape[0]:
        return True
    raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not conform")


def _reduce_to_bias(g: np.ndarray, n: int) -> np.ndarray:
    return g.reshape(-1, n).sum(axis=0)


def add(a: Tensor, b: Tensor) -> Tensor:
    bias = _bias_form(a, b, "add")
    out_data = a.data + b.data

    def vjp(g):
        accumulate_grad(a, g)
        accumulate_grad(b, _reduce_to_bias(g, b.shape[0]) if bias else g)

    return _result(out_data, "add", (a, b), vjp)


def mul(a: Tensor, b: Tensor) -> Tensor:
    bias = _bias_form(a, b, "mul")
    out_data = a.data * b.data

    def vjp(g):
        accumulate_grad(a, g * b.data)
        gb = g * a.data
        accumulate_grad(b, _reduce_to_bias(gb, b.shape[0]) if bias else gb)

    return _result(out_data, "mul", (a, b), vjp)


def scalar_mul(a: Tensor, s: float) -> Tensor:
    s = float(s)

    def vjp(g):
        accumulate_grad(a, g * s)

    return _result(a.data * s, "scalar_mul", (a,), vjp)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    ad, bd = a.data, b.data
    if ad.ndim < 2 or bd.ndim < 2:
        raise ShapeError(f"matmul: operands must be at least 2-D, got {a.shape} @ {b.shape}")
    if ad.shape[-1] != bd.shape[-2] or ad.shape[:-2] != bd.shape[:-2]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape} do not conform")

    def vjp(g):
        accumulate_grad(a, g @ bd.swapaxes(-1, -2))
        accumulate_grad(b, ad.swapaxes(-1, -2) @ g)

    return _result(ad @ bd, "matmul", (a, b), vjp)


def gelu(x: Tensor) -> Tensor:
    xd = x.data
    inner = _GELU_C * (xd + _GELU_A * xd**3)
    th = np.tanh(inner)
    out = 0.5 * xd * (1.0 + th)

    def vjp(g):
        dinner = _GELU_C * (1.0 + 3.0 * _GELU_A * xd**2)
        accumulate_grad(x, g * (0.5 * (1.0 + th) + 0.5 * xd * (1.0 - th**2) * dinner))

    return _result(out, "gelu", (x,), vjp)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    if not -x.data.ndim <= axis < x.data.ndim:
        raise ShapeError(f"softmax: axis {axis} invalid for shape {x.shape}")
    shifted = x.data - np.max(x.data, axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / np.sum(e, axis=axis, keepdims=True)

    def vjp(g):
        dot = np.sum(g * y, axis=axis, keepdims=True)
        accumulate_grad(x, y * (g - dot))

    return _result(y, "softmax", (x,), vjp)


def layer_norm(x: Tensor, axis: int = -1, eps: float = 1e-6) -> Tensor:
    if not -x.data.ndim <= axis < x.data.ndim:
        raise ShapeError(f"layer_norm: axis {axis} invalid for shape {x.shape}")
    mu = np.mean(x.data, axis=axis, keepdims=True)
    var = np.mean((x.data - mu) ** 2, axis=axis, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    y = (x.data - mu) * inv

    def vjp(g):
        gm = np.mean(g, axis=axis, keepdims=True)
        gy = np.mean(g * y, axis=axis, keepdims=True)
        accumulate_grad(x, inv * (g - gm - y * gy))

    return _result(y, "layer_norm", (x,), vjp)


def reshape(x: Tensor, shape) -> Tensor:
    shape = tuple(shape)
    old = x.data.shape

    def vjp(g):
        accumulate_grad(x, g.reshape(old))

    try:
        out = x.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(f"reshape: cannot reshape {old} to {shape}") from exc
    return _result(out, "reshape", (x,), vjp)


def transpose(x: Tensor, axes=None) -> Tensor:
    if axes is None:
        axes = tuple(reversed(range(x.data.ndim)))
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def vjp(g):
        accumulate_grad(x, g.transpose(inverse))

    return _result(x.data.transpose(axes), "transpose", (x,), vjp)


def slice_rows(x: Tensor, start: int, stop: int) -> Tensor:
    if not 0 <= start <= stop <= x.shape[0]:
        raise ShapeError(f"slice_rows: [{start}:{stop}] out of range for shape {x.shape}")

    def vjp(g):
        full = np.zeros_like(x.data)
        full[start:stop] = g
        accumulate_grad(x, full)

    return _result(x.data[start:stop].copy(), "slice_rows", (x,), vjp)


def gather_rows(x: Tensor, indices) -> Tensor:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1:
        raise ShapeError(f"gather_rows: indices must be 1-D, got shape {idx.shape}")
    if np.any(idx < 0) or np.any(idx >= x.shape[0]):
        raise ShapeError(f"gather_rows: index out of range for {x.shape[0]} rows")

    def vjp(g):
        full = np.zeros_like(x.data)
        np.add.at(full, idx, g)
        accumulate_grad(x, full)

    return _result(x.data[idx].copy(), "gather_rows", (x,), vjp)


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat: empty input list")
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def vjp(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(lo, hi)
            accumulate_grad(t, g[tuple(sl)])

    out = np.concatenate([t.data for t in tensors], axis=axis)
    return _result(out, "concat", tuple(tensors), vjp)


def mean(x: Tensor, axis=None) -> Tensor:
    n = x.data.size if axis is None else x.data.shape[axis]

    def vjp(g):
        if axis is None:
            accumulate_grad(x, np.full_like(x.data, 1.0 / n) * g)
        else:
            accumulate_grad(x, np.expand_dims(g, axis) * np.full_like(x.data, 1.0 / n))

    return _result(np.mean(x.data, axis=axis), "mean", (x,), vjp)


def sum(x: Tensor, axis=None) -> Tensor:  # noqa: A001 - mirrors the numpy name
    def vjp(g):
        if axis is None:
            accumulate_grad(x, np.broadcast_to(g, x.data.shape).astype(x.data.dtype, copy=True))
        else:
            accumulate_grad(x, np.broadcast_to(np.expand_dims(g, axis), x.data.shape).copy())

    return _result(np.sum(x.data, axis=axis), "sum", (x,), vjp)


def square(x: Tensor) -> Tensor:
    def vjp(g):
        accumulate_grad(x, g * (2.0 * x.data))

    return _result(x.data**2, "square", (x,), vjp)


def abs_val(x: Tensor) -> Tensor:
    """Elementwise |x|; subgradient sign(x) (zero at x = 0)."""

    def vjp(g):
        accumulate_grad(x, g * np.sign(x.data))

    return _result(np.abs(x.data), "abs_val", (x,), vjp)
