"""Reverse-mode autodiff over dense numpy arrays.

A Tensor wraps an ndarray plus the closure that propagates its output
gradient back to its inputs. Calling backward() on a scalar loss walks the
recorded applications in reverse topological order, so gradient accumulation
order is deterministic for identical graphs.

Reference mode computes in float64 (all gradient checks require it); fast
mode uses float32 for training throughput.
"""

import numpy as np

from gazekit.errors import ShapeError

REFERENCE_DTYPE = np.float64
FAST_DTYPE = np.float32


def dtype_for_mode(mode: str):
    if mode == "reference":
        return REFERENCE_DTYPE
    if mode == "fast":
        return FAST_DTYPE
    raise ValueError(f"unknown precision mode {mode!r}; expected 'reference' or 'fast'")


class Tensor:
    """A node in the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "op_name", "_inputs", "_vjp")

    def __init__(self, data, requires_grad=False, op_name="leaf", _inputs=(), _vjp=None):
        arr = np.asarray(data)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(REFERENCE_DTYPE)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self.op_name = op_name
        self._inputs = _inputs
        self._vjp = _vjp

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        if self.data.shape != ():
            raise ShapeError(f"item: tensor is not scalar, shape {self.data.shape}")
        return float(self.data)

    def __repr__(self):
        return f"Tensor(op={self.op_name}, shape={self.data.shape}, requires_grad={self.requires_grad})"


def constant(data, dtype=None) -> Tensor:
    """A leaf tensor that never receives a gradient."""
    arr = np.asarray(data, dtype=dtype) if dtype is not None else np.asarray(data)
    return Tensor(arr, requires_grad=False)


def parameter(data, dtype=None) -> Tensor:
    arr = np.asarray(data, dtype=dtype) if dtype is not None else np.asarray(data)
    return Tensor(arr, requires_grad=True)


def accumulate_grad(t: Tensor, g: np.ndarray):
    """Add g into t.grad (used by op vjp closures)."""
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = g if g.flags.owndata else g.copy()
    else:
        t.grad = t.grad + g


def topo_order(loss: Tensor):
    """Iterative post-order over the graph feeding `loss`."""
    order = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for inp in node._inputs:
            if id(inp) not in seen:
                stack.append((inp, False))
    return order


def backward(loss: Tensor):
    """Populate .grad on every tensor that requires grad and feeds `loss`.

    Gradients accumulate, so clear them (zero_grad) between steps.
    """
    if loss.data.shape != ():
        raise ShapeError(f"backward: loss must be scalar, got shape {loss.data.shape}")
    order = topo_order(loss)
    loss.grad = np.ones((), dtype=loss.data.dtype)
    for node in reversed(order):
        if node._vjp is not None and node.grad is not None:
            node._vjp(node.grad)
    return loss


def zero_grad(params):
    values = params.values() if isinstance(params, dict) else params
    for p in values:
        p.grad = None


def grads_for(loss: Tensor, params: dict) -> dict:
    """Backward pass returning a gradient per named parameter; parameters the
    loss never touched get an explicit zero gradient."""
    backward(loss)
    return {
        name: (p.grad if p.grad is not None else np.zeros_like(p.data))
        for name, p in params.items()
    }
