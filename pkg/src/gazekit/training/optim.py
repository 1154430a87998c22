"""Adam with bias correction and optional decoupled weight decay."""

from dataclasses import dataclass, field

import numpy as np

from gazekit.errors import ShapeError


@dataclass
class OptimState:
    """First/second moment estimates plus hyperparameters."""

    m: dict
    v: dict
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    decoupled: bool = True


def init_optim_state(params: dict, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0, decoupled=True) -> OptimState:
    return OptimState(
        m={k: np.zeros_like(p.data) for k, p in params.items()},
        v={k: np.zeros_like(p.data) for k, p in params.items()},
        step=0,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
        weight_decay=weight_decay,
        decoupled=decoupled,
    )


def adam_step(params: dict, grads: dict, state: OptimState, lr: float) -> OptimState:
    """One in-place Adam update.

    Decoupled decay shrinks parameters by lr * wd before the moment-based
    update; coupled mode adds wd * p to the gradient instead.
    """
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.data.shape:
            raise ShapeError(f"adam_step: gradient shape {g.shape} != parameter {name!r} shape {p.data.shape}")
        if state.weight_decay != 0.0:
            if state.decoupled:
                p.data = p.data - lr * state.weight_decay * p.data
            else:
                g = g + state.weight_decay * p.data
        m = state.m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        v = state.v[name] = state.beta2 * state.v[name] + (1.0 - state.beta2) * (g * g)
        p.data = p.data - lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return state


def clip_grad_norm(grads: dict, max_norm: float) -> float:
    """Scale all gradients in place so their global L2 norm is at most
    max_norm; returns the pre-clip norm."""
    total = float(np.sqrt(sum(float(np.sum(g.astype(np.float64) ** 2)) for g in grads.values())))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        for name in grads:
            grads[name] = grads[name] * scale
    return total
