"""Finite-difference verification of reverse-mode gradients."""

import numpy as np

from gazekit.errors import NumericError
from gazekit.autodiff.tensor import backward, zero_grad


def finite_difference_check(builder, params: dict, h: float = 1e-4, n_coords=None, rng_seed: int = 0) -> float:
    """Compare analytic gradients with central finite differences.

    `builder` maps the parameter dict to a fresh scalar loss Tensor; it is
    re-invoked for every probe, so it must not cache graph state. Returns the
    max over probed coordinates of |g_ad - g_fd| / max(1, |g_ad|, |g_fd|).
    Only meaningful in 64-bit mode.
    """
    for name, p in params.items():
        if p.data.dtype != np.float64:
            raise NumericError(f"finite_difference_check: parameter {name!r} is not float64")

    zero_grad(params)
    loss = builder(params)
    backward(loss)
    analytic = {
        name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data))
        for name, p in params.items()
    }

    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for name, p in params.items():
        flat = p.data.reshape(-1)
        if n_coords is None or n_coords >= flat.size:
            coords = np.arange(flat.size)
        else:
            coords = rng.choice(flat.size, size=n_coords, replace=False)
        g_flat = analytic[name].reshape(-1)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + h
            f_plus = float(builder(params).data)
            flat[i] = orig - h
            f_minus = float(builder(params).data)
            flat[i] = orig
            g_fd = (f_plus - f_minus) / (2.0 * h)
            g_ad = float(g_flat[i])
            rel = abs(g_ad - g_fd) / max(1.0, abs(g_ad), abs(g_fd))
            worst = max(worst, rel)
    return worst
