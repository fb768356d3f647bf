"""Small deterministic 1-D search helpers shared across modules."""

import numpy as np

__all__ = ["golden_min", "golden_max"]

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, a, b, iters=60):
    """Golden-section minimization of ``f`` on [a, b].

    Returns (x_best, f_best). Deterministic; assumes a single local minimum in
    the bracket (callers bracket candidates beforehand).
    """
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def golden_max(f, a, b, iters=60):
    """Golden-section maximization; see ``golden_min``."""
    x, fneg = golden_min(lambda t: -f(t), a, b, iters=iters)
    return x, -fneg
