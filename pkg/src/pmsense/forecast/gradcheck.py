"""Central finite-difference check of the analytic BPTT gradients."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .network import RecurrentRegressor


def grad_check(
    model: RecurrentRegressor,
    X,
    y,
    epsilon: float = 1e-5,
    grads: Optional[dict] = None,
    floor: float = 1e-8,
) -> float:
    """Worst relative error between analytic and numerical partials.

    Every scalar parameter is perturbed by ``+-epsilon``. ``grads`` replaces
    the analytic gradient (useful for checking that a planted bug is caught).
    The relative error is ``|a - n| / max(|a|, |n|, floor)``.
    """
    probe = model.copy()
    if grads is None:
        _, grads = probe.loss_and_grads(X, y)
    worst = 0.0
    for name, theta in probe.params.items():
        flat = theta.reshape(-1)
        analytic = np.asarray(grads[name], dtype=np.float64).reshape(-1)
        for k in range(flat.size):
            saved = flat[k]
            flat[k] = saved + epsilon
            up = probe.loss(X, y)
            flat[k] = saved - epsilon
            down = probe.loss(X, y)
            flat[k] = saved
            numeric = (up - down) / (2 * epsilon)
            denom = max(abs(analytic[k]), abs(numeric), floor)
            worst = max(worst, abs(analytic[k] - numeric) / denom)
    return worst
