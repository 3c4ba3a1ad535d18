"""Compare backprop gradients with central finite differences.

Run: python3 notebooks/04_gradient_check.py
"""

import numpy as np

from pmsense.forecast import RecurrentRegressor, grad_check

rng = np.random.default_rng(0)
X = rng.uniform(size=(3, 6))
y = rng.uniform(size=3)

for kind in ("rnn", "lstm"):
    model = RecurrentRegressor(kind, hidden=4, seed=1)
    for eps in (1e-3, 1e-5, 1e-7):
        print(f"{kind:4s} eps={eps:.0e}  max relative error {grad_check(model, X, y, epsilon=eps):.2e}")
