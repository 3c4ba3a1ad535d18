"""Seeded mini-batch training with Adam and global-norm clipping."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .data import Scaler, WindowDataset
from .metrics import coefficient_of_determination, mae, r_squared, rmse
from .network import RecurrentRegressor, init_params

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch}: loss={loss}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    window: int = 24
    horizon: int = 1
    hidden: int = 32
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 1e-3
    split: float = 0.8
    seed: int = 0
    kind: str = "lstm"
    clip_norm: float = 5.0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        for name in ("window", "horizon", "hidden", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0 or self.clip_norm <= 0:
            raise ValueError("learning_rate and clip_norm must be positive")
        if not 0 < self.split < 1:
            raise ValueError("split must lie in (0, 1)")
        if self.horizon != 1:
            raise ValueError("only horizon 1 is supported")
        if self.kind not in ("rnn", "lstm"):
            raise ValueError("kind must be 'rnn' or 'lstm'")

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown train keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


class Adam:
    def __init__(self, params: dict, lr: float, beta1: float, beta2: float, eps: float):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            params[k] -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


def clip_global_norm(grads: dict, max_norm: float) -> float:
    norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


def train(ds: WindowDataset, cfg: TrainConfig = TrainConfig()) -> tuple[RecurrentRegressor, list[float]]:
    """Fit a recurrent regressor by minimising MSE with full BPTT.

    One ``numpy.random.Generator`` seeded from ``cfg.seed`` drives both the
    initial weights and the per-epoch shuffles, so identical (seed, data,
    config) give bit-identical loss histories. Returns the model and the
    mean training loss of each epoch.
    """
    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    rng = np.random.default_rng(cfg.seed)
    model = RecurrentRegressor(cfg.kind, cfg.hidden, init_params(cfg.kind, cfg.hidden, rng))
    opt = Adam(model.params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps)
    X, y = ds.inputs, ds.targets
    n = len(y)
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            # overflow is reported as TrainingDiverged below, not as a warning
            with np.errstate(over="ignore", invalid="ignore"):
                loss, grads = model.loss_and_grads(X[idx], y[idx])
            if not math.isfinite(loss):
                raise TrainingDiverged(epoch, loss)
            clip_global_norm(grads, cfg.clip_norm)
            opt.step(model.params, grads)
            total += loss * len(idx)
        epoch_loss = total / n
        if not math.isfinite(epoch_loss):
            raise TrainingDiverged(epoch, epoch_loss)
        history.append(epoch_loss)
        log.debug("epoch %d loss %.6g", epoch, epoch_loss)
    return model, history


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    mae: float
    r2: Optional[float]
    baseline_rmse: float
    n_test: int
    baseline_mae: float = math.nan
    r2_determination: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Evaluation:
    report: EvalReport
    observed: np.ndarray
    predicted: np.ndarray
    baseline: np.ndarray


def evaluate(model, test: WindowDataset, scaler: Scaler) -> Evaluation:
    """Score ``model`` on ``test`` in physical units against persistence.

    ``model`` needs only a ``predict(inputs) -> scaled predictions`` method.
    The persistence forecast is the last input of each window.
    """
    if len(test) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    observed = scaler.invert(test.targets)
    predicted = scaler.invert(model.predict(test.inputs))
    baseline = scaler.invert(test.inputs[:, -1])
    report = EvalReport(
        rmse=rmse(observed, predicted),
        mae=mae(observed, predicted),
        r2=r_squared(observed, predicted),
        baseline_rmse=rmse(observed, baseline),
        n_test=len(test),
        baseline_mae=mae(observed, baseline),
        r2_determination=coefficient_of_determination(observed, predicted),
    )
    return Evaluation(report, observed, predicted, baseline)
