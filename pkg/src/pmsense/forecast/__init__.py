"""Recurrent one-step PM2.5 forecasting."""

from .data import Scaler, WindowDataset, chronological_split, make_windows, scaler_fit
from .gradcheck import grad_check
from .metrics import coefficient_of_determination, mae, r_squared, rmse
from .network import RecurrentRegressor, init_params, lstm_cell, lstm_gates, rnn_cell, sigmoid
from .serialize import dumps_model, load_model, loads_model, save_model
from .training import (
    Adam,
    EvalReport,
    Evaluation,
    TrainConfig,
    TrainingDiverged,
    clip_global_norm,
    evaluate,
    train,
)

__all__ = [
    "Adam", "EvalReport", "Evaluation", "RecurrentRegressor", "Scaler", "TrainConfig",
    "TrainingDiverged", "WindowDataset", "chronological_split", "clip_global_norm",
    "coefficient_of_determination", "dumps_model", "evaluate", "grad_check", "init_params",
    "load_model", "loads_model", "lstm_cell", "lstm_gates", "mae", "make_windows",
    "r_squared", "rmse", "rnn_cell", "save_model", "scaler_fit", "sigmoid", "train",
]
