"""Model files: JSON text with format version, settings, scaler and
flattened parameters listed in declared order.

Layout (format_version 1)::

    {"format": "pmsense-recurrent-model", "format_version": 1,
     "kind": "lstm" | "rnn", "hidden": m, "input_dim": 1, "window": L,
     "gate_order": ["input", "forget", "candidate", "output"],   # lstm only
     "scaler": {"min": .., "max": ..},
     "train_config": {...},
     "param_order": ["w_x", ...],
     "params": {"w_x": {"shape": [..], "values": [row-major floats]}, ...}}

Floats are written with shortest round-trip repr, so save/load is exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import numpy as np

from .data import Scaler
from .network import LSTM_GATES, RecurrentRegressor

FORMAT = "pmsense-recurrent-model"
FORMAT_VERSION = 1


def dumps_model(model: RecurrentRegressor, scaler: Scaler, window: int, train_config: Optional[dict] = None) -> str:
    doc = {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "hidden": model.hidden,
        "input_dim": int(model.params["w_x"].shape[1]),
        "window": int(window),
        "scaler": {"min": scaler.min, "max": scaler.max},
        "train_config": train_config or {},
        "param_order": list(model.param_order),
        "params": {
            k: {"shape": list(v.shape), "values": [float(x) for x in v.reshape(-1)]}
            for k, v in model.params.items()
        },
    }
    if model.kind == "lstm":
        doc["gate_order"] = list(LSTM_GATES)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def loads_model(text: str) -> tuple[RecurrentRegressor, Scaler, dict]:
    """Inverse of :func:`dumps_model`; returns (model, scaler, header)."""
    doc = json.loads(text)
    if doc.get("format") != FORMAT:
        raise ValueError("not a pmsense model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {doc.get('format_version')}")
    params = {}
    for name in doc["param_order"]:
        entry = doc["params"][name]
        params[name] = np.array(entry["values"], dtype=np.float64).reshape(entry["shape"])
    model = RecurrentRegressor(doc["kind"], int(doc["hidden"]), params)
    scaler = Scaler(float(doc["scaler"]["min"]), float(doc["scaler"]["max"]))
    header = {k: doc[k] for k in ("kind", "hidden", "input_dim", "window", "train_config")}
    return model, scaler, header


def save_model(path, model, scaler, window, train_config=None) -> None:
    Path(path).write_text(dumps_model(model, scaler, window, train_config), encoding="utf-8")


def load_model(path):
    return loads_model(Path(path).read_text(encoding="utf-8"))
