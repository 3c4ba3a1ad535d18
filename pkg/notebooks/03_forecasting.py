"""Train a small LSTM on synthetic hourly data and compare with persistence.

Run: python3 notebooks/03_forecasting.py   (a few seconds)
"""

from pmsense.analytics import resample
from pmsense.correction import correct_series
from pmsense.forecast import TrainConfig, chronological_split, evaluate, train
from pmsense.synth import SiteProfile, generate

records = generate(SiteProfile(noise_std=5, dry_multiplier=1.5, seed=3), "2023-01-01", "2023-07-01")
hourly = resample(correct_series(records), "hour")

cfg = TrainConfig(kind="lstm", hidden=16, epochs=15, seed=0)
train_ds, test_ds, scaler = chronological_split(hourly, cfg.window, cfg.split)
print(f"{len(train_ds)} training windows, {len(test_ds)} test windows")

model, history = train(train_ds, cfg)
for epoch in range(0, len(history), 3):
    print(f"epoch {epoch + 1:3d}  loss {history[epoch]:.5f}")

rep = evaluate(model, test_ds, scaler).report
print(f"\nLSTM         rmse {rep.rmse:.3f}  mae {rep.mae:.3f}  r2 {rep.r2:.3f}")
print(f"persistence  rmse {rep.baseline_rmse:.3f}  mae {rep.baseline_mae:.3f}")
