"""``pmsense`` command line.

Exit codes: 0 success, 2 usage/config error, 3 data error (unreadable or
malformed input, empty store, too little contiguous data).

Config file (JSON)::

    {
      "out_dir": "out",
      "format": "csv",
      "sites": [{"label": "Mukaza", "inputs": ["mukaza.csv"], "schema": "schema.txt"}],
      "qc": {"max_pm25": 1000, "max_count": 1e6, "require_monotone_counts": true,
             "local_utc_offset_hours": 2},
      "correction": {"cf": 3, "density": 1.0, "diameter": "geometric",
                     "bounds": [[0.3, 0.5], [0.5, 1.0], [1.0, 2.5]]},
      "aggregation": {"hour_completeness": 0.75, "day_completeness": 0.75, "std_kind": "sample"},
      "train": {"window": 24, "hidden": 32, "epochs": 50, "batch_size": 32,
                "learning_rate": 0.001, "split": 0.8, "seed": 0, "kind": "lstm"},
      "guideline": 25.0
    }

Relative input paths resolve against the config file's directory. Flags
(--out-dir, --format, --seed) override the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .analytics import WHO_24H_GUIDELINE, AggConfig, correlation_matrix
from .correction import CorrectionParams
from .export import (
    correlation_rows,
    diurnal_rows,
    iso,
    seasonal_rows,
    series_rows,
    write_json,
    write_table,
)
from .forecast import TrainConfig, chronological_split, evaluate, save_model, train
from .ingest import DEFAULT_SCHEMA, QcConfig, SchemaError, load_schema, write_csv
from .pipeline import analyze_store, build_store, ingest_files, longest_contiguous_run, read_store, write_store
from .synth import SiteProfile, generate

log = logging.getLogger("pmsense")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class Site:
    label: str
    inputs: list[Path]
    schema: Optional[Path] = None


@dataclass
class RunConfig:
    sites: list[Site] = field(default_factory=list)
    correction: CorrectionParams = field(default_factory=CorrectionParams)
    qc: QcConfig = field(default_factory=QcConfig)
    aggregation: AggConfig = field(default_factory=AggConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    out_dir: Path = Path("out")
    format: str = "csv"
    guideline: float = WHO_24H_GUIDELINE

    def site(self, label: Optional[str]) -> list[Site]:
        if label is None:
            return self.sites
        for s in self.sites:
            if s.label == label:
                return [s]
        raise UsageError(f"no site labelled {label!r} in config")

    def site_dir(self, site: Site) -> Path:
        return self.out_dir / site.label


KNOWN_KEYS = {"sites", "correction", "qc", "aggregation", "train", "out_dir", "format", "guideline"}


def load_config(path: Optional[str], args: argparse.Namespace) -> RunConfig:
    doc, base = {}, Path.cwd()
    if path:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
        base = Path(path).resolve().parent
    unknown = set(doc) - KNOWN_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    try:
        sites = []
        for s in doc.get("sites", []):
            inputs = [base / p for p in s["inputs"]]
            if not s.get("label") or not inputs:
                raise UsageError("every site needs a label and at least one input path")
            sites.append(Site(s["label"], inputs, base / s["schema"] if s.get("schema") else None))
        train_d = dict(doc.get("train", {}))
        if args.seed is not None:
            train_d["seed"] = args.seed
        cfg = RunConfig(
            sites=sites,
            correction=CorrectionParams.from_dict(doc.get("correction", {})),
            qc=QcConfig(**doc.get("qc", {})),
            aggregation=AggConfig(**doc.get("aggregation", {})),
            train=TrainConfig.from_dict(train_d),
            out_dir=Path(args.out_dir) if args.out_dir else base / doc.get("out_dir", "out"),
            format=args.format or doc.get("format", "csv"),
            guideline=float(doc.get("guideline", WHO_24H_GUIDELINE)),
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise UsageError(f"invalid config: {exc}") from exc
    if cfg.format not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    return cfg


def _require_sites(cfg: RunConfig):
    if not cfg.sites:
        raise UsageError("config defines no sites")


def cmd_ingest(cfg: RunConfig, label: Optional[str]) -> int:
    _require_sites(cfg)
    for site in cfg.site(label):
        schema = dict(DEFAULT_SCHEMA)
        try:
            if site.schema:
                schema = load_schema(site.schema)
            records, report, errors = ingest_files(site.inputs, schema, cfg.qc)
        except OSError as exc:
            raise DataError(f"site {site.label}: cannot read input: {exc}") from exc
        except SchemaError as exc:
            raise DataError(f"site {site.label}: {exc}") from exc
        out = cfg.site_dir(site)
        write_store(out / "store.csv", build_store(records, cfg.correction))
        doc = report.to_dict()
        doc["site"] = site.label
        doc["row_errors"] = [{"line": e.line, "reason": e.reason, "detail": e.detail} for e in errors]
        write_json(out / "ingest_report.json", doc)
        log.info("%s: %d accepted, %d rejected", site.label, report.accepted, report.rejected)
    return EXIT_OK


def _load_store(cfg: RunConfig, site: Site):
    path = cfg.site_dir(site) / "store.csv"
    try:
        store = read_store(path)
    except OSError as exc:
        raise DataError(f"site {site.label}: no record store at {path}; run ingest first") from exc
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    if len(store) == 0:
        raise DataError(f"site {site.label}: record store is empty")
    return store


def cmd_analyze(cfg: RunConfig) -> int:
    _require_sites(cfg)
    fmt = cfg.format
    daily_by_site = {}
    for site in cfg.sites:
        a = analyze_store(_load_store(cfg, site), cfg.aggregation, cfg.guideline)
        out = cfg.site_dir(site)
        meta = {"site": site.label}
        write_table(out / "diurnal", "diurnal", diurnal_rows(a.diurnal), fmt, meta)
        write_table(out / "hourly", "hourly", series_rows(a.hourly), fmt, meta)
        write_table(out / "daily", "daily", series_rows(a.daily, "D"), fmt, meta)
        write_table(out / "monthly", "monthly", series_rows(a.monthly, "M"), fmt, meta)
        write_table(out / "seasonal", "seasonal", seasonal_rows(a.seasonal), fmt, meta)
        ex = a.exceedance
        write_json(out / "summary.json", {
            "schema": "summary",
            "schema_version": 1,
            "site": site.label,
            "annual_mean": a.annual_mean,
            "coverage": a.coverage,
            "exceedance": {"guideline": ex.guideline, "days_over": ex.days_over,
                           "days_total": ex.days_total, "fraction": ex.fraction},
            "cf1_vs_alt": None if a.comparison is None else a.comparison.to_dict(),
        })
        daily_by_site[site.label] = a.daily
    if len(daily_by_site) >= 2:
        cm = correlation_matrix(daily_by_site)
        undefined = [(a, b) for a, b, r, _ in correlation_rows(cm) if r != r]
        if undefined:
            log.warning("correlation undefined for %d site pair(s): %s", len(undefined) // 2,
                        ", ".join(f"{a}/{b}" for a, b in undefined if a < b))
        write_table(cfg.out_dir / "correlation", "correlation", correlation_rows(cm), fmt)
    else:
        log.warning("only one site: no correlation matrix written")
    return EXIT_OK


def cmd_forecast(cfg: RunConfig, label: Optional[str]) -> int:
    _require_sites(cfg)
    tc = cfg.train
    for site in cfg.site(label):
        a = analyze_store(_load_store(cfg, site), cfg.aggregation, cfg.guideline)
        need = tc.window + 2
        run = longest_contiguous_run(a.hourly)
        if run < need:
            raise DataError(
                f"site {site.label}: longest contiguous hourly run is {run} h; "
                f"forecasting needs at least {need} (window + 2)"
            )
        try:
            train_ds, test_ds, scaler = chronological_split(a.hourly, tc.window, tc.split)
        except ValueError as exc:
            raise DataError(f"site {site.label}: {exc}") from exc
        if len(train_ds) == 0 or len(test_ds) == 0:
            raise DataError(f"site {site.label}: split leaves an empty train or test set")
        model, history = train(train_ds, tc)
        ev = evaluate(model, test_ds, scaler)
        out = cfg.site_dir(site)
        save_model(out / "model.json", model, scaler, tc.window, tc.to_dict())
        report = ev.report.to_dict()
        report.update(schema="eval_report", schema_version=1, site=site.label, loss_history=history)
        write_json(out / "eval_report.json", report)
        rows = [[iso(t), o, p, b] for t, o, p, b in zip(
            test_ds.target_times, ev.observed.tolist(), ev.predicted.tolist(), ev.baseline.tolist())]
        write_table(out / "forecast", "forecast", rows, cfg.format, {"site": site.label})
        log.info("%s: rmse %.3f (persistence %.3f)", site.label, ev.report.rmse, ev.report.baseline_rmse)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        profile = SiteProfile(
            base_level=args.base_level,
            morning_peak_hour=args.morning_peak,
            evening_peak_hour=args.evening_peak,
            peak_amplitude=args.peak_amplitude,
            dry_multiplier=args.dry_multiplier,
            noise_std=args.noise_std,
            seed=args.seed if args.seed is not None else 0,
        )
        records = generate(profile, args.start, args.end)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(records, args.out)
    log.info("wrote %d records to %s", len(records), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out-dir", help="output directory (overrides config)")
    common.add_argument("--format", choices=("csv", "json"), help="table output format")
    common.add_argument("--seed", type=int, help="RNG seed (training / synthesis)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pmsense", description=__doc__.split("\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse, QC and correct raw sensor CSV")
    p.add_argument("--site", help="only this site label")
    sub.add_parser("analyze", parents=[common], help="diurnal/daily/seasonal/correlation outputs")
    p = sub.add_parser("forecast", parents=[common], help="train and evaluate a recurrent forecaster")
    p.add_argument("--site", help="only this site label")
    p = sub.add_parser("synth", parents=[common], help="write synthetic sensor CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--start", required=True, help="ISO date/time, UTC")
    p.add_argument("--end", required=True, help="ISO date/time, UTC (exclusive)")
    p.add_argument("--base-level", type=float, default=25.0)
    p.add_argument("--morning-peak", type=int, default=7)
    p.add_argument("--evening-peak", type=int, default=19)
    p.add_argument("--peak-amplitude", type=float, default=15.0)
    p.add_argument("--dry-multiplier", type=float, default=1.0)
    p.add_argument("--noise-std", type=float, default=0.0)
    sub.add_parser("version", parents=[common], help="print version")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "version":
            print(__version__)
            return EXIT_OK
        if args.command == "synth":
            return cmd_synth(args)
        cfg = load_config(args.config, args)
        if args.command == "ingest":
            return cmd_ingest(cfg, args.site)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        return cmd_forecast(cfg, args.site)
    except UsageError as exc:
        print(f"pmsense: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"pmsense: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
