"""Command-line front end for reproducible batch runs.

Subcommands cover the whole pipeline::

    stationfill synth         --config cfg.json --out run   # seeded synthetic CSVs
    stationfill qc            --config cfg.json --out run   # clean + QC reports
    stationfill build-dataset --config cfg.json --out run   # design matrix export
    stationfill train         --config cfg.json --out run   # model artifacts + metrics
    stationfill evaluate      --config cfg.json --out run   # mask-grid RMSE reports
    stationfill impute        --config cfg.json --out run   # fill target gaps

Every command is a single process, reads a JSON config, never mutates its
inputs, and writes its resolved configuration beside its outputs so a run can
be replayed exactly. Exit codes are fixed for scripting: 0 success, 2 config
or CSV parse failure, 3 missing/empty/dirty data, 4 artifact schema mismatch,
5 model failure (missing/incompatible artifact, or no kind trained).

Relative paths inside the config are taken as-is (relative to the working
directory); artifact defaults all live under the --out directory, so chaining
the subcommands with the same --out needs no path plumbing at all.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import evalbench, synthnet
from .errors import (
    CsvFormatError,
    SchemaMismatch,
    SingularSystem,
    StationFillError,
)
from .features import (
    LAGS,
    N_LAG,
    MaskPolicy,
    SplitSpec,
    assemble_rows,
    build_dataset,
    extract_test_periods,
    feature_names,
    split_validation,
    suggest_test_periods,
)
from .models import RegressorKind, TrainConfig, load_model, save_model, train
from .qc import QcRuleSet, apply_qc_network, missing_probabilities
from .timeseries import (
    SENTINEL,
    HourStamp,
    Parameter,
    StationNetwork,
    _format_value,
    align_network,
    is_sentinel,
    load_station_csvs,
    write_station_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DATA = 3
EXIT_SCHEMA = 4
EXIT_MODEL = 5

_ALL_KINDS = tuple(k.value for k in RegressorKind)
_LAG_HORIZON = max(LAGS)


class ConfigError(ValueError):
    """The config file is unreadable or contains invalid settings."""


# ---------------------------------------------------------------------------
# Config plumbing
# ---------------------------------------------------------------------------

_TOP_KEYS = {"parameter", "stations", "qc", "split", "train", "gap", "synth", "impute", "out", "seed"}
_STATION_KEYS = {"target", "inputs", "files"}
_QC_KEYS = {"range_min", "range_max", "max_step", "flatline_len", "flatline_exempt_value"}
_SPLIT_KEYS = {"test_periods", "suggest_len_hours", "validation_fraction", "rng_seed"}
_TRAIN_KEYS = {"kinds", "rng_seed", "mask_policy", "linear", "tree", "ensemble", "neural", "gp", "svr"}
_GAP_KEYS = {"gap_hours", "placement", "rng_seed"}
_SYNTH_KEYS = {
    "years", "seed", "start", "corrupt",
    "base_level", "annual_amplitude", "diurnal_amplitude",
    "shared_ar1_rho", "shared_noise_std", "station_noise_std",
    "station_offsets", "nonlinear_coupling_strength",
    "anomaly_rate", "spike_rate", "stuck_rate",
    "gap_mean_hours", "stuck_run_hours", "spike_magnitude",
}
_IMPUTE_KEYS = {"model", "files"}


def _check_keys(section: dict, allowed: set[str], where: str) -> dict:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(unknown)}")
    return section


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return _check_keys(cfg, _TOP_KEYS, "config")


def _section(cfg: dict, name: str, allowed: set[str]) -> dict:
    sec = cfg.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    return _check_keys(sec, allowed, name)


def _parameter(cfg: dict) -> Parameter:
    try:
        return Parameter.from_string(str(cfg.get("parameter", "T")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_run(args: argparse.Namespace) -> tuple[dict, Path, int]:
    cfg = _load_config(args.config)
    out = Path(args.out if args.out is not None else cfg.get("out", "run"))
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    return cfg, out, seed


def _write_json(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_resolved(out: Path, command: str, cfg: dict, seed: int) -> None:
    _write_json(out / "resolved_config.json", {"command": command, "seed": seed, "out": str(out), "config": cfg})


def _station_section(cfg: dict) -> dict:
    return _section(cfg, "stations", _STATION_KEYS)


def _input_files(cfg: dict, out: Path, default_subdir: str, override: list | None = None) -> list[Path]:
    files = override if override is not None else _station_section(cfg).get("files")
    if files is not None:
        if not isinstance(files, list) or not files:
            raise ConfigError("stations.files must be a non-empty list of paths")
        return [Path(f) for f in files]
    found = sorted((out / default_subdir).glob("*.csv"))
    if not found:
        raise StationFillError(
            f"no station CSVs: {out / default_subdir} is empty and the config names no files"
        )
    return found


def _load_network(cfg: dict, out: Path, default_subdir: str, files: list | None = None) -> StationNetwork:
    parameter = _parameter(cfg)
    series = load_station_csvs(_input_files(cfg, out, default_subdir, files), parameter)
    st = _station_section(cfg)
    target_id = str(st.get("target", "S0"))
    if target_id not in series:
        raise StationFillError(f"target station {target_id!r} not present in the input files")
    input_ids = st.get("inputs")
    if input_ids is None:
        input_ids = sorted(sid for sid in series if sid != target_id)
    missing = [sid for sid in input_ids if sid not in series]
    if missing:
        raise StationFillError(f"input station(s) not present in the input files: {missing}")
    return align_network(series[target_id], [series[sid] for sid in input_ids])


def _qc_rules(cfg: dict, parameter: Parameter) -> QcRuleSet:
    overrides = _section(cfg, "qc", _QC_KEYS)
    base = QcRuleSet.default_for(parameter)
    try:
        return dataclasses.replace(base, **overrides) if overrides else base
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid qc settings: {exc}") from exc


def _split_section(cfg: dict) -> dict:
    return _section(cfg, "split", _SPLIT_KEYS)


def _split_spec(cfg: dict, ds, seed: int) -> SplitSpec:
    sec = _split_section(cfg)
    raw_periods = sec.get("test_periods")
    if raw_periods is not None:
        try:
            periods = tuple(
                (HourStamp.parse(str(a)), HourStamp.parse(str(b))) for a, b in raw_periods
            )
        except (TypeError, ValueError, StationFillError) as exc:
            raise ConfigError(f"invalid split.test_periods: {exc}") from exc
    else:
        periods = tuple(suggest_test_periods(ds, int(sec.get("suggest_len_hours", 168))))
    try:
        return SplitSpec(
            test_periods=periods,
            validation_fraction=float(sec.get("validation_fraction", 0.15)),
            rng_seed=int(sec.get("rng_seed", seed)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid split settings: {exc}") from exc


def _train_setup(cfg: dict, seed: int) -> tuple[list[RegressorKind], TrainConfig]:
    sec = dict(_section(cfg, "train", _TRAIN_KEYS))
    raw_kinds = sec.pop("kinds", list(_ALL_KINDS))
    try:
        kinds = [RegressorKind(str(k).upper()) for k in raw_kinds]
    except ValueError as exc:
        raise ConfigError(f"invalid train.kinds (choose from {', '.join(_ALL_KINDS)}): {exc}") from exc
    if len(set(kinds)) != len(kinds):
        raise ConfigError("train.kinds contains duplicates")
    sec.setdefault("rng_seed", seed)
    try:
        return kinds, TrainConfig.from_dict(sec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid train settings: {exc}") from exc


def _gap_spec(cfg: dict, seed: int) -> evalbench.GapSpec:
    sec = _section(cfg, "gap", _GAP_KEYS)
    try:
        return evalbench.GapSpec(
            gap_hours=int(sec.get("gap_hours", 24)),
            placement=evalbench.GapPlacement(str(sec.get("placement", "full_period"))),
            rng_seed=int(sec.get("rng_seed", seed)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid gap settings: {exc}") from exc


def _synth_config(cfg: dict, seed: int) -> tuple[synthnet.SynthConfig, bool]:
    sec = dict(_section(cfg, "synth", _SYNTH_KEYS))
    do_corrupt = bool(sec.pop("corrupt", True))
    sec.setdefault("seed", seed)
    if "start" in sec:
        try:
            sec["start"] = HourStamp.parse(str(sec["start"]))
        except StationFillError as exc:
            raise ConfigError(f"invalid synth.start: {exc}") from exc
    if "station_offsets" in sec and sec["station_offsets"] is not None:
        sec["station_offsets"] = tuple(float(v) for v in sec["station_offsets"])
    try:
        return synthnet.SynthConfig.for_parameter(_parameter(cfg), **sec), do_corrupt
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid synth settings: {exc}") from exc


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    cfg, out, seed = _resolve_run(args)
    sc, do_corrupt = _synth_config(cfg, seed)
    network, truth = synthnet.generate_network(sc)
    ledger = synthnet.InjectionLedger(events=[])
    if do_corrupt:
        network, ledger = synthnet.corrupt(network, sc)

    data_dir = out / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    for sid in (network.target_id, *network.input_ids):
        write_station_csv(network.series[sid], data_dir / f"{sid}.csv")
    write_station_csv(truth, out / "truth.csv")
    _write_json(
        out / "injection_ledger.json",
        {
            "counts": {kind: ledger.count(kind) for kind in ("gap", "spike", "stuck")},
            "events": [dataclasses.asdict(ev) for ev in ledger.events],
        },
    )
    _write_resolved(out, "synth", cfg, seed)
    logger.info(
        "synth: wrote %d station CSVs (%d hours each) to %s",
        1 + len(network.input_ids), network.n_hours, data_dir,
    )
    return EXIT_OK


def cmd_qc(args: argparse.Namespace) -> int:
    cfg, out, seed = _resolve_run(args)
    network = _load_network(cfg, out, "data")
    rules = _qc_rules(cfg, network.parameter)
    cleaned, reports = apply_qc_network(network, rules)

    cleaned_dir = out / "cleaned"
    cleaned_dir.mkdir(parents=True, exist_ok=True)
    for sid in (cleaned.target_id, *cleaned.input_ids):
        write_station_csv(cleaned.series[sid], cleaned_dir / f"{sid}.csv")
    _write_json(
        out / "qc_report.json",
        {
            "parameter": network.parameter.value,
            "rules": {
                "range_min": rules.range_min,
                "range_max": rules.range_max,
                "max_step": rules.max_step,
                "flatline_len": rules.flatline_len,
                "flatline_exempt_value": rules.flatline_exempt_value,
            },
            "stations": [r.to_dict() for r in reports],
        },
    )
    missing_probabilities(cleaned).write_json(out / "missing_probabilities.json")
    _write_resolved(out, "qc", cfg, seed)
    flagged = sum(r.newly_flagged for r in reports)
    logger.info("qc: flagged %d readings across %d stations", flagged, len(reports))
    return EXIT_OK


def cmd_build_dataset(args: argparse.Namespace) -> int:
    cfg, out, seed = _resolve_run(args)
    network = _load_network(cfg, out, "cleaned")
    ds = build_dataset(network)
    out.mkdir(parents=True, exist_ok=True)
    ds.write_csv(out / "dataset.csv")
    _write_json(
        out / "dataset_meta.json",
        {
            "n_rows": ds.n_rows,
            "parameter": ds.parameter.value,
            "target_id": network.target_id,
            "station_ids": list(ds.station_ids),
            "first_hour": str(HourStamp.from_epoch_hours(int(ds.epoch_hours[0]))),
            "last_hour": str(HourStamp.from_epoch_hours(int(ds.epoch_hours[-1]))),
            "feature_names": feature_names(),
        },
    )
    _write_resolved(out, "build-dataset", cfg, seed)
    logger.info("build-dataset: %d rows -> %s", ds.n_rows, out / "dataset.csv")
    return EXIT_OK


def _prepared_splits(cfg: dict, out: Path, seed: int):
    network = _load_network(cfg, out, "cleaned")
    ds = build_dataset(network)
    spec = _split_spec(cfg, ds, seed)
    remainder, tests = extract_test_periods(ds, spec)
    fit, val = split_validation(remainder, spec)
    return network, ds, spec, tests, fit, val


def _model_path(out: Path, kind: RegressorKind) -> Path:
    return out / "models" / f"model_{kind.value.lower()}.json"


def cmd_train(args: argparse.Namespace) -> int:
    cfg, out, seed = _resolve_run(args)
    kinds, tc = _train_setup(cfg, seed)
    network, ds, spec, tests, fit, val = _prepared_splits(cfg, out, seed)

    results: dict[str, dict] = {}
    timings: dict[str, dict] = {}
    errors: dict[str, str] = {}
    for kind in kinds:
        try:
            model = train(kind, fit, val, tc)
        except StationFillError as exc:
            logger.error("train: %s failed: %s", kind.value, exc)
            errors[kind.value] = str(exc)
            continue
        save_model(model, _model_path(out, kind))
        results[kind.value] = {"mse": model.train_mse, "rmse": model.train_rmse}
        timings[kind.value] = {"throughput_ms_per_sample": model.throughput_ms_per_sample}
        logger.info(
            "train: %s rmse=%.4f %s (%.2f ms/sample)",
            kind.value, model.train_rmse, network.parameter.units, model.throughput_ms_per_sample,
        )

    # Wall-clock throughput lives in its own file so the metrics file is
    # byte-identical across reruns of the same seeded config.
    _write_json(
        out / "metrics.json",
        {
            "parameter": network.parameter.value,
            "mask_policy": tc.mask_policy.value,
            "rows": {
                "fit": fit.n_rows,
                "validation": val.n_rows,
                "test": [t.n_rows for t in tests],
            },
            "split": {
                "test_periods": [[str(a), str(b)] for a, b in spec.test_periods],
                "validation_fraction": spec.validation_fraction,
                "rng_seed": spec.rng_seed,
            },
            "models": results,
            "errors": errors,
        },
    )
    _write_json(out / "timings.json", {"models": timings})
    table = out / "training_table.csv"
    with open(table, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "mse", "rmse", "throughput_ms_per_sample"])
        for kind in kinds:
            if kind.value not in results:
                continue
            writer.writerow(
                [
                    kind.value,
                    repr(results[kind.value]["mse"]),
                    repr(results[kind.value]["rmse"]),
                    repr(timings[kind.value]["throughput_ms_per_sample"]),
                ]
            )
    _write_resolved(out, "train", cfg, seed)
    if not results:
        logger.error("train: every requested kind failed")
        return EXIT_MODEL
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg, out, seed = _resolve_run(args)
    kinds, _ = _train_setup(cfg, seed)
    network, ds, spec, tests, fit, val = _prepared_splits(cfg, out, seed)
    models = []
    for kind in kinds:
        path = _model_path(out, kind)
        if not path.exists():
            logger.warning("evaluate: no artifact for %s at %s, skipping", kind.value, path)
            continue
        models.append(load_model(path))
    if not models:
        raise StationFillError(f"no model artifacts under {out / 'models'}; run train first")
    report = evalbench.evaluate(models, tests, _gap_spec(cfg, seed))
    written = evalbench.render_report(report, out)
    _write_resolved(out, "evaluate", cfg, seed)
    logger.info("evaluate: %d models x %d periods -> %s", len(models), len(tests), written[0])
    return EXIT_OK


def cmd_impute(args: argparse.Namespace) -> int:
    cfg, out, seed = _resolve_run(args)
    sec = _section(cfg, "impute", _IMPUTE_KEYS)
    model_path = Path(sec.get("model", _model_path(out, RegressorKind.NN)))
    try:
        model = load_model(model_path)
    except (FileNotFoundError, SchemaMismatch) as exc:
        logger.error("impute: cannot load model: %s", exc)
        return EXIT_MODEL
    network = _load_network(cfg, out, "cleaned", files=sec.get("files"))
    try:
        if network.parameter is not model.parameter:
            raise SchemaMismatch(
                f"model was trained on {model.parameter.value}, data is {network.parameter.value}"
            )
        if set(network.input_ids) != set(model.station_order):
            raise SchemaMismatch(
                f"model expects input stations {list(model.station_order)}, got {list(network.input_ids)}"
            )
        if network.input_ids != model.station_order:
            network = align_network(
                network.target_series, [network.series[sid] for sid in model.station_order]
            )
    except SchemaMismatch as exc:
        logger.error("impute: model does not fit this network: %s", exc)
        return EXIT_MODEL

    values = network.target_values().copy()
    imputed = np.zeros(network.n_hours, dtype=np.int64)
    missing = np.flatnonzero(is_sentinel(values))
    reachable = missing[missing >= _LAG_HORIZON]  # first hours lack a lag window
    n_unfillable = missing.size - reachable.size
    n_filled = 0
    if reachable.size:
        X = assemble_rows(network, reachable)
        fillable = ~np.all(is_sentinel(X[:, :N_LAG]), axis=1)
        n_unfillable += int((~fillable).sum())
        rows = reachable[fillable]
        if rows.size:
            values[rows] = model.predict(X[fillable])
            imputed[rows] = 1
            n_filled = int(rows.size)

    series = network.target_series
    out.mkdir(parents=True, exist_ok=True)
    out_csv = out / f"imputed_{network.target_id}.csv"
    with open(out_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "year", "month", "day", "hour", "parameter", "value", "imputed"])
        for i in range(network.n_hours):
            stamp = series.stamp_at(i)
            writer.writerow(
                [
                    network.target_id,
                    stamp.year, stamp.month, stamp.day, stamp.hour,
                    network.parameter.value,
                    _format_value(float(values[i])),
                    int(imputed[i]),
                ]
            )
    _write_json(
        out / "impute_summary.json",
        {
            "target_id": network.target_id,
            "parameter": network.parameter.value,
            "model_kind": model.kind.value,
            "model_path": str(model_path),
            "n_hours": network.n_hours,
            "missing_before": int(missing.size),
            "imputed": n_filled,
            "unfillable": int(n_unfillable),
        },
    )
    _write_resolved(out, "impute", cfg, seed)
    if n_unfillable:
        logger.warning(
            "impute: %d hour(s) left as sentinel (no lag window or every input lag missing)",
            n_unfillable,
        )
    logger.info("impute: filled %d of %d missing hours -> %s", n_filled, missing.size, out_csv)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stationfill",
        description="QC, gap-filling models and benchmarks for 7-station hourly networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "synth": ("generate a seeded synthetic station network as ingestion CSVs", cmd_synth),
        "qc": ("quality-control station CSVs into cleaned CSVs + reports", cmd_qc),
        "build-dataset": ("export the lag/date/availability design matrix", cmd_build_dataset),
        "train": ("fit the requested regressor kinds and save artifacts", cmd_train),
        "evaluate": ("score saved models over the 64-mask benchmark grid", cmd_evaluate),
        "impute": ("fill target-station gaps with a saved model", cmd_impute),
    }
    for name, (help_text, func) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run configuration", default=None)
        p.add_argument("--out", help="output directory (default: config 'out' or ./run)", default=None)
        p.add_argument("--seed", type=int, help="base seed for any unset seed field", default=None)
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_PARSE
    except CsvFormatError as exc:
        logger.error("CSV parse error: %s", exc)
        return EXIT_PARSE
    except SchemaMismatch as exc:
        logger.error("schema mismatch: %s", exc)
        return EXIT_SCHEMA
    except SingularSystem as exc:
        logger.error("model failure: %s", exc)
        return EXIT_MODEL
    except StationFillError as exc:
        logger.error("%s", exc)
        return EXIT_DATA
    except OSError as exc:
        logger.error("i/o error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
