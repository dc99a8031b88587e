"""Missing-station stress benchmark.

Every subset of the six input stations (2^6 = 64 masks) is simulated as
simultaneously missing over each held-out test period: the masked stations'
lag features are overwritten with the sentinel (availability bits dropped to
0) for a contiguous block of hours, models predict the period from the
degraded features, and the report keeps every cell plus the worst RMSE per
missing-station count k — the quantity that answers "how bad can it get with
k neighbors down".
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import EmptyDataset, GapTooLong, ParameterMismatch
from .features import LAGS, LAI_START, N_STATIONS, Dataset
from .timeseries import SENTINEL, HourStamp

N_MASKS = 2**N_STATIONS


@dataclass(frozen=True)
class MissingMask:
    """Which of the six input stations are treated as missing (1 = missing)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != N_STATIONS or any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"mask needs {N_STATIONS} bits of 0/1, got {self.bits}")

    @property
    def k(self) -> int:
        return int(sum(self.bits))

    def to_int(self) -> int:
        return int(sum(b << i for i, b in enumerate(self.bits)))

    @classmethod
    def from_int(cls, m: int) -> "MissingMask":
        return cls(tuple((m >> i) & 1 for i in range(N_STATIONS)))


def enumerate_masks() -> list[MissingMask]:
    """All 64 masks, ordered by (k, bit pattern ascending)."""
    masks = [MissingMask.from_int(m) for m in range(N_MASKS)]
    masks.sort(key=lambda mk: (mk.k, mk.to_int()))
    return masks


class GapPlacement(Enum):
    FULL_PERIOD = "full_period"
    RANDOM_BLOCK = "random_block"


@dataclass(frozen=True)
class GapSpec:
    """Where inside a test period the masked stations drop out."""

    gap_hours: int = 24
    placement: GapPlacement = GapPlacement.FULL_PERIOD
    rng_seed: int = 0

    def __post_init__(self):
        if self.gap_hours < 1:
            raise ValueError("gap_hours must be at least 1")


def inject_missing(test: Dataset, mask: MissingMask, spec: GapSpec) -> Dataset:
    """Copy of ``test`` with the masked stations' lags knocked out.

    FULL_PERIOD blanks every row; RANDOM_BLOCK blanks one seeded contiguous
    ``gap_hours`` block per masked station. Targets are never touched — they
    stay the ground truth the degraded predictions are scored against.
    """
    n = test.n_rows
    if n == 0:
        raise EmptyDataset("cannot inject gaps into an empty test period")
    X = test.X.copy()
    rng = np.random.default_rng(spec.rng_seed)
    if spec.placement is GapPlacement.RANDOM_BLOCK and spec.gap_hours > n:
        raise GapTooLong(f"gap of {spec.gap_hours} h exceeds the {n} h test period")

    for s in range(N_STATIONS):
        if not mask.bits[s]:
            continue
        if spec.placement is GapPlacement.FULL_PERIOD:
            rows = slice(None)
        else:
            start = int(rng.integers(0, n - spec.gap_hours + 1))
            rows = slice(start, start + spec.gap_hours)
        cols = slice(3 * s, 3 * s + len(LAGS))
        X[rows, cols] = SENTINEL
        X[rows, LAI_START + 3 * s : LAI_START + 3 * s + len(LAGS)] = 0.0
    return Dataset(
        X=X,
        y=test.y,
        epoch_hours=test.epoch_hours,
        parameter=test.parameter,
        station_ids=test.station_ids,
    )


@dataclass(frozen=True)
class EvalCell:
    period: int
    mask_bits: tuple[int, ...]
    k: int
    rmse: float

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "mask_bits": list(self.mask_bits),
            "k": self.k,
            "rmse": self.rmse,
        }


@dataclass(frozen=True)
class PredictionTrace:
    """Per-hour predicted vs measured values for one model on one clean period."""

    kind: str
    period: int
    epoch_hours: np.ndarray
    measured: np.ndarray
    predicted: np.ndarray


@dataclass
class ModelEval:
    kind: str
    cells: list[EvalCell]
    worst: dict[int, float]  # k -> max RMSE over masks x periods

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "cells": [c.to_dict() for c in self.cells],
            "worst": [{"k": k, "rmse": self.worst[k]} for k in sorted(self.worst)],
        }


@dataclass
class EvalReport:
    parameter: str
    gap: GapSpec
    periods: list[tuple[HourStamp, HourStamp]]
    models: list[ModelEval]
    traces: list[PredictionTrace] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "gap": {
                "gap_hours": self.gap.gap_hours,
                "placement": self.gap.placement.value,
                "rng_seed": self.gap.rng_seed,
            },
            "periods": [{"start": str(a), "end": str(b)} for a, b in self.periods],
            "models": [m.to_dict() for m in self.models],
        }


def evaluate(models, tests: list[Dataset], spec: GapSpec | None = None) -> EvalReport:
    """Score every model over every period x mask combination.

    ``models`` may be any objects exposing ``kind``, ``parameter`` and
    ``predict(X) -> y_hat`` (physical units). The grid is a pure map — cell
    order is fixed by (model, period, mask) regardless of execution order.
    """
    spec = spec or GapSpec()
    if not tests:
        raise EmptyDataset("evaluation needs at least one test period")
    parameter = tests[0].parameter
    for model in models:
        if getattr(model, "parameter", parameter) is not parameter:
            raise ParameterMismatch(
                f"model {getattr(model, 'kind', '?')} was trained on a different parameter"
            )

    masks = enumerate_masks()
    injected: dict[tuple[int, int], Dataset] = {}
    for p, test in enumerate(tests):
        for mask in masks:
            injected[(p, mask.to_int())] = inject_missing(test, mask, spec)

    periods = [
        (
            HourStamp.from_epoch_hours(int(t.epoch_hours[0])),
            HourStamp.from_epoch_hours(int(t.epoch_hours[-1])),
        )
        for t in tests
    ]
    report = EvalReport(parameter=parameter.value, gap=spec, periods=periods, models=[])

    for model in models:
        kind = getattr(model.kind, "value", str(model.kind))
        cells: list[EvalCell] = []
        worst: dict[int, float] = {}
        for p, test in enumerate(tests):
            for mask in masks:
                ds = injected[(p, mask.to_int())]
                pred = np.asarray(model.predict(ds.X), dtype=np.float64)
                rmse = float(np.sqrt(np.mean((pred - test.y) ** 2)))
                cells.append(EvalCell(period=p, mask_bits=mask.bits, k=mask.k, rmse=rmse))
                if rmse > worst.get(mask.k, -np.inf):
                    worst[mask.k] = rmse
                if mask.k == 0:
                    report.traces.append(
                        PredictionTrace(
                            kind=kind,
                            period=p,
                            epoch_hours=test.epoch_hours,
                            measured=test.y,
                            predicted=pred,
                        )
                    )
        report.models.append(ModelEval(kind=kind, cells=cells, worst=worst))
    return report


def render_report(report: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write the JSON grid, the worst-case CSV table, and prediction traces."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []

    json_path = out_dir / "eval_report.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    paths.append(json_path)

    csv_path = out_dir / "eval_worst.csv"
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["method"] + [f"{k} missing" for k in range(N_STATIONS, 0, -1)] + ["no missing"]
        writer.writerow(header)
        for m in report.models:
            writer.writerow([m.kind] + [repr(m.worst[k]) for k in range(N_STATIONS, -1, -1)])
    paths.append(csv_path)

    for trace in report.traces:
        trace_path = out_dir / f"predictions_{trace.kind}_p{trace.period}.csv"
        with trace_path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["hour", "measured", "predicted"])
            for h, m, p in zip(trace.epoch_hours, trace.measured, trace.predicted):
                writer.writerow(
                    [str(HourStamp.from_epoch_hours(int(h))), repr(float(m)), repr(float(p))]
                )
        paths.append(trace_path)
    return paths
