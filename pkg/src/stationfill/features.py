"""Feature assembly: from an aligned network to a supervised dataset.

Each usable hour h of the target station becomes one row of 39 features:

* 18 lag readings — for each of the six input stations, in network order,
  the values at h-2, h-1 and h;
* 3 date ordinals — month MM, day DD, hour HH of h, as raw numbers;
* 18 availability indicators — one per lag column, 0 where that lag was the
  sentinel before any substitution, else 1.

Rows whose target value is the sentinel are dropped entirely (targets are
never imputed into the training signal). Sentinels in the lag columns are
kept in the dataset and only rewritten when a Scaler applies a MaskPolicy,
because two of the three policies need training-set statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DirtyTestPeriod,
    EmptyDataset,
    NoCleanWindow,
    OutOfIndex,
    PeriodNotFound,
)
from .timeseries import SENTINEL, HourStamp, Parameter, StationNetwork

# Fixed column layout. Lag columns are station-major: station i (0-based)
# occupies columns 3i..3i+2 holding lags h-2, h-1, h in that order. The
# availability block mirrors the lag block column for column.
N_STATIONS = 6
LAGS = (2, 1, 0)
N_LAG = N_STATIONS * len(LAGS)  # 18
DATE_START = N_LAG  # 18, 19, 20
N_DATE = 3
LAI_START = N_LAG + N_DATE  # 21
N_FEATURES = N_LAG + N_DATE + N_LAG  # 39


def feature_names() -> list[str]:
    """Column names of the exported dataset, in storage order."""
    lag_names = [f"s{i + 1}_lag{k}" for i in range(N_STATIONS) for k in LAGS]
    lai_names = [f"lai_s{i + 1}_lag{k}" for i in range(N_STATIONS) for k in LAGS]
    return lag_names + ["MM", "DD", "HH"] + lai_names


class MaskPolicy(Enum):
    """How sentinel lag values are rewritten before a model sees them."""

    ZERO_AFTER_STANDARDIZE = "zero_after_standardize"  # -> training column mean
    STATION_MEAN = "station_mean"  # -> station's pooled training mean
    RAW_SENTINEL = "raw_sentinel"  # keep -999 (fidelity mode)


@dataclass(frozen=True)
class Dataset:
    """Supervised rows: X (n, 39), y (n,), and the hour each row describes.

    X may contain sentinels in lag columns (flagged by the matching
    availability column); y never does. Rows are in strictly increasing hour
    order.
    """

    X: np.ndarray
    y: np.ndarray
    epoch_hours: np.ndarray
    parameter: Parameter
    station_ids: tuple[str, ...]

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        hours = np.ascontiguousarray(self.epoch_hours, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != N_FEATURES:
            raise ValueError(f"X must be (n, {N_FEATURES}), got {X.shape}")
        if y.shape != (X.shape[0],) or hours.shape != (X.shape[0],):
            raise ValueError("X, y and epoch_hours must agree on row count")
        if (y == SENTINEL).any():
            raise ValueError("target vector must be sentinel-free")
        if hours.size > 1 and not (np.diff(hours) > 0).all():
            raise ValueError("rows must be in strictly increasing hour order")
        if len(self.station_ids) != N_STATIONS:
            raise ValueError(f"need {N_STATIONS} station ids, got {len(self.station_ids)}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "epoch_hours", hours)
        object.__setattr__(self, "station_ids", tuple(self.station_ids))

    @property
    def n_rows(self) -> int:
        return int(self.y.size)

    @property
    def lai(self) -> np.ndarray:
        """(n, 18) availability block view."""
        return self.X[:, LAI_START:]

    def hour_index(self) -> list[HourStamp]:
        return [HourStamp.from_epoch_hours(int(h)) for h in self.epoch_hours]

    def take(self, idx: np.ndarray) -> "Dataset":
        """Subset by (sorted) row positions."""
        return replace(
            self, X=self.X[idx], y=self.y[idx], epoch_hours=self.epoch_hours[idx]
        )

    def write_csv(self, path: str | Path) -> None:
        """Export as feature columns + target, one row per usable hour."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(feature_names() + ["target"])
            for i in range(self.n_rows):
                writer.writerow(
                    [repr(float(v)) for v in self.X[i]] + [repr(float(self.y[i]))]
                )


def _date_columns(epoch_hours: np.ndarray) -> np.ndarray:
    """(n, 3) MM/DD/HH ordinals for epoch-hour stamps, via datetime64 math."""
    dt = epoch_hours.astype("datetime64[h]")
    months = dt.astype("datetime64[M]")
    mm = months.astype(np.int64) % 12 + 1
    dd = (dt.astype("datetime64[D]") - months.astype("datetime64[D]")).astype(np.int64) + 1
    hh = np.mod(epoch_hours, 24)
    return np.column_stack([mm, dd, hh]).astype(np.float64)


def assemble_row(network: StationNetwork, h: HourStamp) -> np.ndarray | None:
    """One 39-element feature row for hour ``h``, or None if h is off-index.

    Raises OutOfIndex when h lies inside the index but within its first two
    hours, where the lag window would reach before the data starts.
    """
    pos = network.target_series.offset_of(h)
    if pos < 0 or pos >= network.n_hours:
        return None
    if pos < max(LAGS):
        raise OutOfIndex(f"hour {h} is within the lag horizon of the index start")

    row = np.empty(N_FEATURES, dtype=np.float64)
    matrix = network.inputs_matrix()
    for s in range(N_STATIONS):
        for j, lag in enumerate(LAGS):
            row[3 * s + j] = matrix[pos - lag, s]
    row[DATE_START : DATE_START + N_DATE] = (h.month, h.day, h.hour)
    row[LAI_START:] = (row[:N_LAG] != SENTINEL).astype(np.float64)
    return row


def assemble_rows(network: StationNetwork, offsets: np.ndarray) -> np.ndarray:
    """Feature matrix for the given hour offsets (each >= the lag horizon)."""
    offsets = np.asarray(offsets, dtype=np.int64)
    if offsets.size and (offsets.min() < max(LAGS) or offsets.max() >= network.n_hours):
        raise OutOfIndex("hour offsets must lie within the index, past the lag horizon")
    matrix = network.inputs_matrix()
    X = np.empty((offsets.size, N_FEATURES), dtype=np.float64)
    for j, lag in enumerate(LAGS):
        X[:, j : N_LAG : len(LAGS)] = matrix[offsets - lag]
    epoch_hours = offsets + network.start.to_epoch_hours()
    X[:, DATE_START : DATE_START + N_DATE] = _date_columns(epoch_hours)
    X[:, LAI_START:] = (X[:, :N_LAG] != SENTINEL).astype(np.float64)
    return X


def build_dataset(network: StationNetwork) -> Dataset:
    """Vectorized assembly of every usable hour of the network."""
    tgt = network.target_values()
    usable = tgt != SENTINEL
    usable[: max(LAGS)] = False
    rows = np.flatnonzero(usable)
    if rows.size == 0:
        raise EmptyDataset("no hour has a non-sentinel target outside the lag horizon")

    return Dataset(
        X=assemble_rows(network, rows),
        y=tgt[rows],
        epoch_hours=rows.astype(np.int64) + network.start.to_epoch_hours(),
        parameter=network.parameter,
        station_ids=network.input_ids,
    )


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    """Test periods (inclusive hour ranges) + validation carve-out for the rest."""

    test_periods: tuple[tuple[HourStamp, HourStamp], ...]
    validation_fraction: float = 0.15
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")
        spans = []
        for start, end in self.test_periods:
            if end < start:
                raise ValueError(f"period end {end} precedes start {start}")
            spans.append((start.to_epoch_hours(), end.to_epoch_hours()))
        for a, b in zip(sorted(spans), sorted(spans)[1:]):
            if b[0] <= a[1]:
                raise ValueError("test periods must be pairwise disjoint")


def extract_test_periods(
    ds: Dataset, spec: SplitSpec
) -> tuple[Dataset, list[Dataset]]:
    """Carve the test periods out of ``ds``.

    Every test period must be fully present (one row per hour) and clean
    (every availability bit 1); anything else raises DirtyTestPeriod, because
    a benchmark window with real holes cannot serve as ground truth. Rows not
    claimed by any period form the training remainder; the three parts
    partition ds exactly.
    """
    claimed = np.zeros(ds.n_rows, dtype=bool)
    tests: list[Dataset] = []
    for start, end in spec.test_periods:
        lo, hi = start.to_epoch_hours(), end.to_epoch_hours()
        sel = (ds.epoch_hours >= lo) & (ds.epoch_hours <= hi)
        n_found = int(sel.sum())
        if n_found == 0:
            raise PeriodNotFound(f"no rows in {start}..{end}")
        expected = hi - lo + 1
        if n_found < expected:
            raise DirtyTestPeriod(
                f"{start}..{end}: only {n_found} of {expected} hours usable "
                "(target sentinel inside the period)"
            )
        idx = np.flatnonzero(sel)
        period = ds.take(idx)
        if (period.lai == 0.0).any():
            raise DirtyTestPeriod(f"{start}..{end}: sentinel lags inside the period")
        claimed |= sel
        tests.append(period)
    train = ds.take(np.flatnonzero(~claimed))
    return train, tests


def suggest_test_periods(
    ds: Dataset, len_hours: int
) -> list[tuple[HourStamp, HourStamp]]:
    """Pick three disjoint clean windows: coldest, hottest, most volatile.

    A window is clean when every one of its hours has a row and every
    availability bit is 1. Selection order: lowest window mean, then highest
    window mean, then highest mean |hour-to-hour change|, each restricted to
    windows disjoint from the earlier picks; ties go to the earliest start.
    """
    if len_hours < 2:
        raise ValueError("len_hours must be at least 2")
    if ds.n_rows == 0:
        raise NoCleanWindow("dataset has no rows")

    h0 = int(ds.epoch_hours[0])
    span = int(ds.epoch_hours[-1]) - h0 + 1
    if span < len_hours:
        raise NoCleanWindow(f"index spans {span} h, shorter than a {len_hours} h window")

    # Hour-grid scaffolding: y and cleanliness per hour of the full span.
    grid_y = np.zeros(span, dtype=np.float64)
    clean = np.zeros(span, dtype=bool)
    pos = ds.epoch_hours - h0
    grid_y[pos] = ds.y
    clean[pos] = (ds.lai != 0.0).all(axis=1)

    n_windows = span - len_hours + 1
    csum_clean = np.concatenate([[0], np.cumsum(clean.astype(np.int64))])
    window_clean = (csum_clean[len_hours:] - csum_clean[:-len_hours]) == len_hours
    if not window_clean.any():
        raise NoCleanWindow(f"no sentinel-free {len_hours} h window exists")

    csum_y = np.concatenate([[0.0], np.cumsum(grid_y)])
    window_mean = (csum_y[len_hours:] - csum_y[:-len_hours]) / len_hours

    step = np.abs(np.diff(grid_y))  # step[t] = |y[t+1] - y[t]|
    csum_step = np.concatenate([[0.0], np.cumsum(step)])
    window_fluct = (csum_step[len_hours - 1 :] - csum_step[: -(len_hours - 1)]) / (
        len_hours - 1
    )
    window_fluct = window_fluct[:n_windows]

    available = window_clean.copy()

    def pick(objective: np.ndarray, minimize: bool) -> int:
        masked = np.where(available, objective, np.inf if minimize else -np.inf)
        t = int(np.argmin(masked) if minimize else np.argmax(masked))
        if not available[t]:
            raise NoCleanWindow("remaining clean windows cannot be made disjoint")
        # Block overlap with the chosen window for later picks.
        lo = max(0, t - len_hours + 1)
        available[lo : t + len_hours] = False
        return t

    starts = [
        pick(window_mean, minimize=True),
        pick(window_mean, minimize=False),
        pick(window_fluct, minimize=False),
    ]
    return [
        (
            HourStamp.from_epoch_hours(h0 + t),
            HourStamp.from_epoch_hours(h0 + t + len_hours - 1),
        )
        for t in starts
    ]


def split_validation(train: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Random row split of the training remainder into (fit, validation).

    Row sampling is uniform via SplitSpec's seeded generator; both halves keep
    chronological order. The fit half is guaranteed non-empty.
    """
    n = train.n_rows
    if n == 0:
        raise EmptyDataset("cannot split an empty training set")
    n_val = min(int(round(spec.validation_fraction * n)), n - 1)
    rng = np.random.default_rng(spec.rng_seed)
    perm = rng.permutation(n)
    val_idx = np.sort(perm[:n_val])
    fit_idx = np.sort(perm[n_val:])
    return train.take(fit_idx), train.take(val_idx)


# ---------------------------------------------------------------------------
# Standardization + mask policy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scaler:
    """Per-column z-score statistics fitted on the fit set.

    Availability columns pass through untouched (their stats are pinned to
    mean 0 / std 1). Columns with no spread keep std 1 so transforming a
    constant column yields zeros instead of NaNs. ``station_mean`` pools each
    station's three lag columns, for the STATION_MEAN policy.
    """

    feature_mean: np.ndarray  # (39,)
    feature_std: np.ndarray  # (39,)
    target_mean: float
    target_std: float
    station_mean: np.ndarray  # (6,)

    def transform_features(self, X: np.ndarray, policy: MaskPolicy) -> np.ndarray:
        """Apply the mask policy to sentinel lags, then z-score."""
        Z = np.array(X, dtype=np.float64, copy=True)
        missing = Z[:, LAI_START:] == 0.0  # availability bits locate the sentinels
        if policy is MaskPolicy.ZERO_AFTER_STANDARDIZE:
            fill = np.broadcast_to(self.feature_mean[:N_LAG], missing.shape)
            Z[:, :N_LAG][missing] = fill[missing]
        elif policy is MaskPolicy.STATION_MEAN:
            fill = np.broadcast_to(np.repeat(self.station_mean, len(LAGS)), missing.shape)
            Z[:, :N_LAG][missing] = fill[missing]
        # RAW_SENTINEL: leave the -999 readings in place.
        Z[:, :LAI_START] = (Z[:, :LAI_START] - self.feature_mean[:LAI_START]) / self.feature_std[
            :LAI_START
        ]
        return Z

    def inverse_features(self, Z: np.ndarray) -> np.ndarray:
        X = np.array(Z, dtype=np.float64, copy=True)
        X[:, :LAI_START] = X[:, :LAI_START] * self.feature_std[:LAI_START] + self.feature_mean[
            :LAI_START
        ]
        return X

    def transform_target(self, y: np.ndarray) -> np.ndarray:
        return (np.asarray(y, dtype=np.float64) - self.target_mean) / self.target_std

    def inverse_target(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=np.float64) * self.target_std + self.target_mean

    def to_dict(self) -> dict:
        return {
            "feature_mean": self.feature_mean.tolist(),
            "feature_std": self.feature_std.tolist(),
            "target_mean": self.target_mean,
            "target_std": self.target_std,
            "station_mean": self.station_mean.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(
            feature_mean=np.asarray(d["feature_mean"], dtype=np.float64),
            feature_std=np.asarray(d["feature_std"], dtype=np.float64),
            target_mean=float(d["target_mean"]),
            target_std=float(d["target_std"]),
            station_mean=np.asarray(d["station_mean"], dtype=np.float64),
        )


def fit_scaler(fit: Dataset) -> Scaler:
    """Column statistics over the fit set, ignoring sentinel lag entries."""
    if fit.n_rows == 0:
        raise EmptyDataset("cannot fit a scaler on zero rows")
    mean = np.zeros(N_FEATURES)
    std = np.ones(N_FEATURES)

    lag_block = fit.X[:, :N_LAG]
    live = fit.lai != 0.0
    counts = live.sum(axis=0)
    sums = np.where(live, lag_block, 0.0).sum(axis=0)
    col_mean = np.divide(sums, counts, out=np.zeros(N_LAG), where=counts > 0)
    sq = np.where(live, (lag_block - col_mean) ** 2, 0.0).sum(axis=0)
    col_var = np.divide(sq, counts, out=np.zeros(N_LAG), where=counts > 0)
    col_std = np.sqrt(col_var)
    mean[:N_LAG] = col_mean
    std[:N_LAG] = np.where(col_std > 0.0, col_std, 1.0)

    date_block = fit.X[:, DATE_START : DATE_START + N_DATE]
    mean[DATE_START : DATE_START + N_DATE] = date_block.mean(axis=0)
    date_std = date_block.std(axis=0)
    std[DATE_START : DATE_START + N_DATE] = np.where(date_std > 0.0, date_std, 1.0)

    # Availability columns keep mean 0 / std 1 (pass-through).

    station_counts = counts.reshape(N_STATIONS, len(LAGS)).sum(axis=1)
    station_sums = sums.reshape(N_STATIONS, len(LAGS)).sum(axis=1)
    station_mean = np.divide(
        station_sums, station_counts, out=np.zeros(N_STATIONS), where=station_counts > 0
    )

    y_std = float(fit.y.std())
    return Scaler(
        feature_mean=mean,
        feature_std=std,
        target_mean=float(fit.y.mean()),
        target_std=y_std if y_std > 0.0 else 1.0,
        station_mean=station_mean,
    )
