"""Hourly station time series with one in-band missing-value marker.

The data model is deliberately small: a station series is a station id, a
physical parameter, a first hour, and a dense float64 vector with one value
per hour. Missing or rejected readings are stored in-band as the sentinel
value -999.0 so that a series stays a plain numeric array end to end.

A network bundles one target station with exactly six input stations on a
shared hourly index.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CsvFormatError,
    EmptyInput,
    InvalidStamp,
    ParameterMismatch,
    WrongInputCount,
)

logger = logging.getLogger(__name__)

#: In-band marker for missing/rejected readings. Exactly representable in
#: float64, so equality comparison against it is reliable.
SENTINEL = -999.0

_EPOCH = datetime(1970, 1, 1)
CSV_HEADER = ("station_id", "year", "month", "day", "hour", "parameter", "value")
N_INPUT_STATIONS = 6


def sentinel() -> float:
    """Return the shared missing-value marker."""
    return SENTINEL


def is_sentinel(value):
    """True where ``value`` equals the sentinel. Accepts scalars and arrays."""
    if isinstance(value, np.ndarray):
        return value == SENTINEL
    return float(value) == SENTINEL


class Parameter(Enum):
    """Measured quantity, with its physical plausibility envelope attached."""

    TEMPERATURE = "T"
    RELATIVE_HUMIDITY = "RH"

    @property
    def units(self) -> str:
        return "degC" if self is Parameter.TEMPERATURE else "%"

    @property
    def plausible_range(self) -> tuple[float, float]:
        if self is Parameter.TEMPERATURE:
            return (-30.0, 50.0)
        return (0.0, 100.0)

    @property
    def default_max_step(self) -> float:
        """Largest credible hour-to-hour change, in the parameter's units."""
        return 10.0 if self is Parameter.TEMPERATURE else 40.0

    @property
    def saturation_value(self) -> float | None:
        """Plateau value that may legitimately persist (humidity pegged at 100 %)."""
        return 100.0 if self is Parameter.RELATIVE_HUMIDITY else None

    @classmethod
    def from_string(cls, text: str) -> "Parameter":
        key = text.strip().upper()
        aliases = {
            "T": cls.TEMPERATURE,
            "TEMP": cls.TEMPERATURE,
            "TEMPERATURE": cls.TEMPERATURE,
            "RH": cls.RELATIVE_HUMIDITY,
            "HUMIDITY": cls.RELATIVE_HUMIDITY,
            "RELATIVE_HUMIDITY": cls.RELATIVE_HUMIDITY,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown parameter {text!r}") from None


@dataclass(frozen=True, order=True)
class HourStamp:
    """A naive local calendar hour (no DST, no timezone)."""

    year: int
    month: int
    day: int
    hour: int

    def __post_init__(self):
        if not 0 <= self.hour <= 23:
            raise InvalidStamp(f"hour {self.hour} outside 0..23")
        try:
            datetime(self.year, self.month, self.day)
        except (ValueError, TypeError) as exc:
            raise InvalidStamp(f"{self.year:04d}-{self.month:02d}-{self.day:02d}: {exc}") from exc

    # -- conversions ---------------------------------------------------

    def to_datetime(self) -> datetime:
        return datetime(self.year, self.month, self.day, self.hour)

    @classmethod
    def from_datetime(cls, dt: datetime) -> "HourStamp":
        return cls(dt.year, dt.month, dt.day, dt.hour)

    def to_epoch_hours(self) -> int:
        """Whole hours since 1970-01-01 00:00 (negative before the epoch)."""
        delta = self.to_datetime() - _EPOCH
        return delta.days * 24 + delta.seconds // 3600

    @classmethod
    def from_epoch_hours(cls, hours: int) -> "HourStamp":
        return cls.from_datetime(_EPOCH + timedelta(hours=int(hours)))

    # -- arithmetic ----------------------------------------------------

    def plus_hours(self, n: int) -> "HourStamp":
        return HourStamp.from_datetime(self.to_datetime() + timedelta(hours=int(n)))

    def hours_until(self, other: "HourStamp") -> int:
        """Signed whole-hour distance from self to other."""
        return other.to_epoch_hours() - self.to_epoch_hours()

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}T{self.hour:02d}"

    @classmethod
    def parse(cls, text: str) -> "HourStamp":
        """Parse the ``YYYY-MM-DDTHH`` form produced by ``str()``."""
        try:
            date_part, hour_part = text.strip().split("T")
            y, m, d = (int(p) for p in date_part.split("-"))
            return cls(y, m, d, int(hour_part))
        except InvalidStamp:
            raise
        except Exception as exc:
            raise InvalidStamp(f"cannot parse hour stamp {text!r}") from exc


@dataclass(frozen=True)
class StationSeries:
    """Dense hourly readings for one station and one parameter.

    ``values[i]`` belongs to hour ``start + i``. The vector is stored
    read-only; operations that change values return a new series.
    """

    station_id: str
    parameter: Parameter
    start: HourStamp
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 1 or vals.size == 0:
            raise EmptyInput(f"series {self.station_id!r} needs a non-empty 1-D value vector")
        bad = ~np.isfinite(vals)
        if bad.any():
            raise ValueError(
                f"series {self.station_id!r} holds {int(bad.sum())} non-finite values; "
                f"missing data must use the sentinel {SENTINEL}"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    # -- index ----------------------------------------------------------

    @property
    def n_hours(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> HourStamp:
        return self.start.plus_hours(self.n_hours - 1)

    def stamp_at(self, i: int) -> HourStamp:
        if not 0 <= i < self.n_hours:
            raise IndexError(f"hour offset {i} outside 0..{self.n_hours - 1}")
        return self.start.plus_hours(i)

    def offset_of(self, stamp: HourStamp) -> int:
        """Position of ``stamp`` in the series; may be out of bounds."""
        return self.start.hours_until(stamp)

    # -- content ----------------------------------------------------------

    @property
    def missing_mask(self) -> np.ndarray:
        return self.values == SENTINEL

    @property
    def missing_fraction(self) -> float:
        return float(self.missing_mask.mean())

    def with_values(self, values: np.ndarray) -> "StationSeries":
        """Same station/index, new readings."""
        if len(values) != self.n_hours:
            raise ValueError("replacement vector must keep the series length")
        return StationSeries(self.station_id, self.parameter, self.start, values)


def build_series(
    records: Iterable[tuple[HourStamp, float]],
    station_id: str,
    parameter: Parameter,
) -> StationSeries:
    """Assemble a dense hourly series from (stamp, value) records.

    The index runs from the earliest to the latest stamp seen; hours without a
    record are filled with the sentinel. Duplicate stamps keep the last record
    and are counted in a single warning.
    """
    recs = list(records)
    if not recs:
        raise EmptyInput(f"no records for station {station_id!r}")

    hours = np.array([stamp.to_epoch_hours() for stamp, _ in recs], dtype=np.int64)
    vals = np.array([v for _, v in recs], dtype=np.float64)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise ValueError(
            f"station {station_id!r}: {int(bad.sum())} non-finite values in input records"
        )

    lo, hi = int(hours.min()), int(hours.max())
    dense = np.full(hi - lo + 1, SENTINEL, dtype=np.float64)
    seen = np.zeros(dense.size, dtype=bool)
    duplicates = 0
    for h, v in zip(hours - lo, vals):
        if seen[h]:
            duplicates += 1
        seen[h] = True
        dense[h] = v  # later record wins
    if duplicates:
        logger.warning(
            "station %s: %d duplicate timestamp(s), keeping the last record for each",
            station_id,
            duplicates,
        )
    return StationSeries(station_id, parameter, HourStamp.from_epoch_hours(lo), dense)


@dataclass(frozen=True)
class StationNetwork:
    """One target station plus exactly six input stations on one hourly index."""

    target_id: str
    input_ids: tuple[str, ...]
    series: Mapping[str, StationSeries]

    @property
    def parameter(self) -> Parameter:
        return self.series[self.target_id].parameter

    @property
    def start(self) -> HourStamp:
        return self.series[self.target_id].start

    @property
    def n_hours(self) -> int:
        return self.series[self.target_id].n_hours

    def stamp_at(self, i: int) -> HourStamp:
        return self.series[self.target_id].stamp_at(i)

    @property
    def target_series(self) -> StationSeries:
        return self.series[self.target_id]

    def target_values(self) -> np.ndarray:
        return self.series[self.target_id].values

    def inputs_matrix(self) -> np.ndarray:
        """(n_hours, 6) readings of the input stations, in network order."""
        return np.column_stack([self.series[sid].values for sid in self.input_ids])

    def with_series(self, series: Mapping[str, StationSeries]) -> "StationNetwork":
        """Replace some member series (ids and alignment must be unchanged)."""
        merged = dict(self.series)
        for sid, s in series.items():
            if sid not in merged:
                raise KeyError(f"station {sid!r} not part of the network")
            if s.start != merged[sid].start or s.n_hours != merged[sid].n_hours:
                raise ValueError(f"replacement series for {sid!r} breaks alignment")
            merged[sid] = s
        return StationNetwork(self.target_id, self.input_ids, merged)


def align_network(target: StationSeries, inputs: Sequence[StationSeries]) -> StationNetwork:
    """Pad target + inputs to their union hourly index and bundle them.

    Hours a station does not cover are filled with the sentinel. Aligning an
    already aligned network is the identity (idempotent).
    """
    if len(inputs) != N_INPUT_STATIONS:
        raise WrongInputCount(f"need exactly {N_INPUT_STATIONS} input stations, got {len(inputs)}")
    all_series = [target, *inputs]
    ids = [s.station_id for s in all_series]
    if len(set(ids)) != len(ids):
        raise ValueError(f"station ids must be distinct, got {ids}")
    for s in inputs:
        if s.parameter is not target.parameter:
            raise ParameterMismatch(
                f"station {s.station_id!r} measures {s.parameter.value}, "
                f"target measures {target.parameter.value}"
            )

    lo = min(s.start.to_epoch_hours() for s in all_series)
    hi = max(s.end.to_epoch_hours() for s in all_series)
    n = hi - lo + 1
    start = HourStamp.from_epoch_hours(lo)

    aligned: dict[str, StationSeries] = {}
    for s in all_series:
        off = s.start.to_epoch_hours() - lo
        if off == 0 and s.n_hours == n:
            aligned[s.station_id] = s
        else:
            padded = np.full(n, SENTINEL, dtype=np.float64)
            padded[off : off + s.n_hours] = s.values
            aligned[s.station_id] = StationSeries(s.station_id, s.parameter, start, padded)
    return StationNetwork(target.station_id, tuple(s.station_id for s in inputs), aligned)


# ---------------------------------------------------------------------------
# CSV ingestion / export
# ---------------------------------------------------------------------------


def _format_value(v: float) -> str:
    """Shortest decimal that round-trips; sentinel stays the bare literal."""
    if v == SENTINEL:
        return "-999"
    return repr(float(v))


def read_records_csv(path: str | Path) -> list[tuple[str, HourStamp, Parameter, float]]:
    """Read one ingestion CSV into (station_id, stamp, parameter, value) records."""
    path = Path(path)
    records: list[tuple[str, HourStamp, Parameter, float]] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, expected header row") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise CsvFormatError(
                f"{path}: bad header {header!r}, expected {','.join(CSV_HEADER)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # tolerate trailing blank line
            if len(row) != len(CSV_HEADER):
                raise CsvFormatError(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            sid, y, m, d, h, param, value = (field.strip() for field in row)
            try:
                stamp = HourStamp(int(y), int(m), int(d), int(h))
                parameter = Parameter.from_string(param)
                val = float(value)
            except (ValueError, InvalidStamp) as exc:
                raise CsvFormatError(f"{path}:{lineno}: {exc}") from exc
            if not np.isfinite(val):
                raise CsvFormatError(f"{path}:{lineno}: non-finite value {value!r}")
            records.append((sid, stamp, parameter, val))
    return records


def load_station_csvs(
    paths: Sequence[str | Path], parameter: Parameter
) -> dict[str, StationSeries]:
    """Read ingestion CSVs and build one dense series per station id.

    All records must carry ``parameter``; rows for other parameters raise
    ParameterMismatch so a mixed file fails loudly rather than silently
    dropping data.
    """
    grouped: dict[str, list[tuple[HourStamp, float]]] = {}
    for path in paths:
        for sid, stamp, param, value in read_records_csv(path):
            if param is not parameter:
                raise ParameterMismatch(
                    f"{path}: station {sid!r} row carries {param.value}, expected {parameter.value}"
                )
            grouped.setdefault(sid, []).append((stamp, value))
    if not grouped:
        raise EmptyInput("no station records in the given CSV files")
    return {sid: build_series(recs, sid, parameter) for sid, recs in grouped.items()}


def write_station_csv(series: StationSeries, path: str | Path) -> None:
    """Write a series in the ingestion format (bit-exact value round trip)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        stamp = series.start
        for v in series.values:
            writer.writerow(
                [
                    series.station_id,
                    stamp.year,
                    stamp.month,
                    stamp.day,
                    stamp.hour,
                    series.parameter.value,
                    _format_value(float(v)),
                ]
            )
            stamp = stamp.plus_hours(1)
