"""Quality control: replace implausible readings with the sentinel.

Three checks run in a fixed order — out-of-range, spike, flatline — and a
reading is attributed to the first check that rejects it. Rejected readings
become the sentinel immediately, so later checks see them as missing; this is
what makes the whole pass idempotent (a second run finds nothing new) and
monotone (QC never un-flags a value).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyNetwork
from .timeseries import SENTINEL, HourStamp, Parameter, StationNetwork, StationSeries

N_INPUT_STATIONS = 6


@dataclass(frozen=True)
class QcRuleSet:
    """Thresholds for one parameter's QC pass.

    flatline_exempt_value marks a plateau that may persist indefinitely
    (humidity saturated at exactly 100 %); None disables the exemption.
    """

    range_min: float
    range_max: float
    max_step: float
    flatline_len: int = 24
    flatline_exempt_value: float | None = None

    def __post_init__(self):
        if not self.range_min < self.range_max:
            raise ValueError(f"range_min {self.range_min} must be < range_max {self.range_max}")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")
        if self.flatline_len < 3:
            raise ValueError("flatline_len must be at least 3")

    @classmethod
    def default_for(cls, parameter: Parameter) -> "QcRuleSet":
        lo, hi = parameter.plausible_range
        return cls(
            range_min=lo,
            range_max=hi,
            max_step=parameter.default_max_step,
            flatline_len=24,
            flatline_exempt_value=parameter.saturation_value,
        )


@dataclass(frozen=True)
class QcReport:
    """Per-station tally of what one QC pass did."""

    station_id: str
    total_hours: int
    already_missing: int
    out_of_range: int
    spike: int
    flatline: int
    missing_fraction: float  # after the pass

    @property
    def newly_flagged(self) -> int:
        return self.out_of_range + self.spike + self.flatline

    def to_dict(self) -> dict:
        return {
            "station_id": self.station_id,
            "total_hours": self.total_hours,
            "already_missing": self.already_missing,
            "out_of_range": self.out_of_range,
            "spike": self.spike,
            "flatline": self.flatline,
            "missing_fraction": self.missing_fraction,
        }


def apply_qc(series: StationSeries, rules: QcRuleSet) -> tuple[StationSeries, QcReport]:
    """Run the three checks over one series and return (cleaned, report).

    Counts are disjoint by construction: each reading is rejected at most once,
    by the first rule that fires on it.
    """
    v = series.values.copy()
    n = v.size
    already_missing = int((v == SENTINEL).sum())

    # 1) physical plausibility envelope
    live = v != SENTINEL
    out = live & ((v < rules.range_min) | (v > rules.range_max))
    n_range = int(out.sum())
    v[out] = SENTINEL

    # 2) spikes: |step| from the previous surviving reading too large.
    # Sequential on purpose — a rejected reading becomes sentinel at once, so
    # the pair it forms with its successor is skipped and a one-hour spike
    # costs exactly one reading.
    n_spike = 0
    prev = v[0]
    for t in range(1, n):
        cur = v[t]
        if cur != SENTINEL and prev != SENTINEL and abs(cur - prev) > rules.max_step:
            v[t] = SENTINEL
            n_spike += 1
        prev = v[t]

    # 3) flatlines: runs of one identical value. A run of length L >=
    # flatline_len keeps its first flatline_len - 1 readings and loses the
    # rest (the run only becomes implausible once it reaches the threshold).
    n_flat = 0
    i = 0
    while i < n:
        if v[i] == SENTINEL:
            i += 1
            continue
        j = i + 1
        while j < n and v[j] == v[i]:
            j += 1
        run = j - i
        exempt = (
            rules.flatline_exempt_value is not None and v[i] == rules.flatline_exempt_value
        )
        if run >= rules.flatline_len and not exempt:
            cut = i + rules.flatline_len - 1
            v[cut:j] = SENTINEL
            n_flat += run - rules.flatline_len + 1
        i = j

    cleaned = series.with_values(v)
    report = QcReport(
        station_id=series.station_id,
        total_hours=n,
        already_missing=already_missing,
        out_of_range=n_range,
        spike=n_spike,
        flatline=n_flat,
        missing_fraction=float((v == SENTINEL).mean()),
    )
    return cleaned, report


def apply_qc_network(
    network: StationNetwork, rules: QcRuleSet
) -> tuple[StationNetwork, list[QcReport]]:
    """QC every member series of a network (target first, then inputs)."""
    cleaned: dict[str, StationSeries] = {}
    reports: list[QcReport] = []
    for sid in (network.target_id, *network.input_ids):
        series, report = apply_qc(network.series[sid], rules)
        cleaned[sid] = series
        reports.append(report)
    return network.with_series(cleaned), reports


def exclude_date_range(
    series: StationSeries, start: HourStamp, end: HourStamp
) -> tuple[StationSeries, int]:
    """Blank a closed stamp range to sentinel (manual regime exclusion).

    Sensor regime shifts (recalibration, relocation) can only be spotted by a
    human; this applies such a verdict. Returns the series plus the number of
    readings newly turned into sentinels. Ranges outside the series are a
    no-op, not an error.
    """
    if end < start:
        raise ValueError(f"exclusion range ends ({end}) before it starts ({start})")
    lo = max(series.start.hours_until(start), 0)
    hi = min(series.start.hours_until(end), series.n_hours - 1)
    if hi < lo:
        return series, 0
    v = series.values.copy()
    n_new = int((v[lo : hi + 1] != SENTINEL).sum())
    v[lo : hi + 1] = SENTINEL
    return series.with_values(v), n_new


@dataclass(frozen=True)
class MissingProbabilityTable:
    """How often k of the six input stations are missing simultaneously."""

    parameter: Parameter
    total_hours: int
    percent: tuple[float, ...]  # index k = 0..6, sums to 100

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter.value,
            "total_hours": self.total_hours,
            "percent": {str(k): p for k, p in enumerate(self.percent)},
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def missing_probabilities(network: StationNetwork) -> MissingProbabilityTable:
    """Histogram (in percent) of the per-hour count of missing input stations."""
    if network.n_hours == 0:
        raise EmptyNetwork("network covers zero hours")
    counts = (network.inputs_matrix() == SENTINEL).sum(axis=1)
    hist = np.bincount(counts, minlength=N_INPUT_STATIONS + 1).astype(np.float64)
    percent = hist / network.n_hours * 100.0
    return MissingProbabilityTable(
        parameter=network.parameter,
        total_hours=network.n_hours,
        percent=tuple(float(p) for p in percent),
    )
