"""Seeded synthetic station networks with controllable anomalies.

The generator builds seven co-located stations (one target + six inputs)
sharing an annual sinusoid, a diurnal sinusoid and an AR(1) weather component,
plus per-station offsets and noise. The target additionally carries a mild
nonlinear term — a tanh of the centered, scaled neighbor average — which a
purely linear model cannot fit exactly. ``corrupt`` then injects the three
anomaly families the QC pass is built to catch (sentinel gap blocks, spikes,
stuck runs) and returns a ledger of everything it did, so recall can be
measured against ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .timeseries import (
    SENTINEL,
    HourStamp,
    Parameter,
    StationNetwork,
    StationSeries,
    align_network,
)

HOURS_PER_YEAR = 8760
N_STATIONS_TOTAL = 7

_DEFAULT_OFFSETS = (0.0, 0.8, -0.8, 0.4, -0.4, 1.2, -1.2)


@dataclass(frozen=True)
class SynthConfig:
    years: float = 4.0
    parameter: Parameter = Parameter.TEMPERATURE
    seed: int = 0
    start: HourStamp = HourStamp(2001, 1, 1, 0)
    n_stations: int = N_STATIONS_TOTAL

    base_level: float = 12.0
    annual_amplitude: float = 12.0
    diurnal_amplitude: float = 5.0
    shared_ar1_rho: float = 0.95
    shared_noise_std: float = 2.0
    station_noise_std: float = 0.5
    station_offsets: tuple[float, ...] | None = None
    nonlinear_coupling_strength: float = 0.3

    # Corruption rates (fractions of hours, per station). The defaults trade
    # missing mass for event frequency: ~2 % of hours sit in long, rare gap
    # blocks, so a multi-year run still contains whole clean weeks for the
    # extreme-window test-period picker to choose from.
    anomaly_rate: float = 0.02  # expected sentinel-gap fraction
    spike_rate: float = 0.0001
    stuck_rate: float = 0.002
    gap_mean_hours: float = 48.0
    stuck_run_hours: int = 30
    spike_magnitude: float = 30.0

    def __post_init__(self):
        if self.n_stations != N_STATIONS_TOTAL:
            raise ValueError(f"networks are fixed at {N_STATIONS_TOTAL} stations")
        if self.years <= 0:
            raise ValueError("years must be positive")
        if not 0.0 <= self.shared_ar1_rho < 1.0:
            raise ValueError("shared_ar1_rho must be in [0, 1)")
        offs = self.station_offsets
        if offs is not None and len(offs) != N_STATIONS_TOTAL:
            raise ValueError(f"station_offsets needs {N_STATIONS_TOTAL} entries")
        for rate in (self.anomaly_rate, self.spike_rate, self.stuck_rate):
            if not 0.0 <= rate < 1.0:
                raise ValueError("anomaly rates must be in [0, 1)")

    @property
    def n_hours(self) -> int:
        return int(round(self.years * HOURS_PER_YEAR))

    @property
    def offsets(self) -> tuple[float, ...]:
        return self.station_offsets if self.station_offsets is not None else _DEFAULT_OFFSETS

    @classmethod
    def for_parameter(cls, parameter: Parameter, **overrides) -> "SynthConfig":
        """Defaults retuned to the parameter's scale."""
        if parameter is Parameter.RELATIVE_HUMIDITY:
            base = dict(
                parameter=parameter,
                base_level=70.0,
                annual_amplitude=12.0,
                diurnal_amplitude=8.0,
                shared_noise_std=3.0,
                station_noise_std=1.0,
                spike_magnitude=120.0,
            )
        else:
            base = dict(parameter=parameter)
        base.update(overrides)
        return cls(**base)


def station_ids() -> tuple[str, ...]:
    return tuple(f"S{i}" for i in range(N_STATIONS_TOTAL))


def generate_network(cfg: SynthConfig) -> tuple[StationNetwork, StationSeries]:
    """Return (clean aligned network, pristine copy of the target series).

    The truth series is what ``corrupt`` never sees — imputation experiments
    score against it.
    """
    n = cfg.n_hours
    rng = np.random.default_rng(cfg.seed)
    t = np.arange(n, dtype=np.float64)

    # Cosine phases put the annual minimum at the start (Jan 1) and the
    # diurnal minimum at midnight.
    annual = -cfg.annual_amplitude * np.cos(2.0 * np.pi * t / HOURS_PER_YEAR)
    diurnal = -cfg.diurnal_amplitude * np.cos(2.0 * np.pi * t / 24.0)

    innovations = rng.normal(0.0, cfg.shared_noise_std, size=n)
    shared = lfilter([1.0], [1.0, -cfg.shared_ar1_rho], innovations)

    offsets = cfg.offsets
    noises = [rng.normal(0.0, cfg.station_noise_std, size=n) for _ in range(N_STATIONS_TOTAL)]

    seasonal = cfg.base_level + annual + diurnal
    inputs_values = [
        seasonal + offsets[s] + shared + noises[s] for s in range(1, N_STATIONS_TOTAL)
    ]

    neighbor_avg = np.mean(inputs_values, axis=0)
    dev = neighbor_avg - (seasonal + float(np.mean(offsets[1:])))
    if cfg.shared_ar1_rho > 0.0:
        ar_sd = cfg.shared_noise_std / np.sqrt(1.0 - cfg.shared_ar1_rho**2)
    else:
        ar_sd = cfg.shared_noise_std
    ar_sd = max(ar_sd, 1e-12)
    nonlinear = cfg.nonlinear_coupling_strength * ar_sd * np.tanh(dev / ar_sd)

    target_values = seasonal + offsets[0] + shared + noises[0] + nonlinear

    if cfg.parameter is Parameter.RELATIVE_HUMIDITY:
        lo, hi = cfg.parameter.plausible_range
        target_values = np.clip(target_values, lo, hi)
        inputs_values = [np.clip(v, lo, hi) for v in inputs_values]

    ids = station_ids()
    target = StationSeries(ids[0], cfg.parameter, cfg.start, target_values)
    inputs = [
        StationSeries(ids[s], cfg.parameter, cfg.start, inputs_values[s - 1])
        for s in range(1, N_STATIONS_TOTAL)
    ]
    network = align_network(target, inputs)
    truth = StationSeries(ids[0], cfg.parameter, cfg.start, target_values)
    return network, truth


@dataclass(frozen=True)
class InjectionEvent:
    station_id: str
    kind: str  # "gap" | "spike" | "stuck"
    start: int  # hour offset into the series
    length: int


@dataclass
class InjectionLedger:
    """Ground truth of what ``corrupt`` injected, for recall measurements."""

    events: list[InjectionEvent]

    def hours(self, kind: str, station_id: str | None = None) -> np.ndarray:
        """Sorted unique hour offsets touched by events of ``kind``."""
        hit: list[int] = []
        for ev in self.events:
            if ev.kind != kind:
                continue
            if station_id is not None and ev.station_id != station_id:
                continue
            hit.extend(range(ev.start, ev.start + ev.length))
        return np.unique(np.asarray(hit, dtype=np.int64))

    def count(self, kind: str) -> int:
        return sum(1 for ev in self.events if ev.kind == kind)


def corrupt(network: StationNetwork, cfg: SynthConfig) -> tuple[StationNetwork, InjectionLedger]:
    """Inject stuck runs, spikes and sentinel gap blocks into every station.

    Rates of zero leave the network untouched. Later anomaly families
    overwrite earlier ones where they collide (gaps win), but the ledger
    records every injection site.
    """
    rng = np.random.default_rng([cfg.seed, 0xC0])
    n = network.n_hours
    events: list[InjectionEvent] = []
    replaced: dict[str, StationSeries] = {}

    for sid in (network.target_id, *network.input_ids):
        vals = network.series[sid].values.copy()

        if cfg.stuck_rate > 0.0:
            p_start = cfg.stuck_rate / max(cfg.stuck_run_hours, 1)
            starts = np.flatnonzero(rng.random(n) < p_start)
            for s in starts:
                end = min(s + cfg.stuck_run_hours, n)
                if vals[s] != SENTINEL:
                    vals[s:end] = vals[s]
                    events.append(InjectionEvent(sid, "stuck", int(s), int(end - s)))

        if cfg.spike_rate > 0.0:
            hits = np.flatnonzero(rng.random(n) < cfg.spike_rate)
            signs = np.where(rng.random(hits.size) < 0.5, -1.0, 1.0)
            for h, sign in zip(hits, signs):
                if vals[h] != SENTINEL:
                    vals[h] += sign * cfg.spike_magnitude
                    events.append(InjectionEvent(sid, "spike", int(h), 1))

        if cfg.anomaly_rate > 0.0:
            p_start = cfg.anomaly_rate / max(cfg.gap_mean_hours, 1.0)
            starts = np.flatnonzero(rng.random(n) < p_start)
            lengths = rng.geometric(1.0 / cfg.gap_mean_hours, size=starts.size)
            for s, length in zip(starts, lengths):
                end = min(s + int(length), n)
                vals[s:end] = SENTINEL
                events.append(InjectionEvent(sid, "gap", int(s), int(end - s)))

        replaced[sid] = network.series[sid].with_values(vals)

    return network.with_series(replaced), InjectionLedger(events=events)
