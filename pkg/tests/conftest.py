"""Shared fixtures: small deterministic networks the whole suite can reuse."""

from __future__ import annotations

import numpy as np
import pytest

from stationfill.timeseries import (
    HourStamp,
    Parameter,
    StationNetwork,
    StationSeries,
    align_network,
)

START = HourStamp(2001, 1, 1, 0)


def make_series(
    values,
    station_id: str = "S0",
    parameter: Parameter = Parameter.TEMPERATURE,
    start: HourStamp = START,
) -> StationSeries:
    return StationSeries(station_id, parameter, start, np.asarray(values, dtype=np.float64))


def make_network(
    columns: np.ndarray,
    parameter: Parameter = Parameter.TEMPERATURE,
    start: HourStamp = START,
) -> StationNetwork:
    """Build a 7-station network from a (n_hours, 7) array; column 0 is the target."""
    columns = np.asarray(columns, dtype=np.float64)
    assert columns.ndim == 2 and columns.shape[1] == 7
    series = [
        make_series(columns[:, i], f"S{i}", parameter, start) for i in range(7)
    ]
    return align_network(series[0], series[1:])


@pytest.fixture
def small_network() -> StationNetwork:
    """400 clean hours of a correlated 7-station diurnal signal."""
    rng = np.random.default_rng(1234)
    n = 400
    t = np.arange(n)
    base = 10.0 - 6.0 * np.cos(2 * np.pi * t / 24.0) + np.cumsum(rng.normal(0, 0.3, n))
    cols = np.column_stack(
        [base + 0.2 * i + rng.normal(0, 0.2, n) for i in range(7)]
    )
    return make_network(cols)
