"""Synthetic-network generator tests: determinism, signal structure,
corruption accounting, and end-to-end compatibility with QC and features."""

from __future__ import annotations

import numpy as np
import pytest

from stationfill.features import build_dataset
from stationfill.qc import QcRuleSet, apply_qc, apply_qc_network
from stationfill.synthnet import (
    HOURS_PER_YEAR,
    InjectionEvent,
    InjectionLedger,
    SynthConfig,
    corrupt,
    generate_network,
    station_ids,
)
from stationfill.timeseries import SENTINEL, Parameter

QUIET = dict(anomaly_rate=0.0, spike_rate=0.0, stuck_rate=0.0)


def quiet_cfg(years: float = 0.25, **overrides) -> SynthConfig:
    return SynthConfig(years=years, **{**QUIET, **overrides})


class TestGeneration:
    def test_shape_and_ids(self):
        cfg = quiet_cfg()
        network, truth = generate_network(cfg)
        assert network.n_hours == cfg.n_hours == int(0.25 * HOURS_PER_YEAR)
        assert network.target_id == "S0"
        assert network.input_ids == tuple(f"S{i}" for i in range(1, 7))
        assert station_ids() == ("S0", "S1", "S2", "S3", "S4", "S5", "S6")
        assert truth.station_id == "S0"
        np.testing.assert_array_equal(truth.values, network.target_values())
        assert network.target_series.missing_fraction == 0.0
        assert not (network.inputs_matrix() == SENTINEL).any()

    def test_seed_determinism(self):
        cfg = quiet_cfg(seed=5)
        a, truth_a = generate_network(cfg)
        b, truth_b = generate_network(cfg)
        np.testing.assert_array_equal(truth_a.values, truth_b.values)
        np.testing.assert_array_equal(a.inputs_matrix(), b.inputs_matrix())
        c, _ = generate_network(quiet_cfg(seed=6))
        assert not np.array_equal(a.target_values(), c.target_values())

    def test_degenerate_config_makes_identical_stations(self):
        cfg = quiet_cfg(
            station_noise_std=0.0,
            station_offsets=(0.0,) * 7,
            nonlinear_coupling_strength=0.0,
        )
        network, _ = generate_network(cfg)
        target = network.target_values()
        for col in network.inputs_matrix().T:
            np.testing.assert_array_equal(col, target)

    def test_seasonal_and_diurnal_extremes(self):
        cfg = quiet_cfg(
            years=1.0,
            shared_noise_std=0.0,
            station_noise_std=0.0,
            station_offsets=(0.0,) * 7,
            nonlinear_coupling_strength=0.0,
        )
        network, _ = generate_network(cfg)
        v = network.target_values()
        # Coldest value at the very start (annual and diurnal minima coincide).
        assert v[0] == cfg.base_level - cfg.annual_amplitude - cfg.diurnal_amplitude
        assert v.min() == v[0]
        peak = cfg.base_level + cfg.annual_amplitude + cfg.diurnal_amplitude
        assert abs(v.max() - peak) < 0.05
        assert int(np.argmax(v)) % 24 == 12  # warmest hour is midday
        assert abs(int(np.argmax(v)) - HOURS_PER_YEAR / 2) < 400  # ... in midsummer

    def test_neighbors_strongly_correlated_with_target(self):
        network, _ = generate_network(SynthConfig(years=1.0, **QUIET))
        target = network.target_values()
        for col in network.inputs_matrix().T:
            corr = float(np.corrcoef(target, col)[0, 1])
            assert corr > 0.9, f"neighbor correlation {corr:.3f}"

    def test_humidity_defaults_clip_to_physical_range(self):
        cfg = SynthConfig.for_parameter(Parameter.RELATIVE_HUMIDITY, years=1.0, **QUIET)
        assert cfg.base_level == 70.0
        network, _ = generate_network(cfg)
        vals = np.concatenate([network.target_values(), network.inputs_matrix().ravel()])
        assert vals.max() <= 100.0
        assert vals.min() >= 0.0
        assert (vals == 100.0).any()  # the ceiling actually engaged

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(n_stations=6)
        with pytest.raises(ValueError):
            SynthConfig(years=0.0)
        with pytest.raises(ValueError):
            SynthConfig(shared_ar1_rho=1.0)
        with pytest.raises(ValueError):
            SynthConfig(station_offsets=(0.0, 1.0))
        with pytest.raises(ValueError):
            SynthConfig(anomaly_rate=1.0)

    def test_clean_network_builds_full_dataset(self):
        cfg = quiet_cfg()
        network, _ = generate_network(cfg)
        ds = build_dataset(network)
        assert ds.n_rows == cfg.n_hours - 2  # only the two lag warm-up hours drop
        assert np.all(ds.lai == 1.0)


class TestCorruption:
    def test_zero_rates_change_nothing(self):
        network, _ = generate_network(quiet_cfg())
        corrupted, ledger = corrupt(network, quiet_cfg())
        np.testing.assert_array_equal(corrupted.target_values(), network.target_values())
        np.testing.assert_array_equal(corrupted.inputs_matrix(), network.inputs_matrix())
        assert ledger.events == []

    def test_seed_determinism(self):
        cfg = SynthConfig(years=0.5, seed=3)
        network, _ = generate_network(cfg)
        a, ledger_a = corrupt(network, cfg)
        b, ledger_b = corrupt(network, cfg)
        np.testing.assert_array_equal(a.target_values(), b.target_values())
        assert ledger_a.events == ledger_b.events

    def test_gap_hours_are_sentinel(self):
        cfg = SynthConfig(
            years=0.5, anomaly_rate=0.03, gap_mean_hours=6.0, spike_rate=0.0, stuck_rate=0.0
        )
        network, _ = generate_network(cfg)
        corrupted, ledger = corrupt(network, cfg)
        for sid in ("S0", "S3"):
            hours = ledger.hours("gap", sid)
            assert hours.size > 0
            assert np.all(corrupted.series[sid].values[hours] == SENTINEL)

    def test_spikes_shift_by_exact_magnitude(self):
        cfg = SynthConfig(years=0.5, anomaly_rate=0.0, stuck_rate=0.0, spike_rate=0.002)
        network, _ = generate_network(cfg)
        corrupted, ledger = corrupt(network, cfg)
        clean = network.target_values()
        dirty = corrupted.target_values()
        hours = ledger.hours("spike", "S0")
        assert hours.size > 0
        np.testing.assert_allclose(
            np.abs(dirty[hours] - clean[hours]),
            np.full(hours.size, cfg.spike_magnitude),
            atol=1e-12,
        )
        others = np.setdiff1d(np.arange(network.n_hours), hours)
        np.testing.assert_array_equal(dirty[others], clean[others])

    def test_stuck_runs_hold_the_first_value(self):
        cfg = SynthConfig(years=0.5, anomaly_rate=0.0, spike_rate=0.0, stuck_rate=0.01)
        network, _ = generate_network(cfg)
        corrupted, ledger = corrupt(network, cfg)
        stuck_events = [e for e in ledger.events if e.kind == "stuck" and e.station_id == "S2"]
        assert stuck_events
        vals = corrupted.series["S2"].values
        clean = network.series["S2"].values
        for e in stuck_events:
            np.testing.assert_array_equal(
                vals[e.start : e.start + e.length],
                np.full(e.length, clean[e.start]),
            )

    def test_sentinel_fraction_tracks_anomaly_rate(self):
        cfg = SynthConfig(
            years=100000 / HOURS_PER_YEAR,
            anomaly_rate=0.03,
            gap_mean_hours=6.0,  # short runs keep the fraction estimate tight
            spike_rate=0.0,
            stuck_rate=0.0,
        )
        network, _ = generate_network(cfg)
        corrupted, _ = corrupt(network, cfg)
        frac = float(np.mean(corrupted.target_values() == SENTINEL))
        assert abs(frac - cfg.anomaly_rate) < 0.005, f"sentinel fraction {frac:.4f}"

    def test_qc_recovers_injected_spikes(self):
        cfg = SynthConfig(
            years=1.0, seed=11, anomaly_rate=0.03, gap_mean_hours=6.0, spike_rate=0.001
        )
        network, _ = generate_network(cfg)
        corrupted, ledger = corrupt(network, cfg)
        cleaned, _ = apply_qc(corrupted.series["S0"], QcRuleSet.default_for(cfg.parameter))

        gap_hours = set(ledger.hours("gap", "S0").tolist())
        candidates = [
            h
            for h in ledger.hours("spike", "S0").tolist()
            if h > 0 and not {h - 1, h, h + 1} & gap_hours
        ]
        assert len(candidates) >= 5
        caught = sum(1 for h in candidates if cleaned.values[h] == SENTINEL)
        recall = caught / len(candidates)
        assert recall >= 0.95, f"spike recall {recall:.2f}"

    def test_network_qc_runs_after_corruption(self):
        cfg = SynthConfig(years=0.25, seed=13)
        network, _ = generate_network(cfg)
        corrupted, _ = corrupt(network, cfg)
        cleaned, reports = apply_qc_network(corrupted, QcRuleSet.default_for(cfg.parameter))
        assert [r.station_id for r in reports] == list(("S0", *network.input_ids))
        assert (
            cleaned.target_series.missing_fraction
            >= corrupted.target_series.missing_fraction
        )
        for r in reports:
            assert r.newly_flagged >= 0


class TestLedger:
    def test_hours_filters_and_sorts(self):
        ledger = InjectionLedger(
            events=[
                InjectionEvent("S1", "gap", 10, 3),
                InjectionEvent("S0", "gap", 5, 2),
                InjectionEvent("S0", "spike", 2, 1),
                InjectionEvent("S0", "gap", 6, 2),  # overlaps the first gap
            ]
        )
        np.testing.assert_array_equal(ledger.hours("gap", "S0"), [5, 6, 7])
        np.testing.assert_array_equal(ledger.hours("gap", "S1"), [10, 11, 12])
        np.testing.assert_array_equal(ledger.hours("gap"), [5, 6, 7, 10, 11, 12])
        np.testing.assert_array_equal(ledger.hours("spike", "S1"), [])
        assert ledger.count("gap") == 3
        assert ledger.count("spike") == 1
        assert ledger.count("stuck") == 0
