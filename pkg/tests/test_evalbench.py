"""Missing-station benchmark tests: mask enumeration, gap injection,
grid evaluation with duck-typed models, and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pytest

from stationfill.errors import EmptyDataset, GapTooLong, ParameterMismatch
from stationfill.evalbench import (
    GapPlacement,
    GapSpec,
    MissingMask,
    enumerate_masks,
    evaluate,
    inject_missing,
    render_report,
)
from stationfill.features import LAI_START, N_FEATURES, Dataset
from stationfill.timeseries import SENTINEL, Parameter

from test_models_common import make_dataset


def make_date_keyed_dataset(n: int, seed: int = 0) -> Dataset:
    """Targets derivable from the date columns, which injection never touches."""
    ds = make_dataset(n, seed=seed)
    y = ds.X[:, 18] + ds.X[:, 19] / 100.0 + ds.X[:, 20] / 1000.0
    return Dataset(
        X=ds.X,
        y=y,
        epoch_hours=ds.epoch_hours,
        parameter=ds.parameter,
        station_ids=ds.station_ids,
    )


@dataclass
class FakeModel:
    kind: str
    parameter: Parameter
    fn: Callable[[np.ndarray], np.ndarray]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.fn(X)


def date_oracle(parameter=Parameter.TEMPERATURE) -> FakeModel:
    return FakeModel(
        kind="ORACLE",
        parameter=parameter,
        fn=lambda X: X[:, 18] + X[:, 19] / 100.0 + X[:, 20] / 1000.0,
    )


class TestMaskEnumeration:
    def test_sixty_four_distinct_masks(self):
        masks = enumerate_masks()
        assert len(masks) == 64
        assert {m.to_int() for m in masks} == set(range(64))

    def test_per_k_counts_are_binomial(self):
        counts = [0] * 7
        for m in enumerate_masks():
            counts[m.k] += 1
        assert counts == [1, 6, 15, 20, 15, 6, 1]

    def test_ordered_by_k_then_pattern(self):
        masks = enumerate_masks()
        keys = [(m.k, m.to_int()) for m in masks]
        assert keys == sorted(keys)
        assert masks[0].bits == (0,) * 6
        assert masks[-1].bits == (1,) * 6

    def test_int_round_trip(self):
        for m in enumerate_masks():
            assert MissingMask.from_int(m.to_int()) == m

    def test_validation(self):
        with pytest.raises(ValueError):
            MissingMask(bits=(0, 1, 0, 1, 0))  # five bits
        with pytest.raises(ValueError):
            MissingMask(bits=(0, 1, 2, 0, 0, 0))


class TestInjection:
    def test_empty_mask_changes_nothing(self):
        test = make_dataset(30, seed=4)
        out = inject_missing(test, MissingMask.from_int(0), GapSpec())
        np.testing.assert_array_equal(out.X, test.X)
        assert out.X is not test.X  # mutation-safe copy

    def test_full_period_blanks_masked_station_everywhere(self):
        test = make_dataset(30, seed=5)
        mask = MissingMask(bits=(0, 0, 1, 0, 0, 0))  # third input station
        out = inject_missing(test, mask, GapSpec(placement=GapPlacement.FULL_PERIOD))
        assert np.all(out.X[:, 6:9] == SENTINEL)
        assert np.all(out.X[:, LAI_START + 6 : LAI_START + 9] == 0.0)
        untouched = [c for c in range(18) if c not in (6, 7, 8)]
        np.testing.assert_array_equal(out.X[:, untouched], test.X[:, untouched])
        np.testing.assert_array_equal(out.X[:, 18:21], test.X[:, 18:21])
        np.testing.assert_array_equal(out.y, test.y)

    def test_all_stations_mask_blanks_every_lag(self):
        test = make_dataset(20, seed=6)
        out = inject_missing(test, MissingMask.from_int(63), GapSpec())
        assert np.all(out.X[:, :18] == SENTINEL)
        assert np.all(out.lai == 0.0)

    def test_full_period_idempotent(self):
        test = make_dataset(25, seed=7)
        mask = MissingMask.from_int(0b010101)
        spec = GapSpec()
        once = inject_missing(test, mask, spec)
        twice = inject_missing(once, mask, spec)
        np.testing.assert_array_equal(once.X, twice.X)

    def test_random_block_is_contiguous_and_sized(self):
        test = make_dataset(200, seed=8)
        mask = MissingMask(bits=(1, 0, 0, 0, 0, 0))
        spec = GapSpec(gap_hours=24, placement=GapPlacement.RANDOM_BLOCK, rng_seed=3)
        out = inject_missing(test, mask, spec)
        hit = np.flatnonzero(out.X[:, 0] == SENTINEL)
        assert hit.size == 24
        assert hit[-1] - hit[0] == 23  # contiguous
        np.testing.assert_array_equal(np.diff(hit), np.ones(23, dtype=hit.dtype))

    def test_random_block_seed_determinism(self):
        test = make_dataset(120, seed=9)
        mask = MissingMask.from_int(0b000011)
        a = inject_missing(test, mask, GapSpec(gap_hours=12, placement=GapPlacement.RANDOM_BLOCK, rng_seed=5))
        b = inject_missing(test, mask, GapSpec(gap_hours=12, placement=GapPlacement.RANDOM_BLOCK, rng_seed=5))
        np.testing.assert_array_equal(a.X, b.X)
        c = inject_missing(test, mask, GapSpec(gap_hours=12, placement=GapPlacement.RANDOM_BLOCK, rng_seed=6))
        assert not np.array_equal(a.X, c.X)

    def test_gap_longer_than_period_rejected(self):
        test = make_dataset(10, seed=10)
        mask = MissingMask.from_int(1)
        spec = GapSpec(gap_hours=11, placement=GapPlacement.RANDOM_BLOCK)
        with pytest.raises(GapTooLong):
            inject_missing(test, mask, spec)
        # Exactly the period length is allowed and blanks every row.
        full = inject_missing(
            test, mask, GapSpec(gap_hours=10, placement=GapPlacement.RANDOM_BLOCK)
        )
        assert np.all(full.X[:, 0:3] == SENTINEL)

    def test_empty_period_rejected(self):
        empty = Dataset(
            X=np.empty((0, N_FEATURES)),
            y=np.empty(0),
            epoch_hours=np.empty(0, dtype=np.int64),
            parameter=Parameter.TEMPERATURE,
            station_ids=tuple(f"S{i}" for i in range(1, 7)),
        )
        with pytest.raises(EmptyDataset):
            inject_missing(empty, MissingMask.from_int(0), GapSpec())

    def test_gap_spec_validation(self):
        with pytest.raises(ValueError):
            GapSpec(gap_hours=0)


class TestEvaluate:
    def test_perfect_oracle_scores_zero_everywhere(self):
        tests = [make_date_keyed_dataset(30, seed=11), make_date_keyed_dataset(25, seed=12)]
        report = evaluate([date_oracle()], tests, GapSpec())
        assert len(report.models) == 1
        me = report.models[0]
        assert me.kind == "ORACLE"
        assert len(me.cells) == 64 * 2
        assert all(c.rmse == 0.0 for c in me.cells)
        assert me.worst == {k: 0.0 for k in range(7)}

    def test_worst_is_max_over_cells(self):
        tests = [make_dataset(40, seed=13)]
        lag_reader = FakeModel(
            kind="LAG0", parameter=Parameter.TEMPERATURE, fn=lambda X: X[:, 2]
        )
        report = evaluate([lag_reader], tests, GapSpec())
        me = report.models[0]
        rederived: dict[int, float] = {}
        for c in me.cells:
            rederived[c.k] = max(rederived.get(c.k, -np.inf), c.rmse)
        assert rederived == me.worst
        assert me.worst[1] > me.worst[0]  # masking its input station hurts it

    def test_inputs_not_mutated(self):
        test = make_dataset(30, seed=14)
        before = test.X.copy()
        evaluate([date_oracle()], [test], GapSpec())
        np.testing.assert_array_equal(test.X, before)

    def test_traces_only_for_clean_mask(self):
        tests = [make_date_keyed_dataset(20, seed=15), make_date_keyed_dataset(20, seed=16)]
        report = evaluate([date_oracle(), date_oracle()], tests, GapSpec())
        assert len(report.traces) == 4  # 2 models x 2 periods
        assert {(t.kind, t.period) for t in report.traces} == {("ORACLE", 0), ("ORACLE", 1)}

    def test_no_tests_rejected(self):
        with pytest.raises(EmptyDataset):
            evaluate([date_oracle()], [], GapSpec())

    def test_parameter_mismatch_rejected(self):
        tests = [make_dataset(20, seed=17)]  # TEMPERATURE data
        humid = date_oracle(parameter=Parameter.RELATIVE_HUMIDITY)
        with pytest.raises(ParameterMismatch):
            evaluate([humid], tests, GapSpec())

    def test_model_order_preserved(self):
        tests = [make_date_keyed_dataset(20, seed=18)]
        a = FakeModel(kind="A", parameter=Parameter.TEMPERATURE, fn=lambda X: X[:, 18])
        b = FakeModel(kind="B", parameter=Parameter.TEMPERATURE, fn=lambda X: X[:, 19])
        report = evaluate([a, b], tests, GapSpec())
        assert [m.kind for m in report.models] == ["A", "B"]


class TestRenderReport:
    @pytest.fixture()
    def rendered(self, tmp_path):
        tests = [make_date_keyed_dataset(24, seed=19)]
        report = evaluate([date_oracle()], tests, GapSpec(gap_hours=6))
        paths = render_report(report, tmp_path)
        return report, paths, tmp_path

    def test_artifact_set(self, rendered):
        _, paths, out = rendered
        names = {p.name for p in paths}
        assert "eval_report.json" in names
        assert "eval_worst.csv" in names
        assert "predictions_ORACLE_p0.csv" in names
        assert all(p.exists() for p in paths)

    def test_json_shape(self, rendered):
        report, _, out = rendered
        doc = json.loads((out / "eval_report.json").read_text())
        assert set(doc) == {"parameter", "gap", "periods", "models"}
        assert doc["parameter"] == "T"
        assert doc["gap"] == {"gap_hours": 6, "placement": "full_period", "rng_seed": 0}
        assert len(doc["periods"]) == 1
        model = doc["models"][0]
        assert set(model) == {"kind", "cells", "worst"}
        assert len(model["cells"]) == 64
        assert [w["k"] for w in model["worst"]] == list(range(7))

    def test_csv_matches_worst_dict(self, rendered):
        report, _, out = rendered
        lines = (out / "eval_worst.csv").read_text().splitlines()
        header = lines[0].split(",")
        assert header == (
            ["method"] + [f"{k} missing" for k in range(6, 0, -1)] + ["no missing"]
        )
        row = lines[1].split(",")
        assert row[0] == "ORACLE"
        expected = [repr(report.models[0].worst[k]) for k in range(6, -1, -1)]
        assert row[1:] == expected

    def test_trace_csv_rows(self, rendered):
        report, _, out = rendered
        lines = (out / "predictions_ORACLE_p0.csv").read_text().splitlines()
        assert lines[0] == "hour,measured,predicted"
        assert len(lines) == 1 + 24
        _, measured, predicted = lines[1].split(",")
        assert float(measured) == float(predicted)  # the oracle is exact

    def test_rendering_is_byte_deterministic(self, rendered, tmp_path):
        report, _, out = rendered
        second = tmp_path / "again"
        render_report(report, second)
        assert (out / "eval_report.json").read_bytes() == (second / "eval_report.json").read_bytes()
        assert (out / "eval_worst.csv").read_bytes() == (second / "eval_worst.csv").read_bytes()
