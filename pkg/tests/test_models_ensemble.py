"""Bagged-forest tests: degenerate single-tree equality, averaging, seeding."""

from __future__ import annotations

import json

import numpy as np
import pytest

from stationfill.models.ensemble import (
    EnsembleConfig,
    fit_forest,
    forest_from_dict,
    forest_to_dict,
    predict_forest,
)
from stationfill.models.tree import grow_tree, predict_tree
from test_models_tree import unpack


@pytest.fixture()
def toy():
    rng = np.random.default_rng(11)
    Z = rng.normal(size=(80, 4))
    y = Z[:, 0] * 2.0 - Z[:, 2] + rng.normal(scale=0.1, size=80)
    return Z, y


class TestDegenerateModes:
    def test_one_tree_without_bootstrap_equals_plain_tree(self, toy):
        Z, y = toy
        cfg = EnsembleConfig(n_trees=1, bootstrap=False, min_leaf=3)
        forest = fit_forest(Z, y, cfg, seed=0)
        single = grow_tree(Z, y, min_leaf=3)
        assert unpack(forest.trees[0]) == unpack(single)
        np.testing.assert_array_equal(
            predict_forest(forest, Z), predict_tree(single, Z)
        )

    def test_no_bootstrap_trees_are_identical(self, toy):
        Z, y = toy
        forest = fit_forest(Z, y, EnsembleConfig(n_trees=4, bootstrap=False), seed=1)
        first = unpack(forest.trees[0])
        assert all(unpack(t) == first for t in forest.trees[1:])


class TestAveraging:
    def test_prediction_is_member_mean(self, toy):
        Z, y = toy
        forest = fit_forest(Z, y, EnsembleConfig(n_trees=5, min_leaf=4), seed=2)
        queries = Z[:17]
        member = np.stack([predict_tree(t, queries) for t in forest.trees])
        np.testing.assert_allclose(
            predict_forest(forest, queries), member.mean(axis=0), rtol=0, atol=1e-12
        )

    def test_prediction_within_member_envelope(self, toy):
        Z, y = toy
        forest = fit_forest(Z, y, EnsembleConfig(n_trees=7), seed=3)
        queries = np.random.default_rng(4).normal(size=(25, 4))
        member = np.stack([predict_tree(t, queries) for t in forest.trees])
        out = predict_forest(forest, queries)
        assert np.all(out >= member.min(axis=0) - 1e-12)
        assert np.all(out <= member.max(axis=0) + 1e-12)


class TestSeeding:
    def test_same_seed_bit_identical(self, toy):
        Z, y = toy
        cfg = EnsembleConfig(n_trees=6, min_leaf=2)
        a = fit_forest(Z, y, cfg, seed=42)
        b = fit_forest(Z, y, cfg, seed=42)
        assert [unpack(t) for t in a.trees] == [unpack(t) for t in b.trees]

    def test_different_seeds_differ(self, toy):
        Z, y = toy
        cfg = EnsembleConfig(n_trees=6, min_leaf=2)
        a = fit_forest(Z, y, cfg, seed=0)
        b = fit_forest(Z, y, cfg, seed=1)
        assert [unpack(t) for t in a.trees] != [unpack(t) for t in b.trees]

    def test_bootstrap_fraction_shrinks_resample(self, toy):
        Z, y = toy
        forest = fit_forest(
            Z, y, EnsembleConfig(n_trees=2, bootstrap_fraction=0.25, min_leaf=1), seed=5
        )
        # 20-row resamples cannot produce more than 20 leaves.
        assert all(t.n_leaves <= 20 for t in forest.trees)


class TestValidationAndPersistence:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            EnsembleConfig(n_trees=0)
        with pytest.raises(ValueError):
            EnsembleConfig(bootstrap_fraction=0.0)
        with pytest.raises(ValueError):
            EnsembleConfig(bootstrap_fraction=1.5)
        with pytest.raises(ValueError):
            EnsembleConfig(min_leaf=0)

    def test_json_round_trip(self, toy):
        Z, y = toy
        forest = fit_forest(Z, y, EnsembleConfig(n_trees=3), seed=6)
        revived = forest_from_dict(json.loads(json.dumps(forest_to_dict(forest))))
        queries = Z[:9]
        np.testing.assert_array_equal(
            predict_forest(forest, queries), predict_forest(revived, queries)
        )
