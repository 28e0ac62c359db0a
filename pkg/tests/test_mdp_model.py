"""MdpModel 构建、校验与文件读写测试"""

import json

import numpy as np
import pytest

from ipi.core.exceptions import (
    DimensionMismatch,
    DuplicateTransition,
    GammaOutOfRange,
    IndexOutOfRange,
    ModelValidationError,
    NegativeProbability,
    RowSumError,
    TooLarge,
)
from ipi.mdp import build_model, model_from_dense, read_model, write_model
from ipi.mdp.model import ROW_SUM_TOL

IDENTITY_TRIPLETS = [(0, 0, 0, 1.0), (1, 0, 1, 1.0)]


class TestBuildModel:
    def test_identity_chain(self):
        model = build_model(2, 1, 0.5, IDENTITY_TRIPLETS, [[1.0], [2.0]])

        assert (model.n, model.m) == (2, 1)
        assert model.cost_bound == 2.0
        np.testing.assert_array_equal(model.transitions[0].toarray(), np.eye(2))

    def test_triplets_in_any_order(self):
        triplets = [(1, 0, 1, 0.5), (0, 0, 0, 1.0), (1, 0, 0, 0.5)]
        model = build_model(2, 1, 0.5, triplets, [[1.0], [-3.0]])

        np.testing.assert_array_equal(model.transitions[0].toarray(), [[1, 0], [0.5, 0.5]])
        assert model.cost_bound == 3.0

    def test_row_sum_error(self):
        triplets = [(0, 0, 0, 1.0), (1, 0, 0, 0.5), (1, 0, 1, 0.4)]
        with pytest.raises(RowSumError):
            build_model(2, 1, 0.5, triplets, [[1.0], [2.0]])

    @pytest.mark.parametrize("gamma", [0.0, 1.0, 1.5, -0.1])
    def test_gamma_out_of_range(self, gamma):
        with pytest.raises(GammaOutOfRange):
            build_model(2, 1, gamma, IDENTITY_TRIPLETS, [[1.0], [2.0]])

    def test_negative_probability(self):
        triplets = [(0, 0, 0, 1.0), (1, 0, 0, -0.5), (1, 0, 1, 1.5)]
        with pytest.raises(NegativeProbability):
            build_model(2, 1, 0.5, triplets, [[1.0], [2.0]])

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            build_model(2, 1, 0.5, [(0, 0, 2, 1.0), (1, 0, 1, 1.0)], [[1.0], [2.0]])
        with pytest.raises(IndexOutOfRange):
            build_model(2, 1, 0.5, [(0, 1, 0, 1.0), (1, 0, 1, 1.0)], [[1.0], [2.0]])

    def test_duplicate_transition(self):
        triplets = [(0, 0, 0, 0.5), (0, 0, 0, 0.5), (1, 0, 1, 1.0)]
        with pytest.raises(DuplicateTransition):
            build_model(2, 1, 0.5, triplets, [[1.0], [2.0]])

    def test_cost_table_shape(self):
        with pytest.raises(DimensionMismatch):
            build_model(2, 1, 0.5, IDENTITY_TRIPLETS, [[1.0, 0.0], [2.0, 0.0]])

    def test_validation_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            build_model(2, 1, 0.5, [(0, 0, 0, 0.3), (1, 0, 1, 1.0)], [[1.0], [2.0]])

    @pytest.mark.parametrize("gamma", ["abc", None, [0.5]])
    def test_non_numeric_gamma(self, gamma):
        with pytest.raises(GammaOutOfRange):
            build_model(2, 1, gamma, IDENTITY_TRIPLETS, [[1.0], [2.0]])

    @pytest.mark.parametrize("n, m", [("two", 1), (2, None), (2.5, 1), (0, 1)])
    def test_invalid_counts(self, n, m):
        with pytest.raises(ModelValidationError):
            build_model(n, m, 0.5, IDENTITY_TRIPLETS, [[1.0], [2.0]])

    def test_non_numeric_triplets(self):
        with pytest.raises(ModelValidationError):
            build_model(2, 1, 0.5, [("x", 0, "y", "z"), (1, 0, 1, 1.0)], [[1.0], [2.0]])

    def test_wrong_entry_width_is_not_repacked(self):
        # 12 个数可以整形成 3×4，但每条记录只有三个字段
        triplets = [(0, 0, 1.0), (1, 0, 1.0), (0, 1, 0.0), (1, 1, 0.0)]
        with pytest.raises(ModelValidationError, match=r"\(k, 4\)"):
            build_model(2, 1, 0.5, triplets, [[1.0], [2.0]])

    def test_ragged_entries(self):
        with pytest.raises(ModelValidationError):
            build_model(2, 1, 0.5, [(0, 0, 0, 1.0), (1, 0, 1)], [[1.0], [2.0]])

    def test_non_numeric_costs(self):
        with pytest.raises(ModelValidationError):
            build_model(2, 1, 0.5, IDENTITY_TRIPLETS, [["a"], [2.0]])

    def test_row_sum_tolerance_boundary(self):
        inside = [(0, 0, 0, 1.0), (1, 0, 0, 0.5), (1, 0, 1, 0.5 + 0.5 * ROW_SUM_TOL)]
        outside = [(0, 0, 0, 1.0), (1, 0, 0, 0.5), (1, 0, 1, 0.5 + 5.0 * ROW_SUM_TOL)]

        model = build_model(2, 1, 0.5, inside, [[1.0], [2.0]])
        row_sums = np.asarray(model.transitions[0].sum(axis=1)).ravel()
        np.testing.assert_allclose(row_sums, [1.0, 1.0], atol=ROW_SUM_TOL)
        with pytest.raises(RowSumError):
            build_model(2, 1, 0.5, outside, [[1.0], [2.0]])


class TestModelImmutability:
    def test_arrays_are_read_only(self, e1_model):
        with pytest.raises(ValueError):
            e1_model.costs[0, 0] = 5.0
        with pytest.raises(ValueError):
            e1_model.transitions[0].data[0] = 0.5

    def test_with_gamma_keeps_data(self, e1_model):
        other = e1_model.with_gamma(0.9)

        assert other.gamma == 0.9
        assert e1_model.gamma == 0.5
        assert other.transitions is e1_model.transitions
        with pytest.raises(GammaOutOfRange):
            e1_model.with_gamma(1.0)

    def test_stacked_rows(self, e1_model):
        stacked = e1_model.stacked.toarray()

        assert stacked.shape == (4, 2)
        np.testing.assert_array_equal(stacked[2:], [[0, 1], [1, 0]])

    def test_model_from_dense_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            model_from_dense(np.ones((1, 2, 3)) / 3, [[1.0], [1.0]], 0.5)


class TestModelFiles:
    def test_json_round_trip(self, e1_model, tmp_path):
        path = write_model(tmp_path / "e1.json", e1_model)
        loaded = read_model(path)

        assert (loaded.n, loaded.m, loaded.gamma) == (2, 2, 0.5)
        np.testing.assert_array_equal(loaded.costs, e1_model.costs)
        for a in range(2):
            np.testing.assert_array_equal(
                loaded.transitions[a].toarray(), e1_model.transitions[a].toarray()
            )

    def test_json_layout(self, identity_chain, tmp_path):
        path = write_model(tmp_path / "chain.json", identity_chain)
        data = json.loads(path.read_text(encoding="utf-8"))

        assert data["n"] == 2
        assert data["transitions"] == [{"action": 0, "triplets": [[0, 0, 1.0], [1, 1, 1.0]]}]
        assert data["costs"] == [[1.0], [2.0]]

    def test_npz_round_trip(self, random_model, tmp_path):
        model = random_model(n=30, m=4, density=0.2, seed=3)
        loaded = read_model(write_model(tmp_path / "random.npz", model))

        np.testing.assert_array_equal(loaded.costs, model.costs)
        for a in range(model.m):
            assert (loaded.transitions[a] != model.transitions[a]).nnz == 0

    def test_duplicate_triplet_in_file(self, tmp_path):
        path = tmp_path / "dup.json"
        path.write_text(
            json.dumps(
                {
                    "n": 1,
                    "m": 1,
                    "gamma": 0.5,
                    "transitions": [{"action": 0, "triplets": [[0, 0, 0.5], [0, 0, 0.5]]}],
                    "costs": [[1.0]],
                }
            ),
            encoding="utf-8",
        )
        with pytest.raises(DuplicateTransition):
            read_model(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "m": 1', encoding="utf-8")
        with pytest.raises(ModelValidationError):
            read_model(path)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text('{"n": 1, "m": 1, "gamma": 0.5}', encoding="utf-8")
        with pytest.raises(ModelValidationError):
            read_model(path)

    def test_json_size_guard(self, e1_model, tmp_path):
        with pytest.raises(TooLarge):
            write_model(tmp_path / "e1.json", e1_model, max_json_nonzeros=1)

    def test_zero_json_limit_is_enforced(self, e1_model, tmp_path):
        with pytest.raises(TooLarge):
            write_model(tmp_path / "e1.json", e1_model, max_json_nonzeros=0)
        assert not (tmp_path / "e1.json").exists()

    def test_json_limit_defaults_to_settings(self, e1_model, tmp_path, monkeypatch):
        monkeypatch.setenv("IPI_IO__MAX_JSON_NONZEROS", "2")
        with pytest.raises(TooLarge):
            write_model(tmp_path / "e1.json", e1_model)

    def test_json_write_leaves_no_temporary_files(self, e1_model, tmp_path):
        target = tmp_path / "e1.json"
        target.write_text("stale", encoding="utf-8")

        write_model(target, e1_model)

        assert [p.name for p in tmp_path.iterdir()] == ["e1.json"]
        assert read_model(target).n == 2

    def test_corrupt_npz(self, tmp_path):
        path = tmp_path / "bad.npz"
        path.write_bytes(b"PK\x03\x04 truncated archive")
        with pytest.raises(ModelValidationError):
            read_model(path)

    def test_npz_missing_arrays(self, tmp_path):
        path = tmp_path / "partial.npz"
        np.savez_compressed(path, shape=np.array([2, 1]), gamma=np.array(0.5))
        with pytest.raises(ModelValidationError):
            read_model(path)

    def test_non_numeric_gamma_in_file(self, e1_model, tmp_path):
        path = write_model(tmp_path / "e1.json", e1_model)
        data = json.loads(path.read_text(encoding="utf-8"))
        data["gamma"] = "abc"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(GammaOutOfRange):
            read_model(path)
