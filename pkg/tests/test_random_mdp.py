"""带种子的随机 MDP 生成器测试"""

import numpy as np
import pytest

from ipi.analysis import MdpVerdict, classify_matrix, classify_mdp
from ipi.core.exceptions import InvalidSpec
from ipi.models import generate_random_model, random_mdp_spec


class TestRandomMdp:
    def test_same_seed_same_model(self, random_model):
        first = random_model(n=25, m=3, density=0.4, seed=42)
        second = random_model(n=25, m=3, density=0.4, seed=42)

        np.testing.assert_array_equal(first.costs, second.costs)
        for a in range(3):
            assert (first.transitions[a] != second.transitions[a]).nnz == 0

    def test_different_seed_differs(self, random_model):
        first = random_model(seed=1)
        second = random_model(seed=2)

        assert not np.array_equal(first.costs, second.costs)

    def test_successors_per_row(self, random_model):
        model = random_model(n=20, m=2, density=0.3, seed=5)

        for P in model.transitions:
            np.testing.assert_array_equal(np.diff(P.indptr), 6)
            np.testing.assert_allclose(np.asarray(P.sum(axis=1)).ravel(), 1.0)

    def test_costs_in_unit_interval(self, random_model):
        model = random_model(n=30, m=4, seed=6)

        assert model.costs.min() >= 0.0
        assert model.costs.max() < 1.0

    def test_regularized_policies_are_primitive(self, random_model):
        model = random_model(n=5, m=2, density=0.2, seed=7, ensure_regular=True)

        assert classify_mdp(model).verdict is MdpVerdict.REGULAR
        for P in model.transitions:
            assert classify_matrix(P).primitive

    def test_spec_is_recorded(self):
        spec = random_mdp_spec(n=10, m=2, gamma=0.8, density=0.5, seed=3)

        model = generate_random_model(spec)

        assert (model.n, model.m, model.gamma) == (10, 2, 0.8)
        assert spec.successors == 5

    @pytest.mark.parametrize(
        "values",
        [
            {"n": 0, "m": 1, "gamma": 0.5},
            {"n": 10, "m": 1, "gamma": 1.0},
            {"n": 10, "m": 1, "gamma": 0.5, "density": 0.05},
            {"n": 10, "m": 1, "gamma": 0.5, "density": 1.5},
            {"n": 10, "m": 1, "gamma": 0.5, "seed": -1},
        ],
    )
    def test_invalid_spec(self, values):
        with pytest.raises(InvalidSpec):
            random_mdp_spec(**values)
