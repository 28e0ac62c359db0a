"""Bellman 算子、贪心策略与精确策略评估测试"""

import numpy as np
import pytest

from ipi.core.exceptions import DimensionMismatch, IndexOutOfRange, InvalidParameter
from ipi.mdp import (
    apply_T,
    apply_T_pi,
    as_policy,
    bellman_residual,
    exact_policy_evaluation,
    extract_policy_system,
    model_from_dense,
    solve_policy_system,
)


class TestBellmanOperator:
    def test_e1_residual_at_zero(self, e1_model):
        TV, policy = apply_T(e1_model, np.zeros(2))

        np.testing.assert_array_equal(TV, [0.0, 1.0])
        np.testing.assert_array_equal(policy, [0, 1])
        np.testing.assert_array_equal(bellman_residual(e1_model, np.zeros(2)), [0.0, -1.0])

    def test_fixed_point_is_optimal_value(self, e1_model):
        V_star = np.array([0.0, 1.0])

        np.testing.assert_allclose(bellman_residual(e1_model, V_star), 0.0, atol=1e-15)

    def test_ties_pick_lowest_action(self):
        P = np.array([np.eye(2), np.eye(2), np.eye(2)])
        model = model_from_dense(P, np.ones((2, 3)), 0.5)

        _, policy = apply_T(model, np.zeros(2))
        np.testing.assert_array_equal(policy, [0, 0])

    def test_T_pi_on_identity_chain(self, identity_chain):
        np.testing.assert_array_equal(apply_T_pi(identity_chain, [0, 0], [2.0, 4.0]), [2.0, 4.0])

    def test_partitioned_evaluation_is_bitwise_identical(self, random_model):
        model = random_model(n=1024, m=3, density=0.05, seed=7)
        V = np.random.default_rng(1).normal(size=model.n)

        serial_TV, serial_policy = apply_T(model, V, workers=1)
        parallel_TV, parallel_policy = apply_T(model, V, workers=4)

        np.testing.assert_array_equal(parallel_TV, serial_TV)
        np.testing.assert_array_equal(parallel_policy, serial_policy)

    def test_invalid_inputs(self, e1_model):
        with pytest.raises(DimensionMismatch):
            apply_T(e1_model, np.zeros(3))
        with pytest.raises(InvalidParameter):
            apply_T(e1_model, [np.nan, 0.0])
        with pytest.raises(InvalidParameter):
            apply_T(e1_model, np.zeros(2), workers=0)


class TestPolicySystem:
    def test_e1_optimal_policy_rows(self, e1_model):
        system = extract_policy_system(e1_model, [0, 1])

        np.testing.assert_array_equal(system.p_pi.toarray(), [[1.0, 0.0], [1.0, 0.0]])
        np.testing.assert_array_equal(system.g_pi, [0.0, 1.0])
        np.testing.assert_allclose(system.diagonal, [0.5, 1.0])

    def test_coefficient_splitting(self, random_model):
        system = extract_policy_system(random_model(n=8, m=2, seed=2), np.zeros(8, dtype=int))
        A = system.coefficient_matrix.toarray()

        reassembled = (
            system.strict_lower.toarray() + np.diag(system.diagonal) + system.strict_upper.toarray()
        )
        np.testing.assert_allclose(reassembled, A, atol=1e-15)
        x = np.arange(8.0)
        np.testing.assert_allclose(system.matvec(x), A @ x)
        np.testing.assert_allclose(system.rmatvec(x), A.T @ x)

    def test_policy_validation(self, e1_model):
        with pytest.raises(IndexOutOfRange):
            as_policy([0, 2], e1_model)
        with pytest.raises(DimensionMismatch):
            as_policy([0], e1_model)


class TestExactEvaluation:
    def test_identity_chain(self, identity_chain):
        np.testing.assert_allclose(exact_policy_evaluation(identity_chain, [0, 0]), [2.0, 4.0])

    def test_e1_optimal_policy(self, e1_model):
        np.testing.assert_allclose(exact_policy_evaluation(e1_model, [0, 1]), [0.0, 1.0], atol=1e-14)

    def test_dense_and_sparse_paths_agree(self, random_model):
        model = random_model(n=120, m=3, density=0.1, seed=5)
        system = extract_policy_system(model, apply_T(model, np.zeros(model.n))[1])

        dense = solve_policy_system(system, dense_fallback_below=1000)
        sparse = solve_policy_system(system, dense_fallback_below=1)

        np.testing.assert_allclose(sparse, dense, atol=1e-10)
        np.testing.assert_allclose(system.residual(sparse), 0.0, atol=1e-10)


def dense_T_pi(model, policy, V):
    """逐行稠密展开 g_π + γP_π V"""
    P = np.array([model.transitions[a].toarray()[i] for i, a in enumerate(policy)])
    g = model.costs[np.arange(model.n), policy]
    return g + model.gamma * P @ V


@pytest.mark.parametrize("seed", range(5))
class TestBellmanProperties:
    def test_contraction_in_max_norm(self, random_model, seed):
        model = random_model(n=30, m=4, gamma=0.9, density=0.3, seed=seed)
        rng = np.random.default_rng(100 + seed)
        V, W = rng.normal(scale=10.0, size=(2, model.n))

        gap = np.max(np.abs(apply_T(model, V)[0] - apply_T(model, W)[0]))

        assert gap <= model.gamma * np.max(np.abs(V - W)) + 1e-12

    def test_monotone(self, random_model, seed):
        model = random_model(n=30, m=4, density=0.3, seed=seed)
        rng = np.random.default_rng(200 + seed)
        V = rng.normal(size=model.n)
        W = V + np.abs(rng.normal(size=model.n))

        assert np.all(apply_T(model, W)[0] >= apply_T(model, V)[0] - 1e-12)

    def test_constant_shift(self, random_model, seed):
        model = random_model(n=30, m=4, gamma=0.7, density=0.3, seed=seed)
        V = np.random.default_rng(300 + seed).normal(size=model.n)
        c = 3.5

        TV, policy = apply_T(model, V)
        shifted, shifted_policy = apply_T(model, V + c)

        np.testing.assert_allclose(shifted, TV + model.gamma * c, atol=1e-12)
        np.testing.assert_array_equal(shifted_policy, policy)

    def test_T_pi_matches_dense_rows(self, random_model, seed):
        model = random_model(n=20, m=3, density=0.4, seed=seed)
        rng = np.random.default_rng(400 + seed)
        policy = rng.integers(0, model.m, size=model.n)
        V = rng.normal(size=model.n)

        np.testing.assert_allclose(
            apply_T_pi(model, policy, V), dense_T_pi(model, policy, V), atol=1e-12
        )

    def test_greedy_policy_attains_T(self, random_model, seed):
        model = random_model(n=20, m=3, density=0.4, seed=seed)
        V = np.random.default_rng(500 + seed).normal(size=model.n)

        TV, policy = apply_T(model, V)

        np.testing.assert_allclose(apply_T_pi(model, policy, V), TV, atol=1e-12)
        for a in range(model.m):
            assert np.all(TV <= dense_T_pi(model, np.full(model.n, a), V) + 1e-12)

    def test_exact_evaluation_is_fixed_point(self, random_model, seed):
        model = random_model(n=50, m=3, gamma=0.95, density=0.2, seed=seed)
        policy = np.random.default_rng(600 + seed).integers(0, model.m, size=model.n)

        V_pi = exact_policy_evaluation(model, policy)

        np.testing.assert_allclose(apply_T_pi(model, policy, V_pi), V_pi, atol=1e-10)
