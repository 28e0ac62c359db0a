"""谱判据测试：Richardson 加速区间、对称部分正定性、谱半径圆周、最小多项式次数"""

import numpy as np
import pytest

from ipi.analysis import (
    minimal_polynomial_degree,
    peripheral_eigenvalue_count,
    richardson_iteration_radius,
    richardson_nu_interval,
    spectral_radius,
    symmetric_part_analysis,
)
from ipi.core.exceptions import InvalidParameter, TooLarge
from ipi.mdp import extract_policy_system, solve_policy_system
from ipi.solvers import richardson_step

UNIFORM = np.full((2, 2), 0.5)


def richardson_tail_ratio(system, nu, start=20, stop=40):
    """迭代 start..stop 之间误差无穷范数的几何平均收缩比"""
    exact = solve_policy_system(system)
    theta = np.zeros(system.n)
    errors = [np.max(np.abs(theta - exact))]
    for _ in range(stop):
        theta = richardson_step(system, theta, nu)
        errors.append(np.max(np.abs(theta - exact)))
    return (errors[stop] / errors[start]) ** (1.0 / (stop - start))


class TestRichardsonInterval:
    def test_uniform_chain(self):
        assert richardson_nu_interval(UNIFORM, 0.9) == pytest.approx(0.1 / 0.19, rel=1e-9)
        assert richardson_nu_interval(np.eye(2), 0.9) == pytest.approx(0.01 / 0.19, rel=1e-9)

    def test_iteration_radius(self):
        assert richardson_iteration_radius(UNIFORM, 0.9, 0.7) == pytest.approx(0.857143, abs=1e-6)
        assert richardson_iteration_radius(UNIFORM, 0.9, 1.0) == pytest.approx(0.9)
        assert spectral_radius(UNIFORM) == pytest.approx(1.0)

    def test_acceleration_on_regular_chains(self, random_model):
        gamma = 0.9
        for seed in range(10):
            model = random_model(n=20, m=1, gamma=gamma, seed=seed, ensure_regular=True)
            system = extract_policy_system(model, np.zeros(20, dtype=int))
            P = system.p_pi.toarray()
            nu = (richardson_nu_interval(P, gamma) + 1.0) / 2.0

            assert richardson_iteration_radius(P, gamma, nu) < gamma
            assert richardson_tail_ratio(system, nu) <= gamma + 0.02
            assert gamma - 0.02 <= richardson_tail_ratio(system, 1.0) <= gamma + 0.02

    def test_invalid_inputs(self):
        with pytest.raises(InvalidParameter):
            richardson_nu_interval(UNIFORM, 1.0)
        with pytest.raises(InvalidParameter):
            richardson_iteration_radius(UNIFORM, 0.9, 0.0)


class TestSymmetricPart:
    def test_hand_computed_threshold(self):
        P = np.array([[0.0, 1.0], [0.2, 0.8]])

        result = symmetric_part_analysis(P, 0.95)

        assert result.gamma_threshold == pytest.approx(1 / 1.1211103, rel=1e-6)
        assert not result.positive_definite
        assert symmetric_part_analysis(P, 0.5).positive_definite

    def test_doubly_stochastic_always_positive_definite(self):
        result = symmetric_part_analysis(UNIFORM, 0.99)

        assert result.gamma_threshold == pytest.approx(1.0)
        assert result.lambda_min_h == pytest.approx(0.01)
        assert result.positive_definite

    def test_threshold_separates_definiteness(self):
        rng = np.random.default_rng(7)
        gammas = np.linspace(0.05, 0.95, 19)
        for _ in range(100):
            P = rng.dirichlet(np.ones(40) * 0.3, size=40)
            threshold = symmetric_part_analysis(P, 0.5).gamma_threshold
            for gamma in gammas:
                if abs(gamma - threshold) < 1e-10:
                    continue
                result = symmetric_part_analysis(P, gamma)
                assert result.positive_definite == (gamma < threshold)


class TestPeripheralEigenvalues:
    @pytest.mark.parametrize("period", [1, 2, 3, 5])
    def test_cyclic_permutation_matches_period(self, period):
        P = np.roll(np.eye(period), 1, axis=1)

        assert peripheral_eigenvalue_count(P) == period

    def test_primitive_chain(self):
        P = np.random.default_rng(2).dirichlet(np.ones(6), size=6)

        assert peripheral_eigenvalue_count(P) == 1

    def test_scaled_matrix_uses_spectral_radius(self):
        assert peripheral_eigenvalue_count(0.9 * np.roll(np.eye(4), 1, axis=1)) == 4
        assert peripheral_eigenvalue_count(np.diag([0.5, 0.2, -0.5])) == 2

    def test_invalid_tolerance(self):
        with pytest.raises(InvalidParameter):
            peripheral_eigenvalue_count(UNIFORM, modulus_tol=0.0)


class TestMinimalPolynomial:
    def test_rank_one_transition(self):
        v = np.random.default_rng(0).dirichlet(np.ones(10))
        A = np.eye(10) - 0.9 * np.tile(v, (10, 1))

        assert minimal_polynomial_degree(A) == 2

    def test_diagonal_with_repeated_values(self):
        assert minimal_polynomial_degree(np.eye(6)) == 1
        assert minimal_polynomial_degree(np.diag([1.0, 1.0, 2.0, 2.0, 3.0])) == 3

    def test_generic_matrix_has_full_degree(self):
        P = np.random.default_rng(1).dirichlet(np.ones(8), size=8)

        assert minimal_polynomial_degree(np.eye(8) - 0.9 * P) == 8

    def test_size_limit(self):
        with pytest.raises(TooLarge):
            minimal_polynomial_degree(np.eye(65))
