import math
import unittest
from fractions import Fraction

import numpy as np

from algebra.groebner import Ideal, buchberger, fglm
from algebra.polynomial import MonomialOrder, MultiPoly, evaluate
from algebra.zerosolve import filter_real, solve_zero_dim
from model.likelihood import (
    DEGENERATE,
    LOCAL_MAX,
    SADDLE,
    DegenerateLikelihoodError,
    classify,
    igls,
    log_likelihood,
    ols_start,
    profile_loglik,
    profile_values,
    sigma_hat,
    stationary_points,
    vectorization_map,
)
from model.sur import Dataset, ObjectiveSystem, SparsityPattern, build_objective, random_dataset
from tests.utils import MULTIMODAL_REAL_POINTS, assert_points_close, load_fixture


def solve(pattern, data):
    system = build_objective(pattern, data)
    ideal = Ideal.of(system.gradient)
    n = pattern.nparams
    gb = fglm(buchberger(ideal, MonomialOrder.grevlex(n)), MonomialOrder.lex(n))
    return system, solve_zero_dim(gb, generators=ideal.generators)


def profile_hessian(pattern, data, beta, h=1e-4):
    """Central finite-difference Hessian of the profile log-likelihood."""
    beta = np.asarray(beta, dtype=np.float64)
    n = beta.size
    H = np.empty((n, n))

    def f(b):
        return profile_loglik(pattern, data, b).profile_value

    for i in range(n):
        for j in range(n):
            ei = np.eye(n)[i] * h
            ej = np.eye(n)[j] * h
            H[i, j] = (f(beta + ei + ej) - f(beta + ei - ej) - f(beta - ei + ej) + f(beta - ei - ej)) / (4 * h * h)
    return H


class TestCovariance(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pattern, cls.data = load_fixture("diagonal2", "multimodal")
        cls.system = build_objective(cls.pattern, cls.data)

    def test_sigma_hat_at_stationary_point(self):
        beta = MULTIMODAL_REAL_POINTS[0]
        sigma = sigma_hat(self.pattern, self.data, beta)
        self.assertTrue(sigma.is_symmetric())
        self.assertTrue(sigma.is_positive_definite())
        G = evaluate(self.system.G, list(beta))
        N, R = self.data.N, self.data.R
        self.assertAlmostEqual(N**R * np.linalg.det(sigma.sigma) / G, 1.0, delta=1e-6)

    def test_gram_consistency_at_random_points(self):
        rng = np.random.default_rng(5)
        N, R = self.data.N, self.data.R
        for _ in range(10):
            beta = rng.uniform(-2, 4, size=2)
            sigma = sigma_hat(self.pattern, self.data, beta)
            G = evaluate(self.system.G, list(beta))
            self.assertAlmostEqual(N**R * np.linalg.det(sigma.sigma) / G, 1.0, delta=1e-6)

    def test_boundary_is_flagged(self):
        # Exact fit of a single response: zero residual covariance.
        pattern = SparsityPattern(R=1, C=1, entries=((1, 1),))
        data = Dataset(((Fraction(1), Fraction(2)),), ((Fraction(2), Fraction(4)),))
        sigma = sigma_hat(pattern, data, [2.0])
        self.assertFalse(sigma.is_positive_definite())
        with self.assertRaises(DegenerateLikelihoodError):
            profile_loglik(pattern, data, [2.0])

    def test_rank_deficient_residuals(self):
        # Both responses fitted by one covariate direction.
        pattern = SparsityPattern(R=2, C=1, entries=((1, 1), (2, 1)))
        X = ((Fraction(1), Fraction(2), Fraction(3)),)
        Y = ((Fraction(1), Fraction(0), Fraction(1)), (Fraction(2), Fraction(0), Fraction(2)))
        sigma = sigma_hat(pattern, Dataset(X, Y), [0.0, 0.0])
        self.assertFalse(sigma.is_positive_definite())

    def test_non_finite(self):
        with self.assertRaises(ValueError):
            sigma_hat(self.pattern, self.data, [math.nan, 1.0])


class TestProfile(unittest.TestCase):
    def setUp(self):
        self.pattern, self.data = load_fixture("diagonal2", "multimodal")

    def test_profiling_identity(self):
        rng = np.random.default_rng(7)
        R, N = self.data.R, self.data.N
        for _ in range(10):
            beta = rng.uniform(-2, 4, size=2)
            evaluation = profile_loglik(self.pattern, self.data, beta)
            self.assertAlmostEqual(evaluation.log_likelihood, evaluation.profile_value, delta=1e-10 * abs(evaluation.profile_value))
            expected = (
                -0.5 * N * math.log(evaluation.objective_G / N**R) - 0.5 * R * N - 0.5 * R * N * math.log(2 * math.pi)
            )
            self.assertAlmostEqual(evaluation.profile_value, expected, delta=1e-9 * abs(expected))
            sigma = sigma_hat(self.pattern, self.data, beta).sigma
            self.assertGreaterEqual(evaluation.log_likelihood, log_likelihood(self.pattern, self.data, beta, sigma * 1.1))

    def test_perfect_fit_raises(self):
        pattern = SparsityPattern(R=1, C=1, entries=((1, 1),))
        data = Dataset(((Fraction(1), Fraction(2)),), ((Fraction(2), Fraction(4)),))
        with self.assertRaises(DegenerateLikelihoodError):
            profile_loglik(pattern, data, [2.0])

    def test_profile_values_match_pointwise(self):
        system = build_objective(self.pattern, self.data)
        points = np.array([[0.5, 1.0], list(MULTIMODAL_REAL_POINTS[1]), [3.0, -1.0]])
        values = profile_values(system, points)
        for point, value in zip(points, values):
            expected = profile_loglik(self.pattern, self.data, point).profile_value
            self.assertAlmostEqual(value, expected, delta=1e-7 * abs(expected))

    def test_profile_values_flag_zero_G(self):
        pattern = SparsityPattern(R=1, C=1, entries=((1, 1),))
        data = Dataset(((Fraction(1), Fraction(2)),), ((Fraction(2), Fraction(4)),))
        b = MultiPoly.variable(0, 1)
        G = 5 * (2 - b) ** 2
        values = profile_values(ObjectiveSystem(G, (G.diff(0),), pattern, data), np.array([[2.0], [1.0]]))
        self.assertTrue(math.isnan(values[0]))
        self.assertAlmostEqual(values[1], profile_loglik(pattern, data, [1.0]).profile_value, places=10)


class TestStationaryPoints(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.pattern, cls.data = load_fixture("diagonal2", "multimodal")
        cls.system, cls.solutions = solve(cls.pattern, cls.data)
        cls.points = stationary_points(cls.system, cls.solutions)

    def test_classification(self):
        self.assertEqual(len(self.points), 3)
        by_beta = sorted(self.points, key=lambda p: p.beta)
        self.assertEqual([p.classification for p in by_beta], [LOCAL_MAX, SADDLE, LOCAL_MAX])
        self.assertEqual(sum(p.is_global_max for p in self.points), 1)
        self.assertTrue(self.points[0].is_global_max)

    def test_finite_difference_oracle(self):
        for point in self.points:
            eigenvalues = np.linalg.eigvalsh(profile_hessian(self.pattern, self.data, point.beta))
            if point.classification == LOCAL_MAX:
                self.assertTrue(np.all(eigenvalues < 0))
            else:
                self.assertTrue(eigenvalues.min() < 0 < eigenvalues.max())

    def test_ordering(self):
        profile = [p.evaluation.profile_value for p in self.points]
        objective = [p.evaluation.objective_G for p in self.points]
        self.assertEqual(profile, sorted(profile, reverse=True))
        self.assertEqual(objective, sorted(objective))
        for p in self.points:
            self.assertGreater(p.evaluation.objective_G, 0)
            self.assertTrue(p.sigma.is_positive_definite())

    def test_profile_gradient_vanishes(self):
        h = 1e-6
        for point in self.points:
            beta = np.asarray(point.beta)
            for k in range(2):
                step = np.eye(2)[k] * h
                up = profile_loglik(self.pattern, self.data, beta + step).profile_value
                down = profile_loglik(self.pattern, self.data, beta - step).profile_value
                self.assertLessEqual(abs(up - down) / (2 * h), 1e-4 * abs(point.evaluation.profile_value))

    def test_classify_directly(self):
        self.assertEqual(classify(self.pattern, self.data, self.points[0].beta), LOCAL_MAX)

    def test_purely_real_is_multimodal(self):
        pattern, data = load_fixture("diagonal2", "purely_real")
        system, solutions = solve(pattern, data)
        points = stationary_points(system, solutions)
        self.assertEqual(len(points), 5)
        self.assertGreaterEqual(sum(p.classification == LOCAL_MAX for p in points), 2)

    def test_ols_point_is_local_max(self):
        pattern = SparsityPattern(R=1, C=2, entries=((1, 1), (1, 2)))
        data = random_dataset(pattern, 6, seed=2, value_range=20)
        self.assertEqual(classify(pattern, data, ols_start(pattern, data)), LOCAL_MAX)

    def test_degenerate_hessian(self):
        # G flat in the second parameter.
        b11 = MultiPoly.variable(0, 2)
        flat = ObjectiveSystem(b11**2 + 1, ((b11**2).diff(0), MultiPoly.zero(2)), self.pattern, self.data)
        self.assertEqual(classify(self.pattern, self.data, [0.0, 0.0], system=flat), DEGENERATE)


class TestVectorization(unittest.TestCase):
    def test_columns_have_one_entry(self):
        pattern = SparsityPattern(R=2, C=2, entries=((1, 1), (2, 1), (2, 2)))
        vec = vectorization_map(pattern)
        self.assertEqual(vec.A.shape, (4, 3))
        np.testing.assert_array_equal(vec.A.sum(axis=0), [1, 1, 1])
        np.testing.assert_array_equal(vec.coefficient_matrix([1.0, 2.0, 3.0]), [[1.0, 0.0], [2.0, 3.0]])

    def test_restricted(self):
        pattern = SparsityPattern(R=2, C=2, entries=((1, 1), (2, 1), (2, 2)), restrictions=(((1, 1), (2, 1)),))
        vec = vectorization_map(pattern)
        np.testing.assert_array_equal(vec.coefficient_matrix([5.0, 7.0]), [[5.0, 0.0], [5.0, 7.0]])


class TestIGLS(unittest.TestCase):
    def test_single_response_is_ols(self):
        pattern = SparsityPattern(R=1, C=2, entries=((1, 1), (1, 2)))
        data = random_dataset(pattern, 6, seed=1, value_range=20)
        result = igls(pattern, data, beta0=[0.0, 0.0])
        self.assertTrue(result.converged)
        self.assertLessEqual(result.iterations, 2)
        np.testing.assert_allclose(result.beta, ols_start(pattern, data), rtol=1e-10)

    def test_converges_to_stationary_point(self):
        pattern, data = load_fixture("diagonal2", "multimodal")
        result = igls(pattern, data)
        self.assertTrue(result.converged)
        _, solutions = solve(pattern, data)
        real = filter_real(solutions)
        distances = [max(abs(a - b) for a, b in zip(result.beta, point)) for point in real]
        self.assertLessEqual(min(distances), 1e-6)

    def test_iteration_cap(self):
        pattern, data = load_fixture("diagonal2", "multimodal")
        result = igls(pattern, data, max_iter=1)
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 1)

    def test_monotone_pattern_unique(self):
        pattern, _ = load_fixture("monotone", "multimodal")
        for seed in range(20):
            with self.subTest(seed=seed):
                data = random_dataset(pattern, 7, seed=seed, value_range=20)
                system, solutions = solve(pattern, data)
                points = stationary_points(system, solutions)
                self.assertEqual(len(points), 1)
                result = igls(pattern, data)
                self.assertTrue(result.converged)
                np.testing.assert_allclose(result.beta, points[0].beta, atol=1e-6)


class TestSubmodelTransfer(unittest.TestCase):
    def test_restricted_monotone_has_three_real_points(self):
        pattern, data = load_fixture("monotone_restricted", "multimodal_submodel")
        system, solutions = solve(pattern, data)
        points = stationary_points(system, solutions)
        self.assertEqual(len(points), 3)
        assert_points_close(self, sorted(p.beta for p in points), MULTIMODAL_REAL_POINTS, 1e-5)


if __name__ == "__main__":
    unittest.main()
