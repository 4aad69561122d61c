__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import itertools
import json
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from flatdpp import kernel
from flatdpp import linalg
from flatdpp import nnp as nnp_lib
from flatdpp import verify


def random_nnp(rng, n, p, rank=None):
    """A random valid pair: L = B B^T - V V^T + V X^T + X V^T."""
    rank = n - p if rank is None else rank
    V = rng.normal(size=(n, p))
    B = rng.normal(size=(n, rank))
    X = rng.normal(size=(n, p))
    L = B @ B.T - V @ V.T + V @ X.T + X @ V.T
    return nnp_lib.make_nnp(L, V)


def spectral_mass(pair, X):
    """det(V^T V) sum_Y det([Q_X, Utilde_XY])^2 prod_{i in Y} lambda_i."""
    X = list(X)
    size = len(X) - pair.p
    if size < 0:
        return 0.0
    total = 0.0
    for Y in itertools.combinations(range(pair.q), size):
        block = np.hstack([pair.Q[X, :], pair.Utilde[np.ix_(X, list(Y))]])
        total += np.linalg.det(block) ** 2 * np.prod(pair.Lambdatilde[list(Y)])
    return total * np.linalg.det(pair.V.T @ pair.V)


class TestMakeNNP(unittest.TestCase):
    def test_plain_ensemble(self):
        L = np.array([[2.0, 1.0], [1.0, 2.0]])
        pair = nnp_lib.make_nnp(L)
        self.assertEqual((pair.n, pair.p, pair.q), (2, 0, 2))
        np.testing.assert_allclose(pair.Ltilde, L)

    def test_distance_pair(self):
        gs = kernel.make_ground_set([0.0, 0.3, 0.45, 1.0])
        pair = nnp_lib.make_nnp(-kernel.distance_matrix(gs, 1), np.ones((4, 1)))
        self.assertEqual((pair.p, pair.q), (1, 3))
        self.assertTrue(np.all(pair.Lambdatilde > 0))
        np.testing.assert_allclose(pair.Q.T @ pair.Utilde, 0, atol=1e-10)

    def test_not_conditionally_psd(self):
        with self.assertRaises(nnp_lib.NotConditionallyPSDError):
            nnp_lib.make_nnp(-np.eye(3), np.ones((3, 1)))

    def test_rank_deficient(self):
        with self.assertRaises(linalg.RankError):
            nnp_lib.make_nnp(np.eye(3), [[1, 2], [1, 2], [1, 2]])

    def test_truncated_rank(self):
        rng = np.random.default_rng(0)
        pair = random_nnp(rng, 6, 2, rank=2)
        self.assertEqual(pair.q, 2)

    def test_json(self):
        rng = np.random.default_rng(1)
        pair = random_nnp(rng, 4, 1)
        document = json.dumps(nnp_lib.nnp_to_json(pair))
        parsed = nnp_lib.nnp_from_json(document)
        np.testing.assert_allclose(parsed.L, pair.L)
        np.testing.assert_allclose(parsed.V, pair.V)
        plain = nnp_lib.nnp_from_json({"n": 2, "L": [[1, 0], [0, 1]]})
        self.assertEqual(plain.p, 0)


class TestMasses(unittest.TestCase):
    def test_plain_ensemble(self):
        L = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])
        pair = nnp_lib.make_nnp(L)
        self.assertAlmostEqual(nnp_lib.pmf_unnorm(pair, [0, 1]).value, 3.0)
        self.assertAlmostEqual(nnp_lib.pmf_unnorm(pair, []).value, 1.0)

    def test_projection_mass(self):
        rng = np.random.default_rng(2)
        pair = random_nnp(rng, 5, 2)
        X = [1, 3]
        expected = np.linalg.det(pair.V[X, :]) ** 2
        self.assertAlmostEqual(nnp_lib.pmf_unnorm(pair, X).value, expected)

    def test_saddle_example(self):
        pair = nnp_lib.make_nnp(np.eye(2), np.ones((2, 1)))
        self.assertAlmostEqual(nnp_lib.pmf_unnorm(pair, [0, 1]).value, 2.0)

    def test_outside_support(self):
        rng = np.random.default_rng(3)
        pair = random_nnp(rng, 5, 2, rank=1)
        self.assertEqual(nnp_lib.pmf_unnorm(pair, [0]), linalg.ZERO)
        self.assertEqual(nnp_lib.pmf_unnorm(pair, [0, 1, 2, 3]), linalg.ZERO)

    def test_empty_subset(self):
        pair = nnp_lib.make_nnp(np.eye(2))
        self.assertEqual(nnp_lib.pmf_unnorm(pair, ()), linalg.ONE)
        self.assertEqual(nnp_lib.pmf_unnorm(pair, []).value, 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 3))
    def test_generalized_cauchy_binet(self, seed, n, p):
        p = min(p, n)
        rng = np.random.default_rng(seed)
        pair = random_nnp(rng, n, p)
        subsets = [X for m in range(n + 1) for X in itertools.combinations(range(n), m)]
        masses = [nnp_lib.pmf_unnorm(pair, X).value for X in subsets]
        expected = [spectral_mass(pair, X) for X in subsets]
        scale = max(expected)
        for X, mass, value in zip(subsets, masses, expected):
            self.assertLessEqual(abs(mass - value), 1e-8 * value + 1e-10 * scale, msg=str(X))


class TestNormalization(unittest.TestCase):
    def test_plain(self):
        L = np.array([[2.0, 1.0], [1.0, 2.0]])
        pair = nnp_lib.make_nnp(L)
        self.assertAlmostEqual(nnp_lib.normalization(pair), np.linalg.det(np.eye(2) + L))

    def test_projection_size(self):
        rng = np.random.default_rng(4)
        pair = random_nnp(rng, 5, 2)
        self.assertAlmostEqual(
            nnp_lib.normalization(pair, 2), np.linalg.det(pair.V.T @ pair.V)
        )

    def test_enumeration(self):
        rng = np.random.default_rng(5)
        for n, p in [(3, 1), (6, 2), (8, 0), (8, 3)]:
            pair = random_nnp(rng, n, p)
            total = 0.0
            for m in range(p, n + 1):
                mass = sum(
                    nnp_lib.pmf_unnorm(pair, X).value
                    for X in itertools.combinations(range(n), m)
                )
                expected = nnp_lib.normalization(pair, m)
                self.assertLess(abs(mass - expected), 1e-9 * nnp_lib.normalization(pair))
                total += mass
            expected = nnp_lib.normalization(pair)
            self.assertLess(abs(total - expected), 1e-9 * expected)
            self.assertAlmostEqual(nnp_lib.log_normalization(pair), np.log(expected))

    def test_projected_identity(self):
        P = np.eye(3) - np.ones((3, 3)) / 3
        pair = nnp_lib.make_nnp(P, np.ones((3, 1)))
        mass = sum(
            nnp_lib.pmf_unnorm(pair, X).value for X in itertools.combinations(range(3), 2)
        )
        self.assertAlmostEqual(nnp_lib.normalization(pair, 2), mass)

    def test_domain(self):
        pair = nnp_lib.make_nnp(np.eye(3), np.ones((3, 1)))
        with self.assertRaises(nnp_lib.NNPDomainError):
            nnp_lib.normalization(pair, 0)


class TestKernels(unittest.TestCase):
    def test_diagonal(self):
        K = nnp_lib.marginal_kernel(nnp_lib.make_nnp(np.diag([1.0, 3.0])))
        np.testing.assert_allclose(K, np.diag([0.5, 0.75]))

    def test_full_projection(self):
        pair = nnp_lib.make_nnp(np.zeros((3, 3)), np.eye(3))
        np.testing.assert_allclose(nnp_lib.marginal_kernel(pair), np.eye(3), atol=1e-12)

    def test_spectrum(self):
        rng = np.random.default_rng(6)
        pair = random_nnp(rng, 6, 2)
        mu = np.linalg.eigvalsh(nnp_lib.marginal_kernel(pair))
        self.assertTrue(np.all(mu > -1e-10) and np.all(mu < 1 + 1e-10))
        self.assertEqual(int(np.sum(np.abs(mu - 1) < 1e-10)), 2)

    def test_marginals(self):
        rng = np.random.default_rng(7)
        for n, p in [(5, 1), (8, 2)]:
            pair = random_nnp(rng, n, p)
            K = nnp_lib.marginal_kernel(pair)
            table = verify.enumerate_pmf(pair)
            for size in (1, 2, 3):
                for A in itertools.combinations(range(n), size):
                    self.assertAlmostEqual(
                        verify.marginal_probability(table, A),
                        np.linalg.det(K[np.ix_(A, A)]),
                        delta=1e-9,
                    )

    def test_identity_kernel(self):
        pair = nnp_lib.nnp_from_kernel(np.eye(3))
        self.assertEqual((pair.p, pair.q), (3, 0))
        np.testing.assert_allclose(pair.L, 0)

    def test_half_kernel(self):
        pair = nnp_lib.nnp_from_kernel([[0.5]])
        self.assertEqual(pair.p, 0)
        np.testing.assert_allclose(pair.L, [[1.0]])

    def test_projection_kernel(self):
        v = np.array([1.0, 2.0, 2.0]) / 3
        pair = nnp_lib.nnp_from_kernel(np.outer(v, v))
        self.assertEqual((pair.p, pair.q), (1, 0))
        self.assertAlmostEqual(abs(pair.V[:, 0] @ v), 1.0)

    def test_roundtrip(self):
        rng = np.random.default_rng(8)
        U = linalg.orthonormal_basis(rng.normal(size=(6, 6)))
        mu = np.array([1.0, 1.0, 0.7, 0.3, 0.05, 0.0])
        K = (U * mu) @ U.T
        pair = nnp_lib.nnp_from_kernel(K)
        self.assertEqual(pair.p, 2)
        np.testing.assert_allclose(nnp_lib.marginal_kernel(pair), K, atol=1e-8)

    def test_invalid_kernel(self):
        with self.assertRaises(nnp_lib.InvalidKernelError):
            nnp_lib.nnp_from_kernel(np.diag([1.5, 0.5]))
        with self.assertRaises(nnp_lib.InvalidKernelError):
            nnp_lib.nnp_from_kernel(np.diag([-0.5, 0.5]))


class TestSizeLaw(unittest.TestCase):
    def test_projection(self):
        law = nnp_lib.size_law(nnp_lib.make_nnp(np.zeros((3, 3)), np.ones((3, 1))))
        np.testing.assert_allclose(law.probabilities, [0, 1, 0, 0])

    def test_single_eigenvalue(self):
        pair = nnp_lib.make_nnp(np.diag([0.0, 1.0]), [[1.0], [0.0]])
        np.testing.assert_allclose(nnp_lib.size_law(pair).probabilities, [0, 0.5, 0.5])

    def test_bernoulli(self):
        law = nnp_lib.size_law(nnp_lib.make_nnp(np.eye(2)))
        np.testing.assert_allclose(law.probabilities, [0.25, 0.5, 0.25])
        self.assertAlmostEqual(law.mean, 1.0)
        self.assertEqual(law.support(), [0, 1, 2])

    def test_convolution(self):
        rng = np.random.default_rng(9)
        pair = random_nnp(rng, 7, 2)
        mu = np.clip(np.linalg.eigvalsh(nnp_lib.marginal_kernel(pair)), 0, 1)
        expected = np.array([1.0])
        for value in mu:
            expected = np.convolve(expected, [1 - value, value])
        law = nnp_lib.size_law(pair)
        np.testing.assert_allclose(law.probabilities, expected, atol=1e-10)
        self.assertAlmostEqual(float(np.sum(law.probabilities)), 1.0, delta=1e-12)
        np.testing.assert_array_equal(law.probabilities[:2], 0.0)

    def test_enumeration(self):
        rng = np.random.default_rng(10)
        pair = random_nnp(rng, 6, 1)
        table = verify.enumerate_pmf(pair)
        np.testing.assert_allclose(
            nnp_lib.size_law(pair).probabilities, table.size_law().probabilities, atol=1e-10
        )


class TestComplement(unittest.TestCase):
    def test_inverse(self):
        rng = np.random.default_rng(11)
        B = rng.normal(size=(4, 4))
        L = B @ B.T + np.eye(4)
        result = nnp_lib.complement(nnp_lib.make_nnp(L))
        self.assertEqual(result.p, 0)
        np.testing.assert_allclose(result.L, np.linalg.inv(L), atol=1e-10)

    def test_diagonal(self):
        result = nnp_lib.complement(nnp_lib.make_nnp(np.diag([1.0, 3.0])))
        np.testing.assert_allclose(result.L, np.diag([1.0, 1 / 3]), atol=1e-12)
        np.testing.assert_allclose(np.diag(nnp_lib.marginal_kernel(result)), [0.5, 0.25])

    def test_kernels(self):
        rng = np.random.default_rng(12)
        for n, p, rank in [(5, 1, 2), (6, 2, 4), (4, 0, 3)]:
            pair = random_nnp(rng, n, p, rank)
            K = nnp_lib.marginal_kernel(pair)
            result = nnp_lib.complement(pair)
            self.assertEqual(result.p, n - p - rank)
            np.testing.assert_allclose(
                nnp_lib.marginal_kernel(result), np.eye(n) - K, atol=1e-8
            )
            twice = nnp_lib.complement(result)
            np.testing.assert_allclose(nnp_lib.marginal_kernel(twice), K, atol=1e-8)

    def test_complement_marginals(self):
        rng = np.random.default_rng(13)
        pair = random_nnp(rng, 6, 1, 3)
        table = verify.enumerate_pmf(pair)
        other = verify.enumerate_pmf(nnp_lib.complement(pair))
        np.testing.assert_allclose(
            verify.inclusion_probs(other), 1 - verify.inclusion_probs(table), atol=1e-9
        )


class TestInvariances(unittest.TestCase):
    def setUp(self):
        self.pair = random_nnp(np.random.default_rng(14), 6, 2)

    def probabilities(self, pair):
        return verify.enumerate_pmf(pair).probabilities()

    def test_identity(self):
        result = nnp_lib.apply_invariances(self.pair)
        np.testing.assert_allclose(result.L, self.pair.L)
        np.testing.assert_allclose(result.V, self.pair.V)

    def test_scaling(self):
        result = nnp_lib.apply_invariances(self.pair, R=2 * np.eye(2))
        np.testing.assert_allclose(
            self.probabilities(result), self.probabilities(self.pair), atol=1e-9
        )
        X = [0, 2, 3]
        ratio = nnp_lib.pmf_unnorm(result, X).value / nnp_lib.pmf_unnorm(self.pair, X).value
        self.assertAlmostEqual(ratio, 16.0, delta=1e-8)

    def test_perturbation(self):
        Xm = np.random.default_rng(15).normal(size=(6, 2))
        result = nnp_lib.apply_invariances(self.pair, Xm=Xm)
        np.testing.assert_allclose(
            self.probabilities(result), self.probabilities(self.pair), atol=1e-9
        )

    def test_errors(self):
        with self.assertRaises(linalg.RankError):
            nnp_lib.apply_invariances(self.pair, R=np.zeros((2, 2)))
        rng = np.random.default_rng(16)
        with self.assertRaises(linalg.LinalgError):
            nnp_lib.apply_invariances(
                self.pair, Xm=rng.normal(size=(6, 2)), Ym=rng.normal(size=(6, 2))
            )


if __name__ == "__main__":
    unittest.main()
