__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import itertools
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from flatdpp import linalg


def random_spd(rng, n, shift=1.0):
    A = rng.normal(size=(n, n))
    return A @ A.T + shift * np.eye(n)


class TestSymEig(unittest.TestCase):
    def test_identity(self):
        spectrum = linalg.sym_eig(np.eye(2))
        np.testing.assert_allclose(spectrum.eigenvalues, [1, 1])
        np.testing.assert_allclose(
            spectrum.eigenvectors.T @ spectrum.eigenvectors, np.eye(2), atol=1e-12
        )

    def test_diagonal(self):
        spectrum = linalg.sym_eig(np.diag([1.0, 3.0]))
        np.testing.assert_allclose(spectrum.eigenvalues, [3, 1])
        np.testing.assert_allclose(spectrum.eigenvectors, [[0, 1], [1, 0]], atol=1e-12)

    def test_rank_one(self):
        spectrum = linalg.sym_eig([[1, 1], [1, 1]])
        np.testing.assert_allclose(spectrum.eigenvalues, [2, 0], atol=1e-12)
        root = 1 / np.sqrt(2)
        self.assertAlmostEqual(abs(spectrum.eigenvectors[:, 0] @ [root, root]), 1.0)
        self.assertAlmostEqual(abs(spectrum.eigenvectors[:, 1] @ [root, -root]), 1.0)

    def test_sign_convention(self):
        rng = np.random.default_rng(0)
        U = linalg.sym_eig(random_spd(rng, 5)).eigenvectors
        for column in U.T:
            self.assertGreater(column[np.argmax(np.abs(column))], 0)

    def test_reconstruction(self):
        rng = np.random.default_rng(1)
        S = random_spd(rng, 6) - 3 * np.eye(6)
        spectrum = linalg.sym_eig(S)
        U, values = spectrum.eigenvectors, spectrum.eigenvalues
        self.assertTrue(np.all(np.diff(values) <= 0))
        scale = np.linalg.norm(S)
        self.assertLess(np.linalg.norm((U * values) @ U.T - S), 1e-10 * scale)
        self.assertLess(np.linalg.norm(U.T @ U - np.eye(6)), 1e-10)

    def test_rejects_asymmetric(self):
        with self.assertRaises(linalg.LinalgError):
            linalg.sym_eig([[1, 2], [0, 1]])
        with self.assertRaises(linalg.DimensionError):
            linalg.sym_eig(np.ones((2, 3)))


class TestOrthonormalBasis(unittest.TestCase):
    def test_single_column(self):
        Q = linalg.orthonormal_basis([[1.0], [1.0]])
        np.testing.assert_allclose(np.abs(Q[:, 0]), [1 / np.sqrt(2)] * 2)

    def test_identity(self):
        Q = linalg.orthonormal_basis(np.eye(3))
        np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(Q @ Q.T, np.eye(3), atol=1e-12)

    def test_projector(self):
        rng = np.random.default_rng(2)
        V = rng.normal(size=(3, 2))
        Q = linalg.orthonormal_basis(V)
        np.testing.assert_allclose(Q.T @ Q, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(
            linalg.projector(Q), V @ np.linalg.inv(V.T @ V) @ V.T, atol=1e-12
        )

    def test_empty(self):
        self.assertEqual(linalg.orthonormal_basis(np.zeros((4, 0))).shape, (4, 0))

    def test_rank_deficient(self):
        with self.assertRaises(linalg.RankError):
            linalg.orthonormal_basis([[1, 2], [2, 4], [3, 6]])
        with self.assertRaises(linalg.RankError):
            linalg.orthonormal_basis(np.ones((2, 3)))

    def test_complement(self):
        rng = np.random.default_rng(3)
        Q = linalg.orthonormal_basis(rng.normal(size=(5, 2)))
        Z = linalg.complement_basis(Q)
        self.assertEqual(Z.shape, (5, 3))
        np.testing.assert_allclose(Q.T @ Z, 0, atol=1e-12)
        np.testing.assert_allclose(Z.T @ Z, np.eye(3), atol=1e-12)


class TestDeterminants(unittest.TestCase):
    def test_empty_minor(self):
        self.assertEqual(linalg.det_minor(np.ones((3, 3)), []), linalg.ONE)
        self.assertEqual(linalg.det_minor(np.ones((3, 3)), []).value, 1.0)
        self.assertEqual(linalg.log_det(np.zeros((0, 0))), linalg.ONE)

    def test_diagonal(self):
        self.assertAlmostEqual(linalg.log_det(np.diag([2.0, 3.0])).value, 6.0)

    def test_cofactor(self):
        result = linalg.log_det([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
        self.assertEqual(result.sign, -1)
        self.assertAlmostEqual(result.value, -2.0)

    def test_singular(self):
        result = linalg.log_det(np.ones((2, 2)))
        self.assertEqual(result.sign, 0)
        self.assertEqual(result.log_abs, -np.inf)

    def test_minor(self):
        S = np.diag([2.0, 3.0, 5.0])
        self.assertAlmostEqual(linalg.det_minor(S, [0, 2]).value, 10.0)

    def test_negate(self):
        self.assertEqual(-linalg.make_logdet(1, 0.5), linalg.LogDet(-1, 0.5))
        self.assertEqual(linalg.make_logdet(1, -np.inf), linalg.ZERO)

    def test_cauchy_binet(self):
        rng = np.random.default_rng(4)
        A = rng.normal(size=(4, 6))
        B = rng.normal(size=(6, 4))
        total = sum(
            np.linalg.det(A[:, list(Y)]) * np.linalg.det(B[list(Y), :])
            for Y in itertools.combinations(range(6), 4)
        )
        expected = np.linalg.det(A @ B)
        self.assertLess(abs(total - expected), 1e-9 * max(1.0, abs(expected)))


class TestSaddlePoint(unittest.TestCase):
    def test_identity_and_ones(self):
        result = linalg.saddle_point_det(np.eye(2), [[1.0], [1.0]])
        self.assertAlmostEqual(result.value, -2.0)

    def test_zero_block(self):
        V = np.array([[2.0, 1.0], [0.0, 3.0]])
        result = linalg.saddle_point_det(np.zeros((2, 2)), V)
        self.assertAlmostEqual(result.value, np.linalg.det(V) ** 2)

    def test_exponential_pair(self):
        L = -np.array([[0.0, 1.0], [1.0, 0.0]])
        result = linalg.saddle_point_det(L, np.ones((2, 1)))
        self.assertAlmostEqual(result.value, -2.0)

    def test_no_columns(self):
        self.assertAlmostEqual(linalg.saddle_point_det(np.diag([2.0, 3.0]), None).value, 6.0)

    def test_empty_columns(self):
        L = np.diag([2.0, 3.0])
        self.assertEqual(linalg.saddle_point_det(np.zeros((0, 0)), np.zeros((0, 0))), linalg.ONE)
        self.assertAlmostEqual(linalg.saddle_point_det(L, np.zeros((2, 0))).value, 6.0)
        self.assertAlmostEqual(linalg.saddle_point_det(L, []).value, 6.0)
        self.assertAlmostEqual(linalg.coeff_tp_det(L, None).value, 6.0)
        with self.assertRaises(linalg.DimensionError):
            linalg.saddle_point_det(np.zeros((0, 0)), np.zeros((0, 1)))

    def test_too_many_columns(self):
        with self.assertRaises(linalg.DimensionError):
            linalg.saddle_point_det(np.eye(2), np.eye(2, 3))

    def test_rank_deficient_rows(self):
        result = linalg.saddle_point_det(np.eye(2), np.array([[1.0, 1.0], [1.0, 1.0]]))
        self.assertEqual(result.sign, 0)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 3))
    def test_orthogonal_complement_identity(self, seed, m, p):
        p = min(p, m)
        rng = np.random.default_rng(seed)
        L = random_spd(rng, m)
        V = rng.normal(size=(m, p))
        Q = linalg.complement_basis(linalg.orthonormal_basis(V))
        expected = (-1) ** p * np.linalg.det(V.T @ V) * np.linalg.det(Q.T @ L @ Q)
        result = linalg.saddle_point_det(L, V).value
        self.assertLess(abs(result - expected), 1e-8 * abs(expected))


class TestCoefficient(unittest.TestCase):
    def test_singular_off_span(self):
        result = linalg.coeff_tp_det(np.zeros((2, 2)), [[1.0], [0.0]])
        self.assertEqual(result.value, 0.0)

    def test_ones(self):
        self.assertAlmostEqual(linalg.coeff_tp_det(np.eye(2), [[1.0], [1.0]]).value, 2.0)

    def test_full_basis(self):
        self.assertAlmostEqual(linalg.coeff_tp_det(np.diag([1.0, 2.0]), np.eye(2)).value, 1.0)

    def test_interpolation(self):
        rng = np.random.default_rng(5)
        for p in (1, 2, 3):
            L = random_spd(rng, 5)
            V = rng.normal(size=(5, p))
            nodes = np.arange(p + 1, dtype=float)
            values = [np.linalg.det(L + t * V @ V.T) for t in nodes]
            leading = np.polyfit(nodes, values, p)[0]
            result = linalg.coeff_tp_det(L, V).value
            self.assertLess(abs(result - leading), 1e-6 * abs(leading))


class TestUpdates(unittest.TestCase):
    def test_zero_update(self):
        A = np.diag([2.0, 5.0])
        result = linalg.det_update(A, np.zeros((2, 1)), [[3.0]])
        self.assertAlmostEqual(result.value, 10.0)

    def test_rank_one(self):
        result = linalg.det_update(np.eye(2), [[1.0], [1.0]], [[1.0]])
        self.assertAlmostEqual(result.value, 3.0)

    def test_random(self):
        rng = np.random.default_rng(6)
        A = random_spd(rng, 4)
        U = rng.normal(size=(4, 2))
        W = random_spd(rng, 2)
        expected = np.linalg.det(A + U @ W @ U.T)
        self.assertLess(abs(linalg.det_update(A, U, W).value - expected), 1e-9 * expected)

    def test_singular(self):
        with self.assertRaises(linalg.SingularityError):
            linalg.det_update(np.ones((2, 2)), [[1.0], [0.0]], [[1.0]])
        with self.assertRaises(linalg.SingularityError):
            linalg.det_update(np.eye(2), [[1.0], [0.0]], [[0.0]])

    def test_schur_identity(self):
        self.assertAlmostEqual(linalg.schur_conditional(np.eye(4), [0, 2], 1), 1.0)
        self.assertAlmostEqual(linalg.schur_conditional(np.diag([1.0, 7.0]), [], 1), 7.0)

    def test_schur_minor_ratio(self):
        rng = np.random.default_rng(7)
        L = random_spd(rng, 5)
        Y, x = [0, 2, 4], 3
        ratio = np.linalg.det(L[np.ix_(Y + [x], Y + [x])]) / np.linalg.det(L[np.ix_(Y, Y)])
        self.assertLess(abs(linalg.schur_conditional(L, Y, x) - ratio), 1e-10 * ratio)

    def test_schur_errors(self):
        with self.assertRaises(linalg.SingularityError):
            linalg.schur_conditional(np.ones((3, 3)), [0, 1], 2)
        with self.assertRaises(linalg.LinalgError):
            linalg.schur_conditional(np.eye(3), [0, 1], 1)


class TestElementarySymmetric(unittest.TestCase):
    def test_values(self):
        self.assertAlmostEqual(linalg.elementary_symmetric([1, 2, 3], 2), 11.0)
        self.assertAlmostEqual(linalg.elementary_symmetric([1, 2, 3], 0), 1.0)
        self.assertAlmostEqual(linalg.elementary_symmetric([1, 2, 3], 1), 6.0)
        self.assertAlmostEqual(linalg.elementary_symmetric([1, 2, 3], 3), 6.0)
        self.assertEqual(linalg.elementary_symmetric([1, 2, 3], 4), 0.0)

    def test_projection(self):
        self.assertAlmostEqual(linalg.elementary_symmetric([1, 1, 1, 0, 0], 3), 1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8))
    def test_sum_of_minors(self, seed, n):
        rng = np.random.default_rng(seed)
        L = random_spd(rng, n, shift=0.1)
        eigenvalues = linalg.sym_eig(L).eigenvalues
        for m in range(n + 1):
            total = sum(
                linalg.det_minor(L, X).value for X in itertools.combinations(range(n), m)
            )
            self.assertLess(abs(linalg.elementary_symmetric(eigenvalues, m) - total), 1e-8 * total)


class TestPencil(unittest.TestCase):
    def test_example(self):
        U0, U1, lambda1 = linalg.pencil_limit_basis(np.ones((2, 2)), np.diag([1.0, 0.5]))
        root = 1 / np.sqrt(2)
        self.assertAlmostEqual(abs(U0[:, 0] @ [root, root]), 1.0)
        self.assertAlmostEqual(abs(U1[:, 0] @ [-root, root]), 1.0)
        # (-1, 1)/sqrt(2) diag(1, 1/2) (-1, 1)/sqrt(2) = 3/4.
        np.testing.assert_allclose(lambda1, [0.75])

    def test_full_rank(self):
        U0, U1, lambda1 = linalg.pencil_limit_basis(np.eye(3), np.eye(3))
        self.assertEqual(U0.shape, (3, 3))
        self.assertEqual(U1.shape, (3, 0))
        self.assertEqual(lambda1.size, 0)

    def test_first_order_eigenvalues(self):
        rng = np.random.default_rng(8)
        B = rng.normal(size=(5, 2))
        A0 = B @ B.T
        A1 = random_spd(rng, 5)
        U0, U1, lambda1 = linalg.pencil_limit_basis(A0, A1)
        basis = np.hstack([U0, U1])
        np.testing.assert_allclose(basis.T @ basis, np.eye(5), atol=1e-10)
        eps = 1e-6
        values = np.sort(np.linalg.eigvalsh(A0 + eps * A1))[::-1]
        leading = linalg.sym_eig(A0).eigenvalues[:2]
        np.testing.assert_allclose(values[:2], leading, rtol=1e-4)
        np.testing.assert_allclose(values[2:] / eps, lambda1, rtol=1e-4)

    def test_ambiguous_rank(self):
        A0 = np.diag([1.0, 1e-9, 0.0])
        with self.assertRaises(linalg.RankAmbiguityError):
            linalg.pencil_limit_basis(A0, np.eye(3))


class TestMisc(unittest.TestCase):
    def test_pseudo_inverse(self):
        S = np.array([[1.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_allclose(linalg.pseudo_inverse(S), S / 4, atol=1e-12)

    def test_gram(self):
        self.assertEqual(linalg.gram_det(np.zeros((3, 0))), linalg.ONE)
        self.assertAlmostEqual(linalg.gram_det(np.ones((3, 1))).value, 3.0)

    def test_split_rank(self):
        self.assertEqual(linalg.split_rank([2.0, 1.0, 1e-14]), 2)
        self.assertEqual(linalg.split_rank([]), 0)


if __name__ == "__main__":
    unittest.main()
