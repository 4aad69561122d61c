"""Dense symmetric linear algebra and determinant identities.

Everything in this module works on small dense numpy arrays. Determinants are
returned in log-domain with an explicit sign, since the masses of flat-limit
processes scale like high powers of the kernel width and underflow otherwise.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import logging
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg


# Relative threshold under which an eigenvalue (or singular value) is
# considered to be zero.
RANK_RTOL = 1e-10

# Width of the band around the rank threshold inside which an eigenvalue is
# considered ambiguous, as a multiplicative factor on either side.
RANK_AMBIGUITY_BAND = 1e3

# Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
SYMMETRY_RTOL = 1e-10


class LinalgError(ValueError):
    "An error from invalid input to a linear algebra routine."


class RankError(LinalgError):
    "A matrix does not have the rank required by a routine."


class RankAmbiguityError(RankError):
    "The numerical rank of a matrix cannot be decided at the given tolerance."


class SingularityError(LinalgError):
    "A matrix that has to be inverted is singular."


class DimensionError(LinalgError):
    "Matrix dimensions are incompatible."


class NumericalError(ArithmeticError):
    "A numerical procedure failed to converge or produced invalid values."


# A spectrum of a symmetric matrix.
#
#   eigenvalues: A 1-D array of reals, sorted in descending order.
#   eigenvectors: A 2-D array whose columns are the matching orthonormal
#     eigenvectors. The largest-magnitude entry of each column is positive.
class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


# A determinant in log-domain.
#
#   sign: An integer in {-1, 0, +1}.
#   log_abs: The natural log of the absolute value, -inf iff sign is 0.
class LogDet(NamedTuple):
    sign: int
    log_abs: float

    @property
    def value(self) -> float:
        """The determinant as a plain float (may under/overflow)."""
        if self.sign == 0:
            return 0.0
        return self.sign * float(np.exp(self.log_abs))

    def __neg__(self) -> "LogDet":
        return LogDet(-self.sign, self.log_abs)


ZERO = LogDet(0, -np.inf)
ONE = LogDet(1, 0.0)


def make_logdet(sign: float, log_abs: float) -> LogDet:
    """Normalize a (sign, log|det|) pair so that a zero sign means -inf."""
    if sign == 0 or not np.isfinite(log_abs) and log_abs < 0:
        return ZERO
    return LogDet(int(np.sign(sign)), float(log_abs))


def as_symmetric(S, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """Validate a square matrix as symmetric and return an exactly symmetric copy.

    Args:
      S: An array-like, square.
      rtol: Tolerated asymmetry relative to the largest entry.
    Returns:
      A float ndarray equal to (S + S^T) / 2.
    Raises:
      DimensionError: If S is not square.
      LinalgError: If S is not symmetric within tolerance.
    """
    S = np.array(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError("Matrix is not square: shape {}".format(S.shape))
    scale = np.max(np.abs(S)) if S.size else 0.0
    if S.size and np.max(np.abs(S - S.T)) > rtol * max(scale, 1.0):
        raise LinalgError("Matrix is not symmetric")
    return (S + S.T) / 2


def _fix_signs(U: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each column positive.
    if U.size == 0:
        return U
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1
    return U * signs


def sym_eig(S) -> Spectrum:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Args:
      S: A symmetric matrix.
    Returns:
      A Spectrum instance.
    Raises:
      NumericalError: If the eigensolver fails to converge.
    """
    S = as_symmetric(S)
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Eigensolver did not converge: {}".format(exc)) from exc
    order = np.argsort(eigenvalues)[::-1]
    return Spectrum(eigenvalues[order], _fix_signs(eigenvectors[:, order]))


def rank_threshold(values: np.ndarray, rtol: float = RANK_RTOL) -> float:
    """Absolute zero threshold for a collection of eigen/singular values."""
    if len(values) == 0:
        return 0.0
    return rtol * float(np.max(np.abs(values)))


def split_rank(
    values: np.ndarray, rtol: float = RANK_RTOL, strict: bool = False
) -> int:
    """Count the values above the relative rank threshold.

    Args:
      values: Eigenvalues (or singular values).
      rtol: Relative zero threshold.
      strict: If true, refuse values lying within the ambiguity band around the
        threshold.
    Returns:
      The number of values considered nonzero.
    Raises:
      RankAmbiguityError: In strict mode, if some value is too close to the
        threshold to be classified.
    """
    values = np.asarray(values, dtype=float)
    threshold = rank_threshold(values, rtol)
    if strict:
        low, high = threshold / RANK_AMBIGUITY_BAND, threshold * RANK_AMBIGUITY_BAND
        ambiguous = (np.abs(values) > low) & (np.abs(values) < high)
        if np.any(ambiguous):
            raise RankAmbiguityError(
                "Eigenvalues {} within the rank tolerance band".format(values[ambiguous])
            )
    return int(np.sum(np.abs(values) > threshold))


def orthonormal_basis(V, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the column span of a full column rank matrix.

    Args:
      V: An n x p array-like; p may be 0.
      rtol: Relative singular value threshold for the rank check.
    Returns:
      An n x p array Q with Q^T Q = I and span(Q) = span(V).
    Raises:
      RankError: If V is rank deficient.
    """
    V = np.array(V, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    n, p = V.shape
    if p == 0:
        return np.zeros((n, 0))
    if p > n:
        raise RankError("Cannot have {} independent columns in dimension {}".format(p, n))
    U, s, _ = scipy.linalg.svd(V, full_matrices=False)
    if s[-1] <= rtol * s[0]:
        raise RankError(
            "Rank-deficient basis: singular values {} (ratio {:.3g})".format(
                s, s[-1] / s[0]
            )
        )
    return _fix_signs(U)


def complement_basis(Q: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(Q)."""
    n, p = Q.shape
    if p == 0:
        return np.eye(n)
    if p == n:
        return np.zeros((n, 0))
    return _fix_signs(scipy.linalg.null_space(Q.T))


def log_det(S) -> LogDet:
    """Log-domain determinant. The empty matrix has determinant one."""
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return ONE
    sign, log_abs = np.linalg.slogdet(S)
    return make_logdet(sign, log_abs)


def det_minor(S, X: Sequence[int]) -> LogDet:
    """Determinant of the principal submatrix S[X, X]."""
    X = list(X)
    if not X:
        return ONE
    S = np.asarray(S, dtype=float)
    return log_det(S[np.ix_(X, X)])


def as_columns(V, rows: int) -> np.ndarray:
    """V as an explicit rows x p matrix; None and empty inputs give p = 0."""
    if V is None:
        return np.zeros((rows, 0))
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        return V[:, None] if V.size else np.zeros((rows, 0))
    if V.size == 0 and V.shape[0] != rows:
        return np.zeros((rows, V.shape[1]))
    return V


def saddle_point_det(L, V) -> LogDet:
    """Determinant of the saddle-point matrix [[L, V], [V^T, 0]].

    Args:
      L: An m x m symmetric matrix.
      V: An m x p matrix with p <= m, a vector (p = 1), or None (p = 0).
    Returns:
      A LogDet instance. It equals (-1)^p det(V^T V) det(Q^T L Q) with Q an
      orthonormal basis of the orthogonal complement of span(V). With p = 0
      it is det(L), one for the empty matrix.
    Raises:
      DimensionError: If p > m.
    """
    L = np.asarray(L, dtype=float)
    V = as_columns(V, L.shape[0])
    m, p = V.shape
    if p > m:
        raise DimensionError("Saddle point with {} columns on {} rows".format(p, m))
    if p == 0:
        return log_det(L)
    block = np.block([[L, V], [V.T, np.zeros((p, p))]])
    return log_det(block)


def coeff_tp_det(L, V) -> LogDet:
    """Coefficient of t^p in the polynomial t -> det(L + t V V^T).

    The polynomial has degree at most p, and its leading coefficient is the
    sign-corrected saddle-point determinant.
    """
    L = np.asarray(L, dtype=float)
    V = as_columns(V, L.shape[0])
    result = saddle_point_det(L, V)
    return -result if V.shape[1] % 2 else result


def det_update(A, U, W) -> LogDet:
    """Determinant of A + U W U^T from the low-rank update identity.

    det(A + U W U^T) = det(W^-1 + U^T A^-1 U) det(W) det(A).

    Raises:
      SingularityError: If A or W is singular.
    """
    A = np.asarray(A, dtype=float)
    W = np.atleast_2d(np.asarray(W, dtype=float))
    U = np.asarray(U, dtype=float).reshape(A.shape[0], W.shape[0])
    det_a = log_det(A)
    det_w = log_det(W)
    if det_a.sign == 0 or det_w.sign == 0:
        raise SingularityError("Singular matrix in low-rank determinant update")
    try:
        capacitance = scipy.linalg.inv(W) + U.T @ scipy.linalg.solve(A, U)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(str(exc)) from exc
    det_c = log_det(capacitance)
    return make_logdet(
        det_a.sign * det_w.sign * det_c.sign,
        det_a.log_abs + det_w.log_abs + det_c.log_abs,
    )


def schur_conditional(L, Y: Sequence[int], x: int) -> float:
    """Return L[x,x] - L[x,Y] L[Y,Y]^-1 L[Y,x].

    This is the ratio det(L_{Y+x}) / det(L_Y), the unnormalized conditional
    weight of item x given that Y was already selected.

    Raises:
      SingularityError: If L[Y,Y] is singular.
    """
    L = np.asarray(L, dtype=float)
    Y = list(Y)
    if x in Y:
        raise LinalgError("Item {} already in the conditioning set".format(x))
    if not Y:
        return float(L[x, x])
    L_Y = L[np.ix_(Y, Y)]
    if log_det(L_Y).sign == 0:
        raise SingularityError("Singular conditioning block for set {}".format(Y))
    try:
        solved = scipy.linalg.solve(L_Y, L[Y, x], assume_a="sym")
    except np.linalg.LinAlgError as exc:
        raise SingularityError(str(exc)) from exc
    return float(L[x, x] - L[x, Y] @ solved)


def elementary_symmetric_table(eigenvalues, m: int) -> np.ndarray:
    """Table E[k, i] = e_k(eigenvalues[:i]) for 0 <= k <= m, 0 <= i <= n.

    Computed with the recurrence E[k, i] = E[k, i-1] + lambda_i E[k-1, i-1].
    """
    lambdas = np.asarray(eigenvalues, dtype=float)
    n = lambdas.size
    E = np.zeros((m + 1, n + 1))
    E[0, :] = 1.0
    for k in range(1, m + 1):
        for i in range(1, n + 1):
            E[k, i] = E[k, i - 1] + lambdas[i - 1] * E[k - 1, i - 1]
    return E


def elementary_symmetric(eigenvalues, m: int) -> float:
    """The m-th elementary symmetric polynomial of the given values.

    Returns 0 when m is negative or larger than the number of values.
    """
    n = len(eigenvalues)
    if m < 0 or m > n:
        return 0.0
    return float(elementary_symmetric_table(eigenvalues, m)[m, n])


def pencil_limit_basis(
    A0, A1, rtol: float = RANK_RTOL
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Limiting eigenbasis of the pencil A0 + eps A1 as eps -> 0.

    Args:
      A0: A PSD matrix of rank p < n (full rank is allowed).
      A1: A PSD matrix.
      rtol: Relative threshold for the rank of A0.
    Returns:
      A triple (U0, U1tilde, lambda1): U0 (n x p) spans the range of A0,
      U1tilde (n x (n-p)) holds the eigenvectors of the projected matrix
      (I - U0 U0^T) A1 (I - U0 U0^T) on the complement, and lambda1 are the
      matching eigenvalues, descending. The columns of [U0, U1tilde] are
      orthonormal.
    Raises:
      RankAmbiguityError: If the rank of A0 cannot be decided.
    """
    spectrum = sym_eig(A0)
    p = split_rank(spectrum.eigenvalues, rtol, strict=True)
    logging.debug("Pencil leading matrix has rank %d of %d", p, len(spectrum.eigenvalues))
    U0 = spectrum.eigenvectors[:, :p]
    Z = spectrum.eigenvectors[:, p:]
    if Z.shape[1] == 0:
        return U0, Z, np.zeros(0)
    A1 = as_symmetric(A1)
    inner = sym_eig(Z.T @ A1 @ Z)
    return U0, _fix_signs(Z @ inner.eigenvectors), inner.eigenvalues


def projector(Q: np.ndarray) -> np.ndarray:
    """Orthogonal projector Q Q^T for orthonormal columns Q."""
    return Q @ Q.T


def pseudo_inverse(S, rtol: float = RANK_RTOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a symmetric matrix via its spectrum."""
    spectrum = sym_eig(S)
    keep = np.abs(spectrum.eigenvalues) > rank_threshold(spectrum.eigenvalues, rtol)
    U = spectrum.eigenvectors[:, keep]
    return (U / spectrum.eigenvalues[keep]) @ U.T


def gram_det(V: Optional[np.ndarray]) -> LogDet:
    """det(V^T V), one for an empty V."""
    if V is None or V.size == 0:
        return ONE
    return log_det(V.T @ V)
