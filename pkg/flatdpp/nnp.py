"""Extended L-ensembles parameterized by nonnegative pairs (L, V).

A nonnegative pair (NNP) is a symmetric n x n matrix L together with an n x p
full column rank matrix V, such that L is conditionally positive semi-definite
with respect to V: the projection of L onto the orthogonal complement of
span(V) is PSD. The pair defines a point process with

  P(X = X) proportional to (-1)^p det [[L_X, V_X], [V_X^T, 0]].

With p = 0 this is an ordinary L-ensemble. Every DPP over a finite ground set
has such a representation, which is why all the other modules speak NNP.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import json
import logging
from typing import Any, Dict, NamedTuple, Optional, Sequence

import numpy as np

from flatdpp import linalg
from flatdpp.linalg import LogDet


# Default tolerance on negative eigenvalues of the projected matrix, relative
# to the spectral norm of L.
CPD_RTOL = 1e-8


class NNPError(ValueError):
    "An error from an invalid nonnegative pair."


class NotConditionallyPSDError(NNPError):
    "L is not conditionally positive semi-definite with respect to V."


class InvalidKernelError(NNPError):
    "A marginal kernel has eigenvalues outside of [0, 1]."


class NNPDomainError(NNPError):
    "A size or subset is outside the support of the process."


# A nonnegative pair with its cached spectral data.
#
#   L: The n x n symmetric matrix.
#   V: The n x p full column rank matrix (p may be 0).
#   Q: An orthonormal basis of span(V), n x p.
#   Ltilde: The projection (I - QQ^T) L (I - QQ^T).
#   Utilde: The eigenvectors of Ltilde with nonzero eigenvalue, n x q.
#   Lambdatilde: The matching positive eigenvalues, descending.
class NNP(NamedTuple):
    L: np.ndarray
    V: np.ndarray
    Q: np.ndarray
    Ltilde: np.ndarray
    Utilde: np.ndarray
    Lambdatilde: np.ndarray

    @property
    def n(self) -> int:
        return self.L.shape[0]

    @property
    def p(self) -> int:
        return self.V.shape[1]

    @property
    def q(self) -> int:
        return self.Utilde.shape[1]


# The distribution of the size of a sample.
#
#   probabilities: A 1-D array of length n+1, entry m is P(|X| = m).
class SizeLaw(NamedTuple):
    probabilities: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.arange(len(self.probabilities)) @ self.probabilities)

    def support(self, threshold: float = 0.0):
        """The sizes with probability above the threshold."""
        return [m for m, prob in enumerate(self.probabilities) if prob > threshold]


def make_nnp(L, V=None, tol: Optional[float] = None) -> NNP:
    """Validate a nonnegative pair and compute its cached spectral data.

    Args:
      L: An n x n symmetric array-like.
      V: An n x p array-like, or None for p = 0.
      tol: Absolute tolerance on negative eigenvalues of the projected matrix;
        defaults to CPD_RTOL times the spectral norm of L.
    Returns:
      An NNP instance.
    Raises:
      RankError: If V is rank deficient.
      NotConditionallyPSDError: If the projected matrix has an eigenvalue below
        -tol.
    """
    L = linalg.as_symmetric(L)
    n = L.shape[0]
    V = linalg.as_columns(V, n).copy()
    Q = linalg.orthonormal_basis(V)
    P = np.eye(n) - linalg.projector(Q)
    Ltilde = linalg.as_symmetric(P @ L @ P, rtol=1e-8)
    spectrum = linalg.sym_eig(Ltilde)
    scale = np.linalg.norm(L, 2) if n else 0.0
    if tol is None:
        tol = CPD_RTOL * max(scale, 1e-300)
    if spectrum.eigenvalues.size and spectrum.eigenvalues[-1] < -tol:
        raise NotConditionallyPSDError(
            "Projected matrix has eigenvalue {:.6g} < -{:.3g}".format(
                spectrum.eigenvalues[-1], tol
            )
        )
    # Ltilde vanishes on span(V), so at most n - p eigenvalues are kept.
    zero = linalg.RANK_RTOL * max(scale, np.max(np.abs(spectrum.eigenvalues), initial=0.0))
    keep = spectrum.eigenvalues > zero
    keep[n - Q.shape[1] :] = False
    Utilde = spectrum.eigenvectors[:, keep]
    Lambdatilde = spectrum.eigenvalues[keep]
    logging.debug("NNP with n=%d, p=%d, q=%d", n, Q.shape[1], Utilde.shape[1])
    return NNP(L, V, Q, Ltilde, Utilde, Lambdatilde)


def pmf_unnorm(nnp: NNP, X: Sequence[int]) -> LogDet:
    """Unnormalized mass (-1)^p det [[L_X, V_X], [V_X^T, 0]] of a subset.

    Args:
      nnp: An NNP instance.
      X: A sequence of distinct indices.
    Returns:
      A nonnegative LogDet (sign 0 or +1).
    """
    X = list(X)
    p = nnp.p
    if len(X) < p or len(X) > p + nnp.q:
        return linalg.ZERO
    L_X = nnp.L[np.ix_(X, X)]
    V_X = nnp.V[X, :]
    result = linalg.saddle_point_det(L_X, V_X)
    if p % 2:
        result = -result
    if result.sign < 0:
        logging.debug("Clamping negative mass exp(%g) on %s", result.log_abs, X)
        return linalg.ZERO
    return result


def log_normalization(nnp: NNP, m: Optional[int] = None) -> float:
    """Log of the normalization constant, see `normalization`."""
    log_gram = linalg.gram_det(nnp.V)
    if log_gram.sign <= 0:
        raise linalg.RankError("Degenerate Gram matrix V^T V")
    if m is None:
        return float(np.sum(np.log1p(nnp.Lambdatilde)) + log_gram.log_abs)
    if m < nnp.p or m > nnp.n:
        raise NNPDomainError("Size {} outside [{}, {}]".format(m, nnp.p, nnp.n))
    esp = linalg.elementary_symmetric(nnp.Lambdatilde, m - nnp.p)
    if esp <= 0:
        return -np.inf
    return float(np.log(esp) + log_gram.log_abs)


def normalization(nnp: NNP, m: Optional[int] = None) -> float:
    """Sum of the unnormalized masses over all subsets (of size m if given).

    Fixed size: e_{m-p}(Ltilde) det(V^T V). Varying size: det(I + Ltilde)
    det(V^T V).

    Raises:
      NNPDomainError: If m < p or m > n.
    """
    return float(np.exp(log_normalization(nnp, m)))


def marginal_kernel(nnp: NNP) -> np.ndarray:
    """The marginal kernel K = QQ^T + Ltilde (I + Ltilde)^-1."""
    U, lambdas = nnp.Utilde, nnp.Lambdatilde
    K = linalg.projector(nnp.Q) + (U * (lambdas / (1 + lambdas))) @ U.T
    return (K + K.T) / 2


def nnp_from_kernel(K, tol: float = 1e-10) -> NNP:
    """An NNP representing the DPP with marginal kernel K.

    V collects the eigenvectors of K with eigenvalue one, and L = K (I - K)^+.

    Raises:
      InvalidKernelError: If an eigenvalue of K lies outside [-tol, 1 + tol].
    """
    spectrum = linalg.sym_eig(K)
    mu = spectrum.eigenvalues
    if mu.size and (mu[0] > 1 + tol or mu[-1] < -tol):
        raise InvalidKernelError(
            "Marginal kernel eigenvalues must lie in [0, 1], got [{:.6g}, {:.6g}]".format(
                mu[-1], mu[0]
            )
        )
    unit = mu >= 1 - tol
    V = spectrum.eigenvectors[:, unit]
    rest = ~unit & (mu > tol)
    U = spectrum.eigenvectors[:, rest]
    L = (U * (mu[rest] / (1 - mu[rest]))) @ U.T
    return make_nnp(L, V)


def size_law(nnp: NNP) -> SizeLaw:
    """The law of |X|: P(m) = e_{m-p}(Lambdatilde) / det(I + Ltilde) for m >= p."""
    n, p = nnp.n, nnp.p
    lambdas = nnp.Lambdatilde
    table = linalg.elementary_symmetric_table(lambdas, len(lambdas))[:, -1]
    probabilities = np.zeros(n + 1)
    probabilities[p : p + len(table)] = table / np.prod(1 + lambdas)
    return SizeLaw(probabilities)


def complement(nnp: NNP) -> NNP:
    """The NNP of the complementary process Omega minus X.

    It is (Ltilde^+, Z), with Z an orthonormal basis of the directions in
    neither span(V) nor the range of Ltilde.
    """
    U, lambdas = nnp.Utilde, nnp.Lambdatilde
    pinv = (U / lambdas) @ U.T
    Z = linalg.complement_basis(np.hstack([nnp.Q, U]))
    return make_nnp(pinv, Z)


def apply_invariances(
    nnp: NNP,
    R: Optional[np.ndarray] = None,
    Xm: Optional[np.ndarray] = None,
    Ym: Optional[np.ndarray] = None,
) -> NNP:
    """The pair (L + V Xm^T + Ym V^T, V R), which defines the same process.

    Ym defaults to Xm, so that the new L stays symmetric.

    Raises:
      RankError: If R is singular.
      LinalgError: If the perturbed L is not symmetric.
    """
    n, p = nnp.n, nnp.p
    R = np.eye(p) if R is None else np.atleast_2d(np.asarray(R, dtype=float))
    if p and linalg.log_det(R).sign == 0:
        raise linalg.RankError("Singular change of basis for V")
    Xm = np.zeros((n, p)) if Xm is None else np.asarray(Xm, dtype=float).reshape(n, p)
    Ym = Xm if Ym is None else np.asarray(Ym, dtype=float).reshape(n, p)
    L = nnp.L + nnp.V @ Xm.T + Ym @ nnp.V.T
    return make_nnp(L, nnp.V @ R)


def nnp_to_json(nnp: NNP) -> Dict[str, Any]:
    """A JSON-compatible document {n, p, L, V} with row-major matrices."""
    return {
        "n": nnp.n,
        "p": nnp.p,
        "L": nnp.L.tolist(),
        "V": nnp.V.tolist(),
    }


def nnp_from_json(document) -> NNP:
    """Parse an NNP from a JSON string or an already decoded document."""
    if isinstance(document, str):
        document = json.loads(document)
    n, p = int(document["n"]), int(document.get("p", 0))
    L = np.array(document["L"], dtype=float).reshape(n, n)
    V = np.array(document.get("V", []), dtype=float).reshape(n, p)
    return make_nnp(L, V)
