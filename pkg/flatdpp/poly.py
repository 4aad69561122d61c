"""Multivariate monomials, Vandermonde matrices and kernel Wronskians.

Monomials in d variables are ordered by total degree, and within a degree by
graded lexicographic order. For d = 2 the basis of degree <= 2 reads

  1, x1, x2, x1^2, x1*x2, x2^2

and this ordering is part of the output format (CSV headers list it).
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import functools
import math
from typing import List, NamedTuple, Tuple

import numpy as np
import scipy.linalg

from flatdpp import kernel
from flatdpp import linalg


MultiIndex = Tuple[int, ...]


class SmoothnessError(ValueError):
    "A kernel is not smooth enough for the requested Wronskian."


# The monomial basis of polynomials of degree <= k in d variables.
#
#   d: The number of variables.
#   exponents: A list of multi-indices, ordered by degree then graded lex.
class MonomialBasis(NamedTuple):
    d: int
    exponents: List[MultiIndex]

    @property
    def degree(self) -> int:
        return max((sum(alpha) for alpha in self.exponents), default=-1)


def counts(k: int, d: int) -> Tuple[int, int]:
    """Return (H, P): the number of monomials of degree exactly k and at most k.

    H_{k,d} = C(k+d-1, d-1) and P_{k,d} = C(k+d, d), with the convention
    H_{-1,d} = P_{-1,d} = 0.
    """
    if k < -1:
        raise ValueError("Invalid degree: {}".format(k))
    if k == -1:
        return 0, 0
    return math.comb(k + d - 1, d - 1), math.comb(k + d, d)


def magic_numbers(d: int, n: int) -> List[int]:
    """The sizes P_{k,d} for k = 0, 1, ... that do not exceed n."""
    result = []
    k = 0
    while counts(k, d)[1] <= n:
        result.append(counts(k, d)[1])
        k += 1
    return result


def degree_for_size(m: int, d: int) -> int:
    """The degree k such that P_{k-1,d} < m <= P_{k,d}."""
    k = 0
    while counts(k, d)[1] < m:
        k += 1
    return k


@functools.lru_cache(maxsize=None)
def _degree_block(d: int, degree: int) -> Tuple[MultiIndex, ...]:
    if d == 1:
        return ((degree,),)
    block = []
    for first in range(degree, -1, -1):
        for rest in _degree_block(d - 1, degree - first):
            block.append((first,) + rest)
    return tuple(block)


def monomials(d: int, k: int) -> MonomialBasis:
    """The monomial basis of degree <= k in d variables (empty for k = -1)."""
    exponents: List[MultiIndex] = []
    for degree in range(k + 1):
        exponents.extend(_degree_block(d, degree))
    return MonomialBasis(d, exponents)


def degree_slice(k: int, d: int) -> slice:
    """Column slice of the degree-k monomials within a basis of degree >= k."""
    return slice(counts(k - 1, d)[1], counts(k, d)[1])


def monomial_names(basis: MonomialBasis) -> List[str]:
    """Readable names for the monomials, e.g. "1", "x1", "x1^2*x2"."""
    names = []
    for alpha in basis.exponents:
        factors = [
            "x{}".format(i + 1) if power == 1 else "x{}^{}".format(i + 1, power)
            for i, power in enumerate(alpha)
            if power
        ]
        names.append("*".join(factors) or "1")
    return names


def vandermonde(gs: kernel.GroundSet, k: int) -> np.ndarray:
    """The multivariate Vandermonde matrix V_{<=k}, of shape n x P_{k,d}.

    Entry (i, j) is the j-th monomial of the basis evaluated at point i.
    """
    basis = monomials(gs.d, k)
    if not basis.exponents:
        return np.zeros((gs.n, 0))
    exponents = np.array(basis.exponents)
    return np.prod(gs.points[:, None, :] ** exponents[None, :, :], axis=2)


def vandermonde_block(gs: kernel.GroundSet, k: int) -> np.ndarray:
    """The columns of V_{<=k} of degree exactly k, V_k."""
    return vandermonde(gs, k)[:, degree_slice(k, gs.d)]


def _wronskian_entry(alpha: MultiIndex, beta: MultiIndex, taylor: np.ndarray) -> float:
    # Coefficient of x^alpha y^beta in sum_m f_{2m} |x - y|^{2m}.
    halves = []
    for a, b in zip(alpha, beta):
        if (a + b) % 2:
            return 0.0
        halves.append((a + b) // 2)
    m = sum(halves)
    coefficient = math.factorial(m)
    for a, b, h in zip(alpha, beta, halves):
        coefficient = coefficient // math.factorial(h) * math.comb(2 * h, a)
        coefficient *= (-1) ** b
    return coefficient * float(taylor[2 * m])


def wronskian(kern: kernel.KernelSpec, k: int, d: int) -> np.ndarray:
    """The Wronskian W_{<=k} of a stationary kernel in dimension d.

    Entries are the scaled derivatives kappa^(alpha, beta)(0, 0) / (alpha! beta!)
    of kappa(x, y) = f(|x - y|), indexed by the monomial basis of degree <= k.
    They are read off the exact polynomial sum_{m<=k} f_{2m} |x - y|^{2m}.

    Args:
      kern: A KernelSpec instance.
      k: The maximal degree.
      d: The dimension.
    Returns:
      A symmetric P_{k,d} x P_{k,d} array.
    Raises:
      SmoothnessError: If k >= r, so that the derivatives do not all exist.
    """
    r = kern.order()
    if k >= r:
        raise SmoothnessError(
            "Wronskian of degree {} needs smoothness order > {}, kernel has {}".format(
                k, k, r
            )
        )
    taylor = kern.taylor(2 * k + 1)
    basis = monomials(d, k).exponents
    W = np.array([[_wronskian_entry(a, b, taylor) for b in basis] for a in basis])
    return W


def wbar_schur(W: np.ndarray, k: int, d: int) -> np.ndarray:
    """Schur complement of the degree < k block within W_{<=k}.

    With W_{<=k} partitioned as [[W_{<=k-1}, W_ur], [W_ll, W_lr]] this returns
    W_lr - W_ll W_{<=k-1}^-1 W_ur, of size H_{k,d} x H_{k,d}.

    Raises:
      SingularityError: If the leading block is singular.
    """
    split = counts(k - 1, d)[1]
    lead, upper = W[:split, :split], W[:split, split:]
    lower, trailing = W[split:, :split], W[split:, split:]
    if split == 0:
        return trailing.copy()
    if linalg.log_det(lead).sign == 0:
        raise linalg.SingularityError("Singular leading Wronskian block")
    return trailing - lower @ scipy.linalg.solve(lead, upper)
