"""Brute-force oracles: exact enumeration of subset probabilities and comparisons.

Every probability table here is computed by visiting all 2^n subsets (or all
subsets of a given size) of a small ground set, so this is only usable for n up
to MAX_ENUMERATION. Masses are accumulated in log-domain.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import collections
import logging
from concurrent import futures
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import scipy.special

from flatdpp import kernel
from flatdpp import linalg
from flatdpp import nnp as nnp_lib
from flatdpp.nnp import NNP, SizeLaw
from flatdpp.sampling import Sample


# Largest ground set we accept to enumerate.
MAX_ENUMERATION = 20


class CapacityError(ValueError):
    "The ground set is too large for exhaustive enumeration."


# An exact (or empirical) probability table over subsets.
#
#   n: The size of the ground set.
#   subsets: A list of sorted index tuples, the subsets carrying the masses.
#   log_masses: A float array of unnormalized log-masses (-inf for zero mass),
#     aligned with subsets.
#   log_normalizer: The log of the total mass.
class PmfTable(NamedTuple):
    n: int
    subsets: List[Sample]
    log_masses: np.ndarray
    log_normalizer: float

    def probabilities(self) -> np.ndarray:
        """Normalized probabilities aligned with `subsets`."""
        return np.exp(self.log_masses - self.log_normalizer)

    def as_dict(self) -> Dict[Sample, float]:
        return dict(zip(self.subsets, self.probabilities()))

    def prob(self, X: Sequence[int]) -> float:
        """Probability of the subset X (zero if absent from the table)."""
        return self.as_dict().get(tuple(sorted(X)), 0.0)

    def size_law(self) -> SizeLaw:
        probabilities = np.zeros(self.n + 1)
        for subset, prob in zip(self.subsets, self.probabilities()):
            probabilities[len(subset)] += prob
        return SizeLaw(probabilities)

    def support(self, threshold: float = 0.0) -> List[Sample]:
        return [s for s, prob in zip(self.subsets, self.probabilities()) if prob > threshold]


def make_table(n: int, masses: Dict[Sample, float]) -> PmfTable:
    """A table from a mapping of subsets to nonnegative (unnormalized) masses."""
    subsets = [tuple(sorted(s)) for s in masses]
    with np.errstate(divide="ignore"):
        log_masses = np.log(np.array([masses[s] for s in masses], dtype=float))
    return _finish_table(n, subsets, log_masses)


def _finish_table(n: int, subsets: List[Sample], log_masses: np.ndarray) -> PmfTable:
    log_normalizer = float(scipy.special.logsumexp(log_masses)) if len(log_masses) else -np.inf
    if not np.isfinite(log_normalizer):
        raise linalg.NumericalError("Probability table has no mass")
    return PmfTable(n, subsets, log_masses, log_normalizer)


def iter_subsets(n: int, m: Optional[int] = None) -> List[Sample]:
    """All subsets of range(n) in bitmask order, or only those of size m."""
    if n > MAX_ENUMERATION:
        raise CapacityError(
            "Cannot enumerate subsets of {} points (limit {})".format(n, MAX_ENUMERATION)
        )
    subsets = []
    for mask in range(1 << n):
        subset = tuple(i for i in range(n) if mask >> i & 1)
        if m is None or len(subset) == m:
            subsets.append(subset)
    return subsets


def _log_mass(source: Union[NNP, np.ndarray], subset: Sample) -> float:
    if isinstance(source, NNP):
        result = nnp_lib.pmf_unnorm(source, subset)
    else:
        result = linalg.det_minor(source, subset)
        if result.sign < 0:
            logging.debug("Clamping negative minor exp(%g) on %s", result.log_abs, subset)
            result = linalg.ZERO
    return result.log_abs if result.sign > 0 else -np.inf


def _chunks(items: List, count: int) -> List[List]:
    size = max(1, -(-len(items) // max(count, 1)))
    return [items[i : i + size] for i in range(0, len(items), size)]


def enumerate_pmf(
    source: Union[NNP, np.ndarray], m: Optional[int] = None, workers: int = 1
) -> PmfTable:
    """Exact probability table of an extended L-ensemble or a raw L-ensemble.

    Args:
      source: An NNP instance, or a PSD matrix L for the L-ensemble DPP(L).
      m: If given, restrict to subsets of size m (the fixed-size process).
      workers: The number of threads sharing the subset range.
    Returns:
      A PmfTable over the enumerated subsets.
    Raises:
      CapacityError: If the ground set is too large.
    """
    if not isinstance(source, NNP):
        source = linalg.as_symmetric(source)
    n = source.n if isinstance(source, NNP) else source.shape[0]
    subsets = iter_subsets(n, m)
    logging.debug("Enumerating %d subsets on %d worker(s)", len(subsets), workers)

    def evaluate(chunk):
        return [_log_mass(source, subset) for subset in chunk]

    if workers > 1:
        with futures.ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(evaluate, _chunks(subsets, workers)))
    else:
        parts = [evaluate(subsets)]
    log_masses = np.array([value for part in parts for value in part], dtype=float)
    return _finish_table(n, subsets, log_masses)


def enumerate_kernel_pmf(
    kern: kernel.KernelSpec,
    gs: kernel.GroundSet,
    eps: float,
    m: Optional[int] = None,
    alpha: float = 1.0,
    scale_power: int = 0,
    dps: int = kernel.DEFAULT_DPS,
) -> PmfTable:
    """Exact table of DPP(alpha eps^-p L(eps)) in arbitrary precision.

    Minors of kernel matrices at small eps lose all their digits in double
    precision, so the whole computation runs at `dps` decimal digits and only
    the final log-masses are rounded to floats.

    Args:
      kern: A KernelSpec instance.
      gs: A GroundSet instance.
      eps: The kernel width.
      m: If given, the fixed-size process of size m (alpha and p then cancel).
      alpha, scale_power: The scaling alpha eps^-p applied to L(eps).
      dps: Decimal digits of working precision.
    Returns:
      A PmfTable instance.
    """
    subsets = iter_subsets(gs.n, m)
    with mpmath.workdps(dps):
        L = kernel.kernel_matrix_mp(kern, gs, eps)
        log_scale = mpmath.log(mpmath.mpf(alpha)) - scale_power * mpmath.log(mpmath.mpf(eps))
        log_masses = np.empty(len(subsets))
        for index, subset in enumerate(subsets):
            if not subset:
                log_masses[index] = 0.0
                continue
            minor = mpmath.matrix([[L[i, j] for j in subset] for i in subset])
            det = mpmath.det(minor)
            if det <= 0:
                logging.debug("Nonpositive minor %s on %s", mpmath.nstr(det, 5), subset)
                log_masses[index] = -np.inf
                continue
            log_masses[index] = float(mpmath.log(det) + len(subset) * log_scale)
    return _finish_table(gs.n, subsets, log_masses)


def tv_distance(a: PmfTable, b: PmfTable) -> float:
    """Total variation distance as the plain sum of |P(X) - Q(X)| (range [0, 2])."""
    pa, pb = a.as_dict(), b.as_dict()
    return float(sum(abs(pa.get(s, 0.0) - pb.get(s, 0.0)) for s in set(pa) | set(pb)))


def inclusion_probs(table: PmfTable) -> np.ndarray:
    """P(i in X) for every index i."""
    result = np.zeros(table.n)
    for subset, prob in zip(table.subsets, table.probabilities()):
        result[list(subset)] += prob
    return result


def marginal_probability(table: PmfTable, A: Sequence[int]) -> float:
    """P(A is a subset of X)."""
    A = set(A)
    return float(
        sum(prob for subset, prob in zip(table.subsets, table.probabilities()) if A <= set(subset))
    )


def empirical_pmf(
    sampler: Callable[[np.random.Generator], Sample],
    count: int,
    rng: np.random.Generator,
    n: int,
) -> PmfTable:
    """Empirical table of `count` draws from a sampler over a ground set of size n."""
    counter: Dict[Tuple[int, ...], int] = collections.Counter(
        tuple(sorted(sampler(rng))) for _ in range(count)
    )
    subsets = sorted(counter)
    log_masses = np.log(np.array([counter[s] for s in subsets], dtype=float))
    return PmfTable(n, subsets, log_masses, float(np.log(count)))
