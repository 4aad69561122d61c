"""Exact samplers for extended L-ensembles, based on their mixture representation.

Any extended L-ensemble (L, V) is a mixture of projection DPPs: draw a random
subset Y of the eigenvectors of the projected matrix Ltilde, each retained
independently with probability lambda/(1+lambda) (or, for a fixed size m, a
subset of size m-p with probability proportional to the product of its
eigenvalues), then sample the projection DPP onto span([Q, Utilde_Y]).

All samplers take an explicit numpy Generator and have no other state; use one
generator per thread (see `spawn_rngs`).
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from flatdpp import linalg
from flatdpp.nnp import NNP


# A sample is a sorted tuple of distinct ground-set indices.
Sample = Tuple[int, ...]

# Negative residual probabilities above this value are clamped to zero.
NEGATIVE_PROBABILITY_TOL = 1e-10

# Tolerance on U^T U = I for projection bases.
ORTHONORMALITY_TOL = 1e-8


class SamplingError(ValueError):
    "An error from invalid sampler input."


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """A seeded random generator; the same seed gives the same stream."""
    return np.random.default_rng(seed)


def spawn_rngs(seed: Optional[int], count: int) -> List[np.random.Generator]:
    """Independent generators for parallel use, derived from a single seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def sample_bernoulli_diag(lambdas, rng: np.random.Generator) -> Sample:
    """Sample the L-ensemble with diagonal L: i is kept w.p. lambda_i/(1+lambda_i)."""
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas < 0):
        raise SamplingError("Negative diagonal weights: {}".format(lambdas))
    keep = rng.random(lambdas.size) < lambdas / (1 + lambdas)
    return tuple(int(i) for i in np.flatnonzero(keep))


def sample_fixed_diag(lambdas, m: int, rng: np.random.Generator) -> Sample:
    """Sample m indices with probability proportional to the product of their weights.

    Indices are scanned in order; index i is taken with probability
    lambda_i e_{k-1}(lambda_{i+1:}) / e_k(lambda_{i:}) while k slots remain.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas < 0):
        raise SamplingError("Negative diagonal weights: {}".format(lambdas))
    n = lambdas.size
    if m < 0 or m > int(np.sum(lambdas > 0)):
        raise SamplingError(
            "Cannot draw {} items among {} positive weights".format(
                m, int(np.sum(lambdas > 0))
            )
        )
    # E[k, j] = e_k of the last j weights.
    E = linalg.elementary_symmetric_table(lambdas[::-1], m)
    selected = []
    k = m
    for i in range(n):
        if k == 0:
            break
        total = E[k, n - i]
        if total <= 0:
            break
        if rng.random() * total < lambdas[i] * E[k - 1, n - i - 1]:
            selected.append(i)
            k -= 1
    if k:
        raise linalg.NumericalError("Fixed-size selection ended with {} slots left".format(k))
    return tuple(selected)


def sample_projection(U, rng: np.random.Generator) -> Sample:
    """Chain-rule sampler of the projection DPP with marginal kernel U U^T.

    Each step draws a point with probability proportional to the diagonal of the
    residual kernel, then downdates the kernel by the chosen point's column.

    Raises:
      SamplingError: If the columns of U are not orthonormal.
      NumericalError: If a residual diagonal entry is significantly negative.
    """
    U = np.asarray(U, dtype=float)
    n, m = U.shape
    if np.max(np.abs(U.T @ U - np.eye(m)), initial=0.0) > ORTHONORMALITY_TOL:
        raise SamplingError("Projection basis columns are not orthonormal")
    K = U @ U.T
    selected = []
    for step in range(m):
        weights = np.diag(K).copy()
        if weights.min() < -NEGATIVE_PROBABILITY_TOL:
            raise linalg.NumericalError(
                "Negative residual probability {:.3g} at step {}".format(weights.min(), step)
            )
        weights[weights < 0] = 0.0
        weights[selected] = 0.0
        j = int(rng.choice(n, p=weights / weights.sum()))
        selected.append(j)
        K = K - np.outer(K[:, j], K[j, :]) / K[j, j]
    return tuple(sorted(selected))


def _mixture_sample(nnp: NNP, Y: Sample, rng: np.random.Generator) -> Sample:
    basis = np.hstack([nnp.Q, nnp.Utilde[:, list(Y)]])
    return sample_projection(basis, rng)


def sample_dpp(nnp: NNP, rng: np.random.Generator) -> Sample:
    """Sample the extended L-ensemble of an NNP."""
    Y = sample_bernoulli_diag(nnp.Lambdatilde, rng)
    return _mixture_sample(nnp, Y, rng)


def sample_fixed_dpp(nnp: NNP, m: int, rng: np.random.Generator) -> Sample:
    """Sample the fixed-size extended L-ensemble |DPP|_m of an NNP.

    Raises:
      SamplingError: If m is outside [p, p + q].
    """
    if m < nnp.p or m > nnp.p + nnp.q:
        raise SamplingError(
            "Size {} outside the support [{}, {}]".format(m, nnp.p, nnp.p + nnp.q)
        )
    Y = sample_fixed_diag(nnp.Lambdatilde, m - nnp.p, rng)
    return _mixture_sample(nnp, Y, rng)


def sample_many(
    sampler: Callable[[np.random.Generator], Sample], count: int, rng: np.random.Generator
) -> List[Sample]:
    """Draw `count` samples in sequence from a single generator."""
    logging.debug("Drawing %d samples", count)
    return [sampler(rng) for _ in range(count)]
