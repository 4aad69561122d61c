"""Limiting processes of kernel L-ensembles in the flat limit eps -> 0.

For a stationary kernel of smoothness order r and a ground set in R^d, the
L-ensemble L(eps) = [f(eps |x_i - x_j|)] (fixed size m, or rescaled by
alpha eps^-p for the varying-size process) converges to a process that is
described here by a ProcessDescriptor. Depending on the regime it is:

- a projection DPP onto polynomials of low degree (universal: it only depends
  on the points),
- a partial-projection DPP built from the odd distance matrix
  (-1)^r D^(2r-1) and the Vandermonde matrix V_{<=r-1},
- a partial-projection DPP built from the Wronskian of the kernel (the only
  regime that depends on more than r),
- or the deterministic full ground set.

The module also covers the simpler pencil limits of eps A + V V^T, the scaling
that keeps the expected size of DPP(beta L(eps)) fixed, and a few data
products used by the experiment runner (conditional densities, inclusion
probabilities, eigenvalue orders).
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import enum
import logging
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import mpmath
import numpy as np
import scipy.optimize

from flatdpp import kernel
from flatdpp import linalg
from flatdpp import nnp as nnp_lib
from flatdpp import poly
from flatdpp import sampling
from flatdpp import verify
from flatdpp.kernel import INFINITE_ORDER, GroundSet, KernelSpec
from flatdpp.nnp import NNP, SizeLaw


# Kernel widths of the convergence experiments.
DEFAULT_EPS_GRID = (4.0, 1.5, 0.5, 0.1)

# Kernel width of the asymptotic checks against exact enumeration.
ASYMPTOTIC_EPS = 1e-3


class PhaseError(ValueError):
    "An error from an invalid size or scaling for a limit construction."


class DegeneratePointsError(linalg.RankError):
    "The points are not unisolvent for the polynomial space required."


class ProcessKind(enum.Enum):
    PROJECTION_DPP = "ProjectionDPP"
    FIXED_SIZE_L_ENSEMBLE = "FixedSizeLEnsemble"
    PP_DPP_FIXED = "PPDPPFixed"
    PP_DPP_VARYING = "PPDPPVarying"
    DETERMINISTIC_FULL = "DeterministicFull"


# A limiting process.
#
#   kind: A ProcessKind.
#   n: The size of the ground set.
#   nnp: The defining NNP; None for DETERMINISTIC_FULL. For PROJECTION_DPP it
#     is (0, V) with V spanning the projection range.
#   m: The sample size for fixed-size kinds, None otherwise.
#   alpha: The scale factor folded into the NNP for varying-size limits of
#     rescaled kernels, None otherwise.
class ProcessDescriptor(NamedTuple):
    kind: ProcessKind
    n: int
    nnp: Optional[NNP] = None
    m: Optional[int] = None
    alpha: Optional[float] = None


# A point of the varying-size phase diagram of DPP(alpha eps^-p L(eps)).
#
#   scale_power: The exponent p of the scaling (not the column count of V).
#   alpha: The scale factor, positive.
#   r: The smoothness order of the kernel.
#   n: The size of the ground set.
#   d: The dimension.
class PhasePoint(NamedTuple):
    scale_power: int
    alpha: float
    r: kernel.Order
    n: int
    d: int


def make_phase_point(
    kern: KernelSpec, gs: GroundSet, scale_power: int, alpha: float = 1.0
) -> PhasePoint:
    """Build a validated phase point for a kernel and a ground set."""
    if not alpha > 0:
        raise PhaseError("Scale factor must be positive: {}".format(alpha))
    if scale_power < 0 or int(scale_power) != scale_power:
        raise PhaseError("Invalid scale power: {}".format(scale_power))
    return PhasePoint(int(scale_power), float(alpha), kern.order(), gs.n, gs.d)


def _projection(V: np.ndarray) -> ProcessDescriptor:
    n, p = V.shape
    try:
        pair = nnp_lib.make_nnp(np.zeros((n, n)), V)
    except linalg.RankError as exc:
        raise DegeneratePointsError(str(exc)) from exc
    return ProcessDescriptor(ProcessKind.PROJECTION_DPP, n, pair, m=p)


def _make_pair(L: np.ndarray, V: np.ndarray) -> NNP:
    try:
        return nnp_lib.make_nnp(L, V)
    except linalg.RankError as exc:
        raise DegeneratePointsError(str(exc)) from exc


def distance_nnp(gs: GroundSet, r: int) -> NNP:
    """The pair ((-1)^r D^(2r-1), V_{<=r-1}).

    The odd distance matrix is conditionally positive definite with respect to
    polynomials of degree < r, which makes this a valid NNP for distinct,
    unisolvent points.
    """
    L = (-1) ** r * kernel.distance_matrix(gs, 2 * r - 1)
    return _make_pair(L, poly.vandermonde(gs, r - 1))


def fixed_limit(kern: KernelSpec, gs: GroundSet, m: int) -> ProcessDescriptor:
    """The limit of |DPP|_m(L(eps)) as eps -> 0.

    With k the degree such that P_{k-1,d} < m <= P_{k,d}:
    - m = P_{k,d} and k <= r-1: projection DPP onto V_{<=k};
    - m >= P_{r-1,d}: |ppDPP|_m((-1)^r D^(2r-1), V_{<=r-1});
    - otherwise: |ppDPP|_m(V_k Wbar V_k^T, V_{<=k-1}), with Wbar the Schur
      complement of the degree < k block in the Wronskian W_{<=k}.
    In dimension one every size is a P_{k,1}, so the last case never occurs.

    Raises:
      PhaseError: If m is not in [1, n].
      DegeneratePointsError: If the required Vandermonde matrix is rank
        deficient on the ground set.
    """
    n, d = gs.n, gs.d
    if not 1 <= m <= n:
        raise PhaseError("Size {} outside [1, {}]".format(m, n))
    r = kern.order()
    k = poly.degree_for_size(m, d)
    if k <= r - 1 and m == poly.counts(k, d)[1]:
        logging.debug("Fixed-size limit m=%d: projection onto degree <= %d", m, k)
        return _projection(poly.vandermonde(gs, k))
    if r != INFINITE_ORDER and m >= poly.counts(int(r) - 1, d)[1]:
        logging.debug("Fixed-size limit m=%d: odd distance matrix, r=%d", m, r)
        return ProcessDescriptor(ProcessKind.PP_DPP_FIXED, n, distance_nnp(gs, int(r)), m=m)
    logging.debug("Fixed-size limit m=%d: Wronskian Schur complement, k=%d", m, k)
    Wbar = poly.wbar_schur(poly.wronskian(kern, k, d), k, d)
    Vk = poly.vandermonde_block(gs, k)
    pair = _make_pair(Vk @ Wbar @ Vk.T, poly.vandermonde(gs, k - 1))
    return ProcessDescriptor(ProcessKind.PP_DPP_FIXED, n, pair, m=m)


def _half_degree(scale_power: int) -> int:
    # The integer among p/2 and (p+1)/2.
    return (scale_power + 1) // 2


def predicted_regime(phase: PhasePoint) -> Tuple[ProcessKind, List[int]]:
    """Classify a phase point: the limit kind and the support of its size law."""
    p, r, n, d = phase.scale_power, phase.r, phase.n, phase.d
    l = _half_degree(p)
    low = poly.counts(l - 1, d)[1]
    if low >= n or 2 * r < p + 1:
        return ProcessKind.DETERMINISTIC_FULL, [n]
    if 2 * r > p + 1:
        if p % 2:
            return ProcessKind.PROJECTION_DPP, [low]
        high = min(poly.counts(l, d)[1], n)
        return ProcessKind.PP_DPP_VARYING, list(range(low, high + 1))
    return ProcessKind.PP_DPP_VARYING, list(range(low, n + 1))


def varying_limit(kern: KernelSpec, gs: GroundSet, phase: PhasePoint) -> ProcessDescriptor:
    """The limit of DPP(alpha eps^-p L(eps)) as eps -> 0.

    With l the integer among p/2 and (p+1)/2:
    - P_{l-1,d} >= n, or r < (p+1)/2: the full ground set;
    - r > (p+1)/2, p odd: projection DPP onto V_{<=l-1};
    - r > (p+1)/2, p even: DPP(alpha V_l Wbar V_l^T, V_{<=l-1});
    - r = (p+1)/2: DPP(alpha f_{2r-1} D^(2r-1), V_{<=r-1}).
    """
    if (phase.r, phase.n, phase.d) != (kern.order(), gs.n, gs.d):
        raise PhaseError("Phase point {} does not match kernel and points".format(phase))
    n, d = gs.n, gs.d
    p, alpha, r = phase.scale_power, phase.alpha, phase.r
    l = _half_degree(p)
    kind, support = predicted_regime(phase)
    logging.debug("Varying-size limit p=%d r=%s: %s, sizes %s", p, r, kind.value, support)
    if kind is ProcessKind.DETERMINISTIC_FULL:
        return ProcessDescriptor(kind, n)
    if kind is ProcessKind.PROJECTION_DPP:
        return _projection(poly.vandermonde(gs, l - 1))
    if 2 * r > p + 1:
        Wbar = poly.wbar_schur(poly.wronskian(kern, l, d), l, d)
        Vl = poly.vandermonde_block(gs, l)
        pair = _make_pair(alpha * Vl @ Wbar @ Vl.T, poly.vandermonde(gs, l - 1))
        return ProcessDescriptor(kind, n, pair, alpha=alpha)
    r = int(r)
    leading = kern.taylor(2 * r)[2 * r - 1]
    L = alpha * leading * kernel.distance_matrix(gs, 2 * r - 1)
    pair = _make_pair(L, poly.vandermonde(gs, r - 1))
    return ProcessDescriptor(kind, n, pair, alpha=alpha)


def gamma_even_case(kern: KernelSpec, gs: GroundSet, l: int) -> float:
    """Odds factor gamma of the univariate even-power limit.

    gamma^-1 = ((V_{<=l}^T V_{<=l})^-1)_{l,l} ((W_{<=l})^-1)_{l,l} (last
    diagonal entries), and P(|X| = l) = 1 / (1 + alpha gamma).

    Raises:
      PhaseError: If the points are not univariate.
      DegeneratePointsError: If V_{<=l}^T V_{<=l} is singular.
    """
    if gs.d != 1:
        raise PhaseError("Odds factor needs univariate points, got d={}".format(gs.d))
    V = poly.vandermonde(gs, l)
    gram = V.T @ V
    if gs.n <= l or linalg.split_rank(linalg.sym_eig(gram).eigenvalues) < l + 1:
        raise DegeneratePointsError("Vandermonde of degree {} is rank deficient".format(l))
    W = poly.wronskian(kern, l, gs.d)
    return 1.0 / (np.linalg.inv(gram)[l, l] * np.linalg.inv(W)[l, l])


def pencil_fixed_limit(A, V, m: int) -> ProcessDescriptor:
    """The limit of |DPP|_m(eps A + V V^T) as eps -> 0.

    m < p: |DPP|_m(V V^T); m = p: the projection DPP onto span(V);
    m > p: |ppDPP|_m(A, V).

    Raises:
      RankError: If A is not full rank or V is rank deficient.
      PhaseError: If m is not in [1, n].
    """
    A = linalg.as_symmetric(A)
    n = A.shape[0]
    V = linalg.as_columns(V, n)
    p = V.shape[1]
    if linalg.split_rank(linalg.sym_eig(A).eigenvalues) < n:
        raise linalg.RankError("Pencil matrix A must be full rank")
    if not 1 <= m <= n:
        raise PhaseError("Size {} outside [1, {}]".format(m, n))
    linalg.orthonormal_basis(V)
    if m < p:
        return ProcessDescriptor(
            ProcessKind.FIXED_SIZE_L_ENSEMBLE, n, nnp_lib.make_nnp(V @ V.T), m=m
        )
    if m == p:
        return _projection(V)
    return ProcessDescriptor(ProcessKind.PP_DPP_FIXED, n, nnp_lib.make_nnp(A, V), m=m)


def pencil_varying_limit(A, V, rescaled: bool) -> ProcessDescriptor:
    """The limit of DPP(eps A + V V^T) (or of DPP(A + V V^T / eps) if rescaled).

    Rescaled, the limit is ppDPP(A, V). Otherwise it is DPP(V V^T), a plain
    L-ensemble; it is still tagged PP_DPP_VARYING, the tag of every
    varying-size extended L-ensemble, and its NNP has p = 0.
    """
    A = linalg.as_symmetric(A)
    n = A.shape[0]
    V = linalg.as_columns(V, n)
    if V.shape[1] == 0:
        pair = nnp_lib.make_nnp(A)
    elif rescaled:
        pair = nnp_lib.make_nnp(A, V)
    else:
        pair = nnp_lib.make_nnp(V @ V.T)
    return ProcessDescriptor(ProcessKind.PP_DPP_VARYING, n, pair)


def expected_size(eigenvalues, beta: float) -> float:
    """sum_i beta lambda_i / (1 + beta lambda_i)."""
    scaled = beta * np.asarray(eigenvalues, dtype=float)
    return float(np.sum(scaled / (1 + scaled)))


def solve_scaling(eigenvalues, m: float) -> float:
    """The unique beta > 0 such that DPP(beta L) has expected size m.

    Args:
      eigenvalues: The eigenvalues of L; nonpositive ones are ignored.
      m: The target expected size, strictly between 0 and the number of
        positive eigenvalues.
    Returns:
      beta, found by bisection.
    Raises:
      PhaseError: If m is infeasible.
    """
    lambdas = np.asarray(eigenvalues, dtype=float)
    lambdas = lambdas[lambdas > 0]
    if not 0 < m < lambdas.size:
        raise PhaseError(
            "Expected size {} infeasible with {} positive eigenvalues".format(m, lambdas.size)
        )
    high = 1.0
    while expected_size(lambdas, high) <= m:
        high *= 2.0
    beta = scipy.optimize.bisect(
        lambda b: expected_size(lambdas, b) - m,
        0.0,
        high,
        xtol=1e-300,
        rtol=4 * np.finfo(float).eps,
        maxiter=5000,
    )
    residual = abs(expected_size(lambdas, beta) - m)
    if residual > 1e-10:
        raise linalg.NumericalError("Scaling residual {:.3g} too large".format(residual))
    return float(beta)


def kernel_eigenvalues(
    kern: KernelSpec, gs: GroundSet, eps: float, dps: Optional[int] = None
) -> np.ndarray:
    """Eigenvalues of L(eps), descending; in arbitrary precision if dps is given."""
    if dps is None:
        return np.sort(np.linalg.eigvalsh(kernel.kernel_matrix(kern, gs, eps)))[::-1]
    with mpmath.workdps(dps):
        values = mpmath.eigsy(kernel.kernel_matrix_mp(kern, gs, eps), eigvals_only=True)
        return np.sort(np.array([float(values[i]) for i in range(gs.n)]))[::-1]


def scaling_path(
    kern: KernelSpec,
    gs: GroundSet,
    eps_values: Sequence[float],
    m: float,
    dps: Optional[int] = None,
) -> np.ndarray:
    """beta(eps) keeping the expected size of DPP(beta L(eps)) equal to m."""
    return np.array(
        [solve_scaling(kernel_eigenvalues(kern, gs, eps, dps), m) for eps in eps_values]
    )


def fit_scaling_power(eps_values: Sequence[float], betas: Sequence[float]) -> Tuple[float, float]:
    """Fit beta(eps) ~ alpha eps^-p in log-log scale, returning (alpha, p)."""
    slope, intercept = np.polyfit(np.log(eps_values), np.log(betas), 1)
    return float(np.exp(intercept)), float(-slope)


def eigenvalue_orders(
    kern: KernelSpec,
    gs: GroundSet,
    eps_values: Sequence[float],
    dps: Optional[int] = None,
) -> np.ndarray:
    """Fitted log-log slopes of each eigenvalue of L(eps) over the given widths."""
    spectra = np.array([kernel_eigenvalues(kern, gs, eps, dps) for eps in eps_values])
    logs = np.log(np.abs(spectra))
    return np.polyfit(np.log(eps_values), logs, 1)[0]


def predicted_eigen_orders(r: kernel.Order, n: int, d: int) -> List[int]:
    """Orders of the eigenvalues of L(eps): 2k for each degree-k monomial with
    k < r, then 2r-1 for the remaining ones."""
    orders: List[int] = []
    k = 0
    while len(orders) < n:
        if k <= r - 1:
            orders.extend([2 * k] * poly.counts(k, d)[0])
        else:
            orders.extend([2 * int(r) - 1] * n)
        k += 1
    return orders[:n]


def descriptor_nnp(desc: ProcessDescriptor) -> NNP:
    """The defining NNP; the full ground set is the projection onto everything."""
    if desc.kind is ProcessKind.DETERMINISTIC_FULL:
        return nnp_lib.make_nnp(np.zeros((desc.n, desc.n)), np.eye(desc.n))
    return desc.nnp


def descriptor_size_law(desc: ProcessDescriptor) -> SizeLaw:
    """The law of the sample size of a limiting process."""
    probabilities = np.zeros(desc.n + 1)
    if desc.kind is ProcessKind.DETERMINISTIC_FULL:
        probabilities[desc.n] = 1.0
    elif desc.kind is ProcessKind.PP_DPP_VARYING:
        return nnp_lib.size_law(desc.nnp)
    else:
        probabilities[desc.m] = 1.0
    return SizeLaw(probabilities)


def descriptor_pmf(desc: ProcessDescriptor, workers: int = 1) -> verify.PmfTable:
    """Exact probability table of a limiting process."""
    if desc.kind is ProcessKind.DETERMINISTIC_FULL:
        return verify.make_table(desc.n, {tuple(range(desc.n)): 1.0})
    if desc.kind is ProcessKind.PP_DPP_VARYING:
        return verify.enumerate_pmf(desc.nnp, workers=workers)
    return verify.enumerate_pmf(desc.nnp, m=desc.m, workers=workers)


def sample_descriptor(desc: ProcessDescriptor, rng: np.random.Generator) -> sampling.Sample:
    """Draw one sample of a limiting process."""
    if desc.kind is ProcessKind.DETERMINISTIC_FULL:
        return tuple(range(desc.n))
    if desc.kind is ProcessKind.PROJECTION_DPP:
        return sampling.sample_projection(desc.nnp.Q, rng)
    if desc.kind is ProcessKind.PP_DPP_VARYING:
        return sampling.sample_dpp(desc.nnp, rng)
    return sampling.sample_fixed_dpp(desc.nnp, desc.m, rng)


def descriptor_to_json(desc: ProcessDescriptor) -> Dict[str, Any]:
    """A JSON-compatible document: tag, n, m, alpha and the NNP matrices."""
    return {
        "tag": desc.kind.value,
        "n": desc.n,
        "m": desc.m,
        "alpha": desc.alpha,
        "nnp": nnp_lib.nnp_to_json(desc.nnp) if desc.nnp is not None else None,
    }


def _log_full_det_mp(kern: KernelSpec, gs: GroundSet, eps: float, dps: int) -> float:
    with mpmath.workdps(dps):
        det = mpmath.det(kernel.kernel_matrix_mp(kern, gs, eps))
        return float(mpmath.log(det)) if det > 0 else -np.inf


def _log_limit_mass(kern: KernelSpec, gs: GroundSet) -> float:
    desc = fixed_limit(kern, gs, gs.n)
    mass = nnp_lib.pmf_unnorm(desc.nnp, range(gs.n))
    return mass.log_abs if mass.sign > 0 else -np.inf


def conditional_density(
    kern: KernelSpec,
    fixed_points: Sequence[float],
    grid: Sequence[float],
    eps: Optional[float] = None,
    dps: int = kernel.DEFAULT_DPS,
) -> np.ndarray:
    """Density of the last point of a univariate fixed-size process.

    The other points are held at `fixed_points`; the process has size
    len(fixed_points) + 1 and is the L-ensemble of the kernel at width eps, or
    its flat limit when eps is None. Grid points coinciding with a fixed point,
    or too close to one for the limit to be computed, get density zero. The
    result integrates to one over the (uniform) grid.
    """
    grid = np.asarray(grid, dtype=float)
    fixed = [float(x) for x in fixed_points]
    logs = np.full(grid.size, -np.inf)
    for index, x in enumerate(grid):
        if any(x == y for y in fixed):
            continue
        gs = kernel.make_ground_set(fixed + [x])
        if eps is None:
            try:
                logs[index] = _log_limit_mass(kern, gs)
            except DegeneratePointsError:
                logging.debug("Degenerate points at grid value %g", x)
        else:
            logs[index] = _log_full_det_mp(kern, gs, eps, dps)
    weights = np.exp(logs - np.max(logs))
    spacing = float(np.mean(np.diff(grid))) if grid.size > 1 else 1.0
    return weights / (weights.sum() * spacing)


def limit_inclusion_probs(kern: KernelSpec, gs: GroundSet, m: int) -> np.ndarray:
    """Inclusion probabilities of the fixed-size flat limit, by enumeration."""
    return verify.inclusion_probs(descriptor_pmf(fixed_limit(kern, gs, m)))
