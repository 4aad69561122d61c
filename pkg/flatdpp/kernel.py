"""Interface definition for stationary kernels, ground sets and kernel matrices.

A stationary kernel is described by its radial profile f, so that
kappa_eps(x, y) = f(eps * |x - y|). The flat-limit constructions only need
three things from a kernel: its profile, the Taylor coefficients of the profile
at zero, and its smoothness order r (the index of the first nonvanishing odd
coefficient, f_{2r-1} != 0).

Kernels are looked up by name, first in the default package where the builtin
kernels live, then as a full module path. Each such module defines a class named
`Kernel` implementing the interface below, so you can write your own kernels
without modifying this package:

  flat-dpp limit --kernel gaussian ...
  flat-dpp limit --kernel mykernels.wendland ...
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import functools
import logging
import math
import sys
from typing import Dict, List, NamedTuple, Optional, Sequence, Union

import mpmath
import numpy as np
import scipy.spatial.distance
import sympy


# Sentinel smoothness order of infinitely smooth (even) profiles.
INFINITE_ORDER = math.inf

# Number of Taylor coefficients stored by symbolic kernels.
MAX_TAYLOR_TERMS = 24

# The Python package where the builtin kernels are found.
DEFAULT_PACKAGE = "flatdpp.kernels"

# Names of the builtin kernels, in catalog order.
BUILTIN_KERNELS = ["gaussian", "exponential", "matern32", "matern52", "dampedsine"]

# Default decimal precision of arbitrary-precision kernel matrices.
DEFAULT_DPS = 100


Order = Union[int, float]


class KernelError(ValueError):
    "An error from an invalid kernel, kernel width or ground set."


# A set of distinct points with a fixed ordering.
#
#   points: An n x d float array, one point per row.
class GroundSet(NamedTuple):
    points: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


class KernelSpec:
    """Interface to be implemented by all stationary kernels.

    Notes about arguments below:
      `t` arguments: Nonnegative scaled distances eps * |x - y|, as a scalar or
        a numpy array. Implementations should also accept negative values and
        evaluate the analytic continuation of the profile, which is what the
        Taylor coefficients describe.
      `count` arguments: The number of Taylor coefficients requested,
        f_0 .. f_{count-1}.

    Kernels are immutable; a single instance may be shared across threads.
    """

    # A short name for the kernel, used in outputs.
    name: str = ""

    def profile(self, t):
        """Evaluate the radial profile f on an array of scaled distances.

        Args:
          t: A float or numpy array.
        Returns:
          An array of the same shape.
        """
        raise NotImplementedError

    def profile_mp(self, t):
        """Evaluate the radial profile in arbitrary precision.

        Args:
          t: An mpmath mpf instance.
        Returns:
          An mpmath mpf instance, at the current mpmath working precision.
        """
        raise NotImplementedError

    def taylor(self, count: int) -> np.ndarray:
        """Return the Taylor coefficients f_i = f^(i)(0) / i!.

        Args:
          count: The number of coefficients required.
        Returns:
          A float array of length count.
        Raises:
          KernelError: If the kernel does not carry that many coefficients.
        """
        raise NotImplementedError

    def order(self) -> Order:
        """Return the smoothness order r, or INFINITE_ORDER."""
        raise NotImplementedError

    def __repr__(self):
        return "<Kernel {} r={}>".format(self.name, self.order())


class SymbolicKernel(KernelSpec):
    """A kernel whose profile is given as a sympy expression.

    Subclasses implement `expression(t)`. The profile is lambdified once for
    numpy and once for mpmath, and the Taylor coefficients are read off the
    symbolic series expansion, so they are exact up to the final float
    conversion.
    """

    def expression(self, t: sympy.Symbol) -> sympy.Expr:
        """Return the profile as a sympy expression of the symbol t."""
        raise NotImplementedError

    @functools.cached_property
    def _symbol(self) -> sympy.Symbol:
        return sympy.Symbol("t", real=True)

    @functools.cached_property
    def _numpy_profile(self):
        return sympy.lambdify(self._symbol, self.expression(self._symbol), "numpy")

    @functools.cached_property
    def _mpmath_profile(self):
        return sympy.lambdify(self._symbol, self.expression(self._symbol), "mpmath")

    @functools.cached_property
    def exact_taylor(self) -> List[sympy.Expr]:
        """The first MAX_TAYLOR_TERMS Taylor coefficients as exact expressions."""
        t = self._symbol
        series = sympy.series(self.expression(t), t, 0, MAX_TAYLOR_TERMS).removeO()
        series = sympy.expand(series)
        return [sympy.simplify(series.coeff(t, i)) for i in range(MAX_TAYLOR_TERMS)]

    def profile(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self._numpy_profile(t), t.shape).astype(float)

    def profile_mp(self, t):
        return self._mpmath_profile(t)

    def taylor(self, count: int) -> np.ndarray:
        if count > MAX_TAYLOR_TERMS:
            raise KernelError(
                'Kernel "{}" carries only {} Taylor coefficients, {} requested'.format(
                    self.name, MAX_TAYLOR_TERMS, count
                )
            )
        return np.array([float(c) for c in self.exact_taylor[:count]])

    def order(self) -> Order:
        return order_from_taylor(self.exact_taylor)


def order_from_taylor(coefficients: Sequence) -> Order:
    """Smoothness order r = min{r : f_{2r-1} != 0} from Taylor coefficients.

    Args:
      coefficients: f_0, f_1, ... as numbers or exact sympy values.
    Returns:
      The order, or INFINITE_ORDER if no odd coefficient is nonzero.
    """
    for i in range(1, len(coefficients), 2):
        if coefficients[i] != 0:
            return (i + 1) // 2
    return INFINITE_ORDER


def validate_kernel(kernel: KernelSpec):
    """Check a kernel's declared order against its Taylor data.

    Args:
      kernel: A KernelSpec instance.
    Raises:
      KernelError: If the declared order disagrees with the first nonzero odd
        coefficient, or if sign(f_{2r-1}) != (-1)^r.
    """
    r = kernel.order()
    if r == INFINITE_ORDER:
        coefficients = kernel.taylor(MAX_TAYLOR_TERMS)
        odd = coefficients[1::2]
        if np.any(odd != 0):
            raise KernelError(
                'Kernel "{}" declared infinitely smooth with odd coefficients {}'.format(
                    kernel.name, odd
                )
            )
        return
    if r < 1 or int(r) != r:
        raise KernelError('Invalid smoothness order for "{}": {}'.format(kernel.name, r))
    r = int(r)
    coefficients = kernel.taylor(2 * r)
    if np.any(coefficients[1 : 2 * r - 1 : 2] != 0):
        raise KernelError(
            'Kernel "{}" has a nonzero odd coefficient below order {}'.format(
                kernel.name, r
            )
        )
    leading = coefficients[2 * r - 1]
    if leading == 0 or np.sign(leading) != (-1) ** r:
        raise KernelError(
            'Kernel "{}": f_{} = {} must be nonzero with sign (-1)^{}'.format(
                kernel.name, 2 * r - 1, leading, r
            )
        )


def import_kernel(name: str):
    """Import the kernel module defined by the given name.

    The default location is handled here.

    Args:
      name: A string, the name of a Python module, which may be within the
        default package or a full name.
    Returns:
      A corresponding Python module object.
    Raises:
      ImportError: If the module cannot be imported.
    """
    default_name = "{}.{}".format(DEFAULT_PACKAGE, name)
    try:
        __import__(default_name)
        return sys.modules[default_name]
    except ImportError:
        try:
            __import__(name)
            return sys.modules[name]
        except ImportError as exc:
            raise ImportError('Could not find kernel module "{}"'.format(name)) from exc


def get_kernel(name: str) -> KernelSpec:
    """Instantiate and validate the kernel of a module looked up by name."""
    module = import_kernel(name)
    kernel = module.Kernel()
    validate_kernel(kernel)
    logging.debug("Using kernel %s", kernel)
    return kernel


def builtin_kernels() -> Dict[str, KernelSpec]:
    """Return the catalog of builtin kernels, keyed by name."""
    return {name: get_kernel(name) for name in BUILTIN_KERNELS}


def make_ground_set(points) -> GroundSet:
    """Build a ground set from an array of points, checking distinctness.

    Args:
      points: An array-like of shape (n, d), or (n,) for univariate points.
    Returns:
      A GroundSet instance.
    Raises:
      KernelError: If two points coincide or the array is malformed.
    """
    points = np.array(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[0] == 0:
        raise KernelError("Invalid ground set shape: {}".format(points.shape))
    if points.shape[0] > 1 and np.min(scipy.spatial.distance.pdist(points)) == 0:
        raise KernelError("Ground set points are not pairwise distinct")
    return GroundSet(points)


def uniform_ground_set(n: int, d: int, seed: int) -> GroundSet:
    """n points drawn uniformly in the unit cube [0, 1]^d."""
    rng = np.random.default_rng(seed)
    return make_ground_set(rng.uniform(size=(n, d)))


def grid_ground_set(n: int, d: int) -> GroundSet:
    """The first n points of a regular grid of [0, 1]^d, in row-major order."""
    side = max(2, int(math.ceil(n ** (1.0 / d))))
    axes = np.meshgrid(*[np.linspace(0.0, 1.0, side)] * d, indexing="ij")
    grid = np.stack([axis.ravel() for axis in axes], axis=1)
    return make_ground_set(grid[:n])


def _distances(gs: GroundSet) -> np.ndarray:
    return scipy.spatial.distance.cdist(gs.points, gs.points)


def kernel_matrix(kernel: KernelSpec, gs: GroundSet, eps: float) -> np.ndarray:
    """The kernel matrix L(eps)_ij = f(eps |x_i - x_j|).

    Raises:
      KernelError: If eps is not positive.
    """
    if not eps > 0:
        raise KernelError("Kernel width must be positive: {}".format(eps))
    L = kernel.profile(eps * _distances(gs))
    return (L + L.T) / 2


def kernel_matrix_mp(
    kernel: KernelSpec, gs: GroundSet, eps, dps: Optional[int] = None
) -> mpmath.matrix:
    """The kernel matrix evaluated in arbitrary precision.

    The result uses the current mpmath working precision, or `dps` decimal
    digits if given; callers doing further arithmetic on it should hold the
    same precision.
    """
    if not eps > 0:
        raise KernelError("Kernel width must be positive: {}".format(eps))
    with mpmath.workdps(dps or mpmath.mp.dps):
        eps = mpmath.mpf(eps)
        n = gs.n
        L = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(i, n):
                diff = [mpmath.mpf(a) - mpmath.mpf(b) for a, b in zip(gs.points[i], gs.points[j])]
                distance = mpmath.sqrt(mpmath.fsum(x * x for x in diff))
                L[i, j] = L[j, i] = kernel.profile_mp(eps * distance)
        return L


def distance_matrix(gs: GroundSet, power: int) -> np.ndarray:
    """The matrix D^(p) = [|x_i - x_j|^p]; D^(0) is all ones."""
    if power == 0:
        return np.ones((gs.n, gs.n))
    return _distances(gs) ** power


def taylor_expand_matrix(
    kernel: KernelSpec, gs: GroundSet, eps: float, order: int
) -> np.ndarray:
    """Partial sum of the kernel matrix expansion sum_{i<=order} eps^i f_i D^(i).

    Raises:
      KernelError: If the kernel does not carry order+1 coefficients.
    """
    coefficients = kernel.taylor(order + 1)
    result = np.zeros((gs.n, gs.n))
    for i, coefficient in enumerate(coefficients):
        if coefficient:
            result += eps**i * coefficient * distance_matrix(gs, i)
    return result
