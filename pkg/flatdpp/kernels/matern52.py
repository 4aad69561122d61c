"""Matern-type kernel f(t) = (3 + 3t + t^2) exp(-t), of smoothness order 3.

Note that f(0) = 3 (the profile is not normalized).
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import sympy

from flatdpp import kernel


class Kernel(kernel.SymbolicKernel):
    name = "matern52"

    def expression(self, t):
        return (3 + 3 * t + t**2) * sympy.exp(-t)
