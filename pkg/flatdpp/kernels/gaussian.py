"""The Gaussian (squared-exponential) kernel, f(t) = exp(-t^2).

The profile is a function of t^2, so every odd Taylor coefficient vanishes and
the kernel is infinitely smooth in the flat-limit sense.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import sympy

from flatdpp import kernel


class Kernel(kernel.SymbolicKernel):
    name = "gaussian"

    def expression(self, t):
        return sympy.exp(-(t**2))
