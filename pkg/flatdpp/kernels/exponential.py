"""The exponential kernel, f(t) = exp(-t), of smoothness order 1."""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import sympy

from flatdpp import kernel


class Kernel(kernel.SymbolicKernel):
    name = "exponential"

    def expression(self, t):
        return sympy.exp(-t)
