"""Matern-type kernel f(t) = (1 + t) exp(-t).

Its expansion 1 - t^2/2 + t^3/3 - ... has f_1 = 0 and f_3 = 1/3, so the
smoothness order is 2.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import sympy

from flatdpp import kernel


class Kernel(kernel.SymbolicKernel):
    name = "matern32"

    def expression(self, t):
        return (1 + t) * sympy.exp(-t)
