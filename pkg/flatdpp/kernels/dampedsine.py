"""Damped sine kernel f(t) = sin(t + pi/4) exp(-t).

Same smoothness order (2) as the matern32 kernel, with a different Wronskian;
the two have identical univariate fixed-size flat limits.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import sympy

from flatdpp import kernel


class Kernel(kernel.SymbolicKernel):
    name = "dampedsine"

    def expression(self, t):
        return sympy.sin(t + sympy.pi / 4) * sympy.exp(-t)
