"""Implementation of the builtin stationary kernels.

This package is looked up by the driver script to figure out which kernel to
use. Each module defines a `Kernel` class implementing `flatdpp.kernel.KernelSpec`.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"
