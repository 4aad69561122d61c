#!/usr/bin/env python3
"""Install script for flatdpp."""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

from setuptools import setup, find_packages


setup(
    name="flatdpp",
    version="0.1.0",
    description="Extended L-ensembles, samplers and flat limits of determinantal point processes",
    long_description="""
      Exact samplers and normalization constants for determinantal point
      processes written as extended L-ensembles, the limiting processes of
      kernel L-ensembles as the kernel becomes flat, and random spanning
      forests sampled with Wilson's algorithm.
      """,
    license="GNU GPLv2 only",
    author="flatdpp authors",
    packages=find_packages(),
    install_requires=[
        # Dense linear algebra and random number generation.
        "numpy",
        # Eigendecompositions, QR, root finding and distance matrices.
        "scipy",
        # Exact Taylor coefficients of the kernels and Wronskian matrices.
        "sympy",
        # Arbitrary precision determinants; flat kernel matrices underflow
        # double precision long before eps reaches the asymptotic regime.
        "mpmath",
        # Persistent cache of exact enumerations across runs.
        "diskcache",
    ],
    entry_points={
        "console_scripts": [
            "flat-dpp = flatdpp.cli:main",
        ]
    },
    python_requires=">=3.9",
)
