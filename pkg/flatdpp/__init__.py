"""Sample determinantal point processes and compute the flat limits of kernel L-ensembles.

This package represents every determinantal point process (DPP) over a finite
ground set as an extended L-ensemble: a nonnegative pair (L, V) where L is
conditionally positive semi-definite with respect to the columns of V. It
provides exact samplers, conversions to and from marginal kernels, and the
limiting processes of L-ensembles built from smooth kernel matrices when the
kernel becomes flat (eps -> 0).

The command line tool runs the experiments and writes plain CSV or JSON:

  flat-dpp limit --kernel gaussian --points "0.1 0.3 0.5 0.9" -m 3
  flat-dpp sample --nnp pair.json --draws 1000 --seed 42
  flat-dpp converge --kernel exponential --random 6 -d 2 -m 4 -o tv.csv
  flat-dpp phase --kernel matern32 --grid 5
  flat-dpp forest --edges graph.txt -q 0.5 --draws 100000 --seed 1

Kernels
-------

A kernel is named on the command line with --kernel. The name is first looked up
in the "flatdpp.kernels" package, where the builtin kernels live (gaussian,
exponential, matern32, matern52, dampedsine), then as a full module path. That
module must define a class named Kernel implementing
flatdpp.kernel.KernelSpec, so you can use your own kernels without modifying
this package:

  flat-dpp limit --kernel mykernels.wendland --points "0 0.5 1" -m 2

The flat limit of a kernel only depends on its smoothness order r (the first
odd Taylor coefficient of its radial profile that does not vanish), and for
some sizes on its Wronskian, so two kernels of the same order often share the
same limits.

Ground Sets
-----------

Exactly one of these options gives the points:

  --points "0.1 0.3 0.5"       Univariate points.
  --points "0,0; 1,0; 0,1"     Points in the plane (coordinates joined by commas).
  --random 8 -d 2 --seed 3     Uniform points in the unit square.
  --grid 9 -d 2                The first points of a regular grid.

Processes
---------

With -m, commands consider the fixed-size process |DPP|_m(L(eps)). Without
it, they consider the varying-size process DPP(alpha eps^-p L(eps)), with the
exponent set by --scale-power and the factor by --alpha. The limit command
prints the limiting process as JSON, tagged with its kind (ProjectionDPP,
FixedSizeLEnsemble, PPDPPFixed, PPDPPVarying or DeterministicFull) along with
its (L, V) matrices.

The sample command draws from an NNP stored as JSON (--nnp), from the kernel
L-ensemble at the first --eps value, or from the flat limit (--limit). It
writes one row per draw:

  draw_id,indices
  0,1 4 5

Convergence
-----------

The converge command compares the exact distribution at each --eps value (by
default 4, 1.5, 0.5 and 0.1) with the flat limit, in total variation. The
exact distributions enumerate all subsets of the ground set in arbitrary
precision (--dps decimal digits), so keep the ground set small. With an output
file, it also writes the inclusion probabilities next to it, and with
--conditional the densities of the last point of a univariate process given
fixed other points:

  flat-dpp converge --kernel matern32 --points "0.1 0.3 0.5 0.9 0.7" -m 5 \\
    --conditional "0.1 0.3 0.5 0.9" -o matern32.csv

The phase command tabulates the regimes of the varying-size process for every
exponent from 0 to 2n, comparing the predicted size support with the one
observed at a tiny kernel width.

Random Forests
--------------

The forest command samples rooted spanning forests of a weighted graph with
Wilson's algorithm and compares the frequency at which each vertex is a root
with the diagonal of q (qI + L)^-1, L being the graph Laplacian. The graph is
read from a file with one "u v weight" edge per line.

Configuration
-------------

All the options can be given in a JSON document, whose keys are the option
names (e.g. "kernel", "points", "size", "scale_power", "eps"):

  flat-dpp converge --config experiment.json --eps 0.1

Options given on the command line override the document. Commands that draw
random numbers require a seed; a given seed always produces the same output.

Caching
-------

Exact enumerations are cached on disk. You can disable the cache with an option:

  flat-dpp converge --no-cache ...

You can also clear the cache before running:

  flat-dpp converge --clear-cache ...

Exit Status
-----------

The tool exits with status 2 on invalid input (bad options, points or
matrices) and with status 3 on numerical failures.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"
