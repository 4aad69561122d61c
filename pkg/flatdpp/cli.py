"""Driver code for the flat-dpp experiment runner."""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import argparse
import codecs
import contextlib
import csv
import hashlib
import json
import logging
import os
import re
import sys
import tempfile
from os import path
from typing import Any, Callable, Dict, List, Optional, Sequence

import diskcache
import numpy as np

import flatdpp
from flatdpp import flatlimit
from flatdpp import forest
from flatdpp import kernel
from flatdpp import nnp as nnp_lib
from flatdpp import sampling
from flatdpp import verify
from flatdpp.flatlimit import ProcessDescriptor


# The cache of exact kernel pmfs, a diskcache.Cache instance, or None.
_CACHE = None

# Values of the options that neither the command line nor the configuration
# document has set.
DEFAULTS: Dict[str, Any] = {
    "kernel": "gaussian",
    "dimension": 1,
    "alpha": 1.0,
    "eps": list(flatlimit.DEFAULT_EPS_GRID),
    "limit": False,
    "draws": 1000,
    "killing_rate": 1.0,
    "dps": kernel.DEFAULT_DPS,
    "workers": 1,
}

# Observed size supports only count sizes above this probability.
SUPPORT_THRESHOLD = 1e-3

# Abscissae of the conditional density tables.
CONDITIONAL_GRID = np.linspace(0.0, 1.0, 201)

# Exit codes.
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    "An error from an invalid configuration document or option combination."


def setup_cache(cache_filename: Optional[str], clear_cache: bool):
    """Setup the results cache.

    Args:
      cache_filename: A string or None, the directory name for the cache.
      clear_cache: A boolean, if true, delete the cache contents before beginning.
    """
    if not cache_filename:
        return

    # diskcache needs a directory; remove a stale plain file of the same name.
    if os.path.exists(cache_filename) and os.path.isfile(cache_filename):
        os.remove(cache_filename)

    logging.info('Using pmf cache at "%s"', cache_filename)

    global _CACHE
    _CACHE = diskcache.Cache(cache_filename)
    if clear_cache:
        logging.info("Clearing cache %s", cache_filename)
        _CACHE.clear()


def reset_cache():
    """Reset the cache to its uninitialized state."""
    global _CACHE
    if _CACHE is not None:
        _CACHE.close()
    _CACHE = None


def _cache_key(*parameters) -> str:
    md5 = hashlib.md5()
    md5.update(repr(parameters).encode("utf-8"))
    return md5.hexdigest()


def cached_kernel_pmf(
    kern: kernel.KernelSpec,
    gs: kernel.GroundSet,
    eps: float,
    m: Optional[int] = None,
    alpha: float = 1.0,
    scale_power: int = 0,
    dps: int = kernel.DEFAULT_DPS,
) -> verify.PmfTable:
    """`verify.enumerate_kernel_pmf`, looked up in the cache first."""
    if _CACHE is None:
        return verify.enumerate_kernel_pmf(kern, gs, eps, m, alpha, scale_power, dps)
    key = _cache_key(
        type(kern).__module__, gs.points.tolist(), eps, m, alpha, scale_power, dps
    )
    try:
        return _CACHE[key]
    except KeyError:
        logging.info("Enumerating eps=%g (m=%s, p=%d)", eps, m, scale_power)
        table = verify.enumerate_kernel_pmf(kern, gs, eps, m, alpha, scale_power, dps)
        _CACHE[key] = table
        return table


def parse_floats(text: str) -> List[float]:
    """Parse a comma or whitespace separated list of floats."""
    try:
        return [float(token) for token in re.split(r"[,\s]+", text.strip()) if token]
    except ValueError as exc:
        raise argparse.ArgumentTypeError('Invalid list of numbers: "{}"'.format(text)) from exc


def parse_points(text: str) -> List[List[float]]:
    """Parse points like "0.1 0.5 0.9" or "0,0; 1,0; 0,1" (coordinates joined by commas)."""
    try:
        return [
            [float(c) for c in token.split(",")]
            for token in re.split(r"[;\s]+", text.strip())
            if token
        ]
    except ValueError as exc:
        raise argparse.ArgumentTypeError('Invalid points: "{}"'.format(text)) from exc


def load_config(filename: str) -> Dict[str, Any]:
    """Read a JSON configuration document; its keys mirror the option names."""
    with open(filename) as infile:
        try:
            document = json.load(infile)
        except json.JSONDecodeError as exc:
            raise ConfigError('Invalid configuration "{}": {}'.format(filename, exc)) from exc
    if not isinstance(document, dict):
        raise ConfigError('Configuration "{}" is not a JSON object'.format(filename))
    return document


def apply_config(args: argparse.Namespace, document: Dict[str, Any]):
    """Fill the options not given on the command line from a document, then
    from DEFAULTS."""
    for key, value in document.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise ConfigError('Unknown configuration key: "{}"'.format(key))
        if getattr(args, key) is None:
            if key == "points" and isinstance(value, str):
                value = parse_points(value)
            elif key == "eps" and isinstance(value, (int, float)):
                value = [value]
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def ground_set_from_args(args: argparse.Namespace) -> kernel.GroundSet:
    """The ground set from exactly one of --points, --random and --grid."""
    given = [name for name in ("points", "random", "grid") if getattr(args, name) is not None]
    if len(given) != 1:
        raise ConfigError("Specify exactly one of --points, --random, --grid")
    if args.points is not None:
        return kernel.make_ground_set(args.points)
    if args.random is not None:
        seed = args.seed if args.seed is not None else 0
        return kernel.uniform_ground_set(args.random, args.dimension, seed)
    return kernel.grid_ground_set(args.grid, args.dimension)


def limit_from_args(
    args: argparse.Namespace, kern: kernel.KernelSpec, gs: kernel.GroundSet
) -> ProcessDescriptor:
    """The fixed-size limit if -m is given, else the varying-size one."""
    if args.size is not None:
        return flatlimit.fixed_limit(kern, gs, args.size)
    if args.scale_power is None:
        raise ConfigError("Specify either -m or --scale-power")
    phase = flatlimit.make_phase_point(kern, gs, args.scale_power, args.alpha)
    return flatlimit.varying_limit(kern, gs, phase)


@contextlib.contextmanager
def open_output(filename: Optional[str]):
    """Yield a text stream writing to a file, or to stdout if no name is given."""
    if filename is None:
        output = (
            codecs.getwriter("utf-8")(sys.stdout.buffer)
            if hasattr(sys.stdout, "buffer")
            else sys.stdout
        )
        yield output
        output.flush()
    else:
        with open(filename, "w", newline="") as outfile:
            yield outfile


def _sibling(filename: str, suffix: str) -> str:
    root, ext = path.splitext(filename)
    return "{}-{}{}".format(root, suffix, ext or ".csv")


def _format_sizes(sizes: Sequence[int]) -> str:
    return " ".join(str(size) for size in sizes)


def cmd_sample(args: argparse.Namespace):
    """Write draw_id,indices rows for --draws samples."""
    rng = sampling.make_rng(args.seed)
    sampler: Callable[[np.random.Generator], sampling.Sample]
    if args.nnp is not None:
        with open(args.nnp) as infile:
            pair = nnp_lib.nnp_from_json(infile.read())
        if args.size is None:
            sampler = lambda r: sampling.sample_dpp(pair, r)
        else:
            sampler = lambda r: sampling.sample_fixed_dpp(pair, args.size, r)
    else:
        kern = kernel.get_kernel(args.kernel)
        gs = ground_set_from_args(args)
        if args.limit:
            desc = limit_from_args(args, kern, gs)
            sampler = lambda r: flatlimit.sample_descriptor(desc, r)
        else:
            eps = args.eps[0]
            L = kernel.kernel_matrix(kern, gs, eps)
            if args.size is None:
                L = L * args.alpha * eps ** -(args.scale_power or 0)
            pair = nnp_lib.make_nnp(L)
            if args.size is None:
                sampler = lambda r: sampling.sample_dpp(pair, r)
            else:
                sampler = lambda r: sampling.sample_fixed_dpp(pair, args.size, r)
    samples = sampling.sample_many(sampler, args.draws, rng)
    with open_output(args.output) as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(["draw_id", "indices"])
        for draw_id, sample in enumerate(samples):
            writer.writerow([draw_id, _format_sizes(sample)])


def cmd_limit(args: argparse.Namespace):
    """Print the limiting process descriptor as JSON."""
    kern = kernel.get_kernel(args.kernel)
    gs = ground_set_from_args(args)
    desc = limit_from_args(args, kern, gs)
    with open_output(args.output) as output:
        json.dump(flatlimit.descriptor_to_json(desc), output, indent=2)
        output.write("\n")


def cmd_converge(args: argparse.Namespace):
    """Write eps,tv rows: the distance of the eps-process to its flat limit.

    With an output file, also write the inclusion probabilities (fixed size)
    and, with --conditional, the conditional densities of the last point.
    """
    kern = kernel.get_kernel(args.kernel)
    gs = ground_set_from_args(args)
    desc = limit_from_args(args, kern, gs)
    limit_table = flatlimit.descriptor_pmf(desc, workers=args.workers)
    scale_power = 0 if args.size is not None else args.scale_power
    tables = []
    for eps in args.eps:
        table = cached_kernel_pmf(kern, gs, eps, args.size, args.alpha, scale_power, args.dps)
        tables.append(table)
        logging.info("eps=%g: TV %.6g", eps, verify.tv_distance(table, limit_table))

    with open_output(args.output) as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(["eps", "tv"])
        for eps, table in zip(args.eps, tables):
            writer.writerow([repr(eps), "{:.12g}".format(verify.tv_distance(table, limit_table))])

    if args.output is None:
        if args.conditional is not None:
            logging.warning("Conditional densities need an output file (-o); skipped")
        return

    if args.size is not None:
        with open(_sibling(args.output, "inclusion"), "w", newline="") as outfile:
            writer = csv.writer(outfile, lineterminator="\n")
            writer.writerow(["index"] + ["eps={!r}".format(eps) for eps in args.eps] + ["limit"])
            columns = [verify.inclusion_probs(t) for t in tables]
            columns.append(verify.inclusion_probs(limit_table))
            for index in range(gs.n):
                writer.writerow([index] + ["{:.12g}".format(c[index]) for c in columns])

    if args.conditional is not None:
        fixed = [float(x) for x in args.conditional]
        columns = [
            flatlimit.conditional_density(kern, fixed, CONDITIONAL_GRID, eps, args.dps)
            for eps in args.eps
        ]
        columns.append(flatlimit.conditional_density(kern, fixed, CONDITIONAL_GRID))
        with open(_sibling(args.output, "conditional"), "w", newline="") as outfile:
            writer = csv.writer(outfile, lineterminator="\n")
            writer.writerow(["x"] + ["eps={!r}".format(eps) for eps in args.eps] + ["limit"])
            for index, x in enumerate(CONDITIONAL_GRID):
                writer.writerow(
                    ["{:.6g}".format(x)] + ["{:.12g}".format(c[index]) for c in columns]
                )


def cmd_phase(args: argparse.Namespace):
    """Write one row per scale power 0 .. 2n of the varying-size phase diagram.

    The observed support is read off the exact pmf at the smallest --eps value
    (ASYMPTOTIC_EPS unless given).
    """
    kern = kernel.get_kernel(args.kernel)
    gs = ground_set_from_args(args)
    eps = min(args.eps) if args.eps_given else flatlimit.ASYMPTOTIC_EPS
    powers = [args.scale_power] if args.scale_power is not None else range(2 * gs.n + 1)
    with open_output(args.output) as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(
            ["scale_power", "r", "regime", "predicted_support", "observed_support", "size_tv"]
        )
        for p in powers:
            phase = flatlimit.make_phase_point(kern, gs, p, args.alpha)
            kind, support = flatlimit.predicted_regime(phase)
            predicted = flatlimit.descriptor_size_law(flatlimit.varying_limit(kern, gs, phase))
            table = cached_kernel_pmf(kern, gs, eps, None, args.alpha, p, args.dps)
            observed = table.size_law()
            size_tv = float(np.sum(np.abs(observed.probabilities - predicted.probabilities)))
            writer.writerow(
                [
                    p,
                    phase.r,
                    kind.value,
                    _format_sizes(support),
                    _format_sizes(observed.support(SUPPORT_THRESHOLD)),
                    "{:.6g}".format(size_tv),
                ]
            )


def cmd_forest(args: argparse.Namespace):
    """Compare empirical root marginals of Wilson forests with the kernel diagonal."""
    if args.edges is None:
        raise ConfigError("The forest command needs --edges")
    g = forest.read_edge_list(args.edges)
    q = args.killing_rate
    rng = sampling.make_rng(args.seed)
    counts = np.zeros(g.n)
    for _ in range(args.draws):
        counts[list(forest.wilson_forest_roots(g, q, rng))] += 1
    empirical = counts / args.draws
    theoretical = np.diag(forest.forest_root_kernel(g, q))
    sigma = np.sqrt(theoretical * (1 - theoretical) / args.draws)
    report = {
        "n": g.n,
        "q": q,
        "draws": args.draws,
        "empirical": empirical.tolist(),
        "theoretical": theoretical.tolist(),
        "max_deviation": float(np.max(np.abs(empirical - theoretical))),
        "sigma_bound": float(3 * np.max(sigma)),
    }
    with open_output(args.output) as output:
        json.dump(report, output, indent=2)
        output.write("\n")


COMMANDS = {
    "sample": cmd_sample,
    "limit": cmd_limit,
    "converge": cmd_converge,
    "phase": cmd_phase,
    "forest": cmd_forest,
}

# Commands that draw random numbers and need --seed.
STOCHASTIC_COMMANDS = {"sample", "forest"}


def process_args() -> argparse.Namespace:
    """Process the arguments. This also initializes the logging module and the cache.

    Returns:
      The argparse receiver of command-line arguments, with the configuration
      document and the defaults merged in.
    """
    parser = argparse.ArgumentParser(description=flatdpp.__doc__.splitlines()[0])

    parser.add_argument("command", choices=sorted(COMMANDS), help="The experiment to run.")

    parser.add_argument(
        "--config",
        action="store",
        help="A JSON document of option values; command-line options override it.",
    )

    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        help=("Print out progress log. Specify twice for debugging info."),
    )

    # Process selection.
    parser.add_argument(
        "-k", "--kernel", action="store", help="Kernel name, builtin or a full module path."
    )
    parser.add_argument(
        "--points",
        action="store",
        type=parse_points,
        help='Inline ground set, e.g. "0.1 0.5 0.9" or "0,0; 1,0; 0,1".',
    )
    parser.add_argument(
        "--random", action="store", type=int, help="Ground set of N uniform points (uses --seed)."
    )
    parser.add_argument(
        "--grid", action="store", type=int, help="Ground set of the first N points of a grid."
    )
    parser.add_argument(
        "-d", "--dimension", action="store", type=int, help="Dimension of generated points."
    )
    parser.add_argument(
        "-m", "--size", action="store", type=int, help="Sample size of a fixed-size process."
    )
    parser.add_argument(
        "-p",
        "--scale-power",
        action="store",
        type=int,
        help="Exponent p of the alpha eps^-p rescaling of a varying-size process.",
    )
    parser.add_argument("-a", "--alpha", action="store", type=float, help="Scale factor alpha.")
    parser.add_argument(
        "--eps", action="store", type=parse_floats, help="Comma-separated kernel widths."
    )
    parser.add_argument(
        "--limit",
        action="store_const",
        const=True,
        help="Sample the flat limit instead of the kernel at the first --eps.",
    )
    parser.add_argument("--nnp", action="store", help="Sample the NNP of a JSON file.")
    parser.add_argument(
        "--conditional",
        action="store",
        type=parse_floats,
        help="Fixed points of the univariate conditional density tables.",
    )
    parser.add_argument(
        "--dps", action="store", type=int, help="Decimal digits of the exact enumerations."
    )

    # Forests.
    parser.add_argument("--edges", action="store", help="A `u v weight` edge-list file.")
    parser.add_argument(
        "-q", "--killing-rate", action="store", type=float, help="Forest killing rate q."
    )

    # Runs.
    parser.add_argument("--draws", action="store", type=int, help="Number of samples.")
    parser.add_argument("--seed", action="store", type=int, help="Random seed.")
    parser.add_argument("-o", "--output", action="store", help="Output file (default stdout).")
    parser.add_argument(
        "-w",
        "--workers",
        action="store",
        type=int,
        help=("Specify the number of threads sharing an exact enumeration."),
    )

    # Caching options.
    cache_group = parser.add_argument_group("cache")
    cache_filename = path.join(
        tempfile.gettempdir(), "{}.cache".format(path.basename(sys.argv[0]))
    )
    cache_group.add_argument(
        "--cache",
        dest="cache_filename",
        action="store",
        default=cache_filename,
        help="The directory of the exact pmf cache database.",
    )
    cache_group.add_argument(
        "--no-cache",
        dest="cache_filename",
        action="store_const",
        const=None,
        help="Disable the pmf cache.",
    )
    cache_group.add_argument(
        "--clear-cache", action="store_true", help="Clear the cache prior to startup."
    )

    args = parser.parse_args()

    verbose_levels = {
        None: logging.WARN,
        0: logging.WARN,
        1: logging.INFO,
        2: logging.DEBUG,
    }
    logging.basicConfig(
        level=verbose_levels[min(args.verbose or 0, 2)], format="%(levelname)-8s: %(message)s"
    )

    try:
        document = load_config(args.config) if args.config else {}
        args.eps_given = args.eps is not None or "eps" in document
        apply_config(args, document)
    except (OSError, ConfigError, argparse.ArgumentTypeError) as exc:
        parser.error(str(exc))

    if args.command in STOCHASTIC_COMMANDS and args.seed is None:
        parser.error('The "{}" command requires --seed'.format(args.command))

    setup_cache(args.cache_filename, args.clear_cache)
    return args


def main():
    args = process_args()
    logging.info("Running %s", args.command)
    try:
        COMMANDS[args.command](args)
    except ArithmeticError as exc:
        logging.error("Numerical failure: %s", exc)
        sys.exit(EXIT_NUMERICAL)
    except (ValueError, KeyError, ImportError, OSError) as exc:
        logging.error("%s", exc)
        sys.exit(EXIT_VALIDATION)
    finally:
        reset_cache()


if __name__ == "__main__":
    main()
