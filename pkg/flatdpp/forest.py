"""Random spanning forests of weighted graphs and the law of their roots.

A rooted spanning forest F of a graph is drawn with probability proportional to
q^{#roots(F)} times the product of its edge weights. Its root set is a
partial-projection DPP: the marginal kernel is q (qI + Lap)^-1, and as an NNP
it reads (q Lap^+, B) with B spanning the null space of the Laplacian (the
constant vector for a connected graph).

Forests are drawn with Wilson's algorithm on the graph augmented with an
absorbing node linked to every vertex with weight q.
"""

__copyright__ = "Copyright (C) 2026  flatdpp authors"
__license__ = "GNU GPLv2"

import logging
from typing import List, NamedTuple, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph

from flatdpp import linalg
from flatdpp import nnp as nnp_lib
from flatdpp.sampling import Sample


# Parent marker of a root in a forest parent array.
ROOT = -1


class GraphError(ValueError):
    "An error from a malformed graph or edge list."


# An undirected weighted graph.
#
#   n: The number of vertices, labelled 0 .. n-1.
#   edges: A list of (u, v, weight) triples with u != v and weight > 0.
class Graph(NamedTuple):
    n: int
    edges: List[Tuple[int, int, float]]


def make_graph(n: int, edges) -> Graph:
    """Validate and build a graph from (u, v[, weight]) tuples."""
    result = []
    for edge in edges:
        if len(edge) not in (2, 3):
            raise GraphError("Invalid edge: {}".format(edge))
        u, v = int(edge[0]), int(edge[1])
        weight = float(edge[2]) if len(edge) == 3 else 1.0
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise GraphError("Invalid edge endpoints: {} {}".format(u, v))
        if not weight > 0:
            raise GraphError("Edge weight must be positive: {}".format(weight))
        result.append((u, v, weight))
    return Graph(n, result)


def read_edge_list(filename: str) -> Graph:
    """Read a whitespace-separated `u v weight` file; '#' starts a comment.

    The number of vertices is one more than the largest label seen.
    """
    edges = []
    with open(filename) as infile:
        for lineno, line in enumerate(infile, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                edges.append(tuple([int(fields[0]), int(fields[1])] + [float(f) for f in fields[2:3]]))
            except (ValueError, IndexError) as exc:
                raise GraphError('Invalid edge at {}:{}: "{}"'.format(filename, lineno, line)) from exc
    n = 1 + max((max(u, v) for u, v, *_ in edges), default=-1)
    return make_graph(n, edges)


def adjacency(g: Graph) -> np.ndarray:
    A = np.zeros((g.n, g.n))
    for u, v, weight in g.edges:
        A[u, v] += weight
        A[v, u] += weight
    return A


def laplacian(g: Graph) -> np.ndarray:
    """The graph Laplacian D - A."""
    A = adjacency(g)
    return np.diag(A.sum(axis=1)) - A


def components_basis(g: Graph) -> np.ndarray:
    """Indicator columns of the connected components, n x #components."""
    count, labels = scipy.sparse.csgraph.connected_components(
        scipy.sparse.csr_matrix(adjacency(g)), directed=False
    )
    return (labels[:, None] == np.arange(count)[None, :]).astype(float)


def forest_root_kernel(g: Graph, q: float) -> np.ndarray:
    """Marginal kernel q (qI + Lap)^-1 of the forest roots."""
    if not q > 0:
        raise GraphError("Killing rate must be positive: {}".format(q))
    return q * scipy.linalg.inv(q * np.eye(g.n) + laplacian(g))


def forest_nnp(g: Graph, q: float) -> nnp_lib.NNP:
    """The NNP (q Lap^+, B) of the forest roots, B spanning the Laplacian null space."""
    if not q > 0:
        raise GraphError("Killing rate must be positive: {}".format(q))
    return nnp_lib.make_nnp(q * linalg.pseudo_inverse(laplacian(g)), components_basis(g))


def wilson_forest(g: Graph, q: float, rng: np.random.Generator) -> np.ndarray:
    """Sample a rooted spanning forest with Wilson's algorithm.

    Random walks are run on the graph augmented with an absorbing node: from
    vertex u the walk is absorbed with probability q / (q + deg(u)), otherwise
    it moves to a neighbor with probability proportional to the edge weight.
    Loops are erased by overwriting the successor of each visited vertex.

    Returns:
      An int array of parents, ROOT for the roots.
    """
    if not q > 0:
        raise GraphError("Killing rate must be positive: {}".format(q))
    A = adjacency(g)
    degrees = A.sum(axis=1)
    absorbing = g.n
    in_forest = np.zeros(g.n, dtype=bool)
    successor = np.full(g.n, ROOT)
    for start in range(g.n):
        u = start
        while not in_forest[u]:
            if rng.random() * (q + degrees[u]) < q:
                successor[u] = absorbing
                break
            v = int(rng.choice(g.n, p=A[u] / degrees[u]))
            successor[u] = v
            u = v
        u = start
        while not in_forest[u]:
            in_forest[u] = True
            if successor[u] == absorbing:
                break
            u = successor[u]
    parents = np.where(successor == absorbing, ROOT, successor)
    return parents


def wilson_forest_roots(g: Graph, q: float, rng: np.random.Generator) -> Sample:
    """Roots of a forest drawn by `wilson_forest`."""
    parents = wilson_forest(g, q, rng)
    roots = tuple(int(i) for i in np.flatnonzero(parents == ROOT))
    logging.debug("Forest with %d root(s)", len(roots))
    return roots
