"""
Entropic Graph Module
Graph entropy (entropy of the vertex-degree PMF), max-/min-entropic
classification and the scaled-adjacency transient of regular graphs.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from errors import GraphError, PreconditionError
from graph import Graph, adjacency_matrix, degree_pmf, degrees, enumerate_graphs, probability_vector
from information import LOG_BASE, shannon_entropy

logger = logging.getLogger(__name__)

# Up to this many steps pi0 A^n is accumulated unscaled and divided by c^n once.
EXACT_SCALE_LIMIT = 30


@dataclass(frozen=True)
class EntropicClassification:
    graph_entropy_bits: float
    is_max_entropic: bool
    regularity_degree: Optional[int]
    is_min_entropic_star: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MinEntropyReport:
    """Brute-force search for the smallest graph entropy among connected graphs."""

    num_vertices: int
    graphs_examined: int
    minimum_entropy_bits: float
    minimizers: int
    star_entropy_bits: float
    star_attains_minimum: bool

    def to_dict(self) -> dict:
        return asdict(self)


def graph_entropy(g: Graph, base: float = LOG_BASE) -> float:
    """Shannon entropy of the vertex-degree distribution."""
    return shannon_entropy(degree_pmf(g), base)


def _is_star(d: np.ndarray, num_edges: int) -> bool:
    m = d.size
    return m >= 2 and num_edges == m - 1 and bool(np.any(d == m - 1))


def classify(g: Graph) -> EntropicClassification:
    """
    Graph entropy plus max-entropic (regular) and star-pattern flags.

    Entropy uses the weighted degree PMF. Regularity and the star pattern
    are judged on edge counts so the common degree c is an integer.

    Args:
        g: Undirected graph with at least one edge

    Returns:
        EntropicClassification
    """
    if g.directed:
        raise GraphError("entropic classification is defined for undirected graphs")
    if g.num_edges == 0:
        raise GraphError("graph entropy is undefined for a graph without edges")

    plain = g.unweighted()
    d = degrees(plain)
    regular = bool(np.all(d == d[0]))
    return EntropicClassification(
        graph_entropy_bits=graph_entropy(g, 2.0),
        is_max_entropic=regular,
        regularity_degree=int(d[0]) if regular else None,
        is_min_entropic_star=_is_star(d, plain.num_edges),
    )


def regular_fast_transient(g: Graph, pi0, n: int) -> np.ndarray:
    """
    pi(n) = pi(0) A^n / c^n for a c-regular unit-weight graph.

    Args:
        g: Regular undirected graph
        pi0: Initial PMF
        n: Step

    Returns:
        Distribution after n steps
    """
    if n < 0:
        raise PreconditionError(f"step must be nonnegative, got {n}")
    if g.directed or not g.is_unit_weighted:
        raise PreconditionError("fast transient needs an undirected unit-weight graph")
    a = adjacency_matrix(g, "undirected")
    d = a.sum(axis=1)
    if g.num_edges == 0 or not np.all(d == d[0]):
        raise PreconditionError("fast transient needs a regular graph")
    c = d[0]
    pi0 = probability_vector(pi0)
    if pi0.size != g.num_vertices:
        raise PreconditionError(f"initial distribution has {pi0.size} entries, graph has {g.num_vertices} vertices")

    v = np.array(pi0, dtype=float)
    if n <= EXACT_SCALE_LIMIT:
        for _ in range(n):
            v = v @ a
        v /= c ** n
    else:
        for _ in range(n):
            v = (v @ a) / c
    return probability_vector(v)


def min_entropy_oracle(m: int = 5) -> MinEntropyReport:
    """
    Enumerate all connected graphs on m vertices and find the minimum graph
    entropy, then check whether the star reaches it.
    """
    star_entropy = None
    best = math.inf
    minimizers = 0
    examined = 0
    for g in enumerate_graphs(m, connected=True):
        examined += 1
        h = graph_entropy(g, 2.0)
        if h < best - 1e-12:
            best, minimizers = h, 1
        elif abs(h - best) <= 1e-12:
            minimizers += 1
        if star_entropy is None and classify(g).is_min_entropic_star:
            star_entropy = h
    logger.debug("Examined %d connected graphs on %d vertices", examined, m)
    if star_entropy is None:
        raise GraphError(f"no star among connected graphs on {m} vertices")
    return MinEntropyReport(
        num_vertices=m,
        graphs_examined=examined,
        minimum_entropy_bits=best,
        minimizers=minimizers,
        star_entropy_bits=star_entropy,
        star_attains_minimum=abs(star_entropy - best) <= 1e-12,
    )
