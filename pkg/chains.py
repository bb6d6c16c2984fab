"""
Markov Chain Construction Module
Builds DTMC transition matrices and CTMC generator matrices from graphs.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from errors import GraphError, ValidationError
from graph import Graph, adjacency_matrix, default_orientation

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-9


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic matrix; doubly_stochastic is derived from the column sums."""

    matrix: np.ndarray
    doubly_stochastic: bool

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def to_dict(self) -> dict:
        return {"m": self.size, "rows": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """CTMC rate matrix: nonnegative off-diagonals, zero row sums."""

    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.matrix, self.matrix.T))

    def to_dict(self) -> dict:
        return {"m": self.size, "rows": self.matrix.tolist()}


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def _columns_stochastic(m: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(m.sum(axis=0) - 1.0) <= tol))


def validate_stochastic(m, tol: float = STOCHASTIC_TOL) -> StochasticMatrix:
    """
    Check a user-supplied matrix (e.g. a channel matrix) for row-stochasticity.

    Args:
        m: Square matrix-like
        tol: Allowed absolute row-sum deviation

    Returns:
        StochasticMatrix with the doubly_stochastic flag computed
    """
    m = _as_square(m)
    for i, row in enumerate(m):
        negative = np.flatnonzero(row < 0)
        if negative.size:
            raise ValidationError(f"row {i} has negative entry {row[negative[0]]} in column {negative[0]}")
        total = row.sum()
        if abs(total - 1.0) > tol:
            raise ValidationError(f"row {i} sums to {total:.12g}")
    return StochasticMatrix(_frozen(m), _columns_stochastic(m, tol))


def validate_generator(m, tol: float = STOCHASTIC_TOL) -> GeneratorMatrix:
    """Check a user-supplied rate matrix for the generator invariants."""
    m = _as_square(m)
    for i, row in enumerate(m):
        off = np.delete(row, i)
        if np.any(off < 0):
            raise ValidationError(f"row {i} has a negative off-diagonal rate")
        if abs(row.sum()) > tol:
            raise ValidationError(f"row {i} sums to {row.sum():.12g}, not 0")
    return GeneratorMatrix(_frozen(m))


def _require_edges(g: Graph):
    if g.num_edges == 0:
        raise GraphError("cannot build a Markov chain from a graph without edges")


def dtmc_from_graph(g: Graph, orientation: Optional[str] = None) -> StochasticMatrix:
    """
    P = D^-1 A with weighted degrees.

    A vertex with zero degree (only possible for directed graphs) becomes
    absorbing: its row is the unit row with P[i][i] = 1.

    Args:
        g: Graph with at least one edge
        orientation: "undirected", "in" or "out" (default chosen from g)

    Returns:
        StochasticMatrix
    """
    _require_edges(g)
    orientation = orientation or default_orientation(g)
    a = adjacency_matrix(g, orientation)
    d = a.sum(axis=1)

    p = np.zeros_like(a)
    linked = d > 0
    p[linked] = a[linked] / d[linked, None]
    isolated = np.flatnonzero(~linked)
    p[isolated, isolated] = 1.0
    if isolated.size:
        logger.debug("Vertices %s have zero %s-degree; made absorbing", isolated.tolist(), orientation)

    return StochasticMatrix(_frozen(p), _columns_stochastic(p, STOCHASTIC_TOL))


def ctmc_from_graph(g: Graph, orientation: Optional[str] = None) -> GeneratorMatrix:
    """
    Q = A - D (for undirected graphs Q = -L).

    Args:
        g: Graph with at least one edge
        orientation: "undirected", "in" or "out" (default chosen from g)

    Returns:
        GeneratorMatrix
    """
    _require_edges(g)
    orientation = orientation or default_orientation(g)
    a = adjacency_matrix(g, orientation)
    q = a - np.diag(a.sum(axis=1))
    return GeneratorMatrix(_frozen(q))


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Matrix with ones at (i, perm[i])."""
    perm = np.asarray(perm, dtype=int)
    m = np.zeros((perm.size, perm.size))
    m[np.arange(perm.size), perm] = 1.0
    return m


def random_doubly_stochastic(m: int, n_perms: int, rng: np.random.Generator) -> StochasticMatrix:
    """
    Convex mixture of n_perms random permutation matrices.

    Args:
        m: Matrix size
        n_perms: Number of permutation matrices mixed
        rng: numpy Generator

    Returns:
        Doubly stochastic StochasticMatrix
    """
    if n_perms < 1:
        raise ValidationError("need at least one permutation")
    coefficients = rng.random(n_perms)
    coefficients /= coefficients.sum()
    b = np.zeros((m, m))
    for c in coefficients:
        b += c * permutation_matrix(rng.permutation(m))
    return validate_stochastic(b)
