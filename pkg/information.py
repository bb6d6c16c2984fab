"""
Information Measures Module
Shannon entropy and Kullback-Leibler divergence along chain trajectories,
the Feinstein doubly-stochastic map, and row/column divergence measures of a
channel (or transition) matrix.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Literal, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import entr, rel_entr

from analysis import Chain, ctmc_transient, dtmc_transient
from chains import GeneratorMatrix, StochasticMatrix
from errors import PreconditionError, ValidationError
from graph import probability_vector

logger = logging.getLogger(__name__)

LOG_BASE = 2.0
MONOTONE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Trace:
    """Scalar sequence indexed by step or time; values may be +inf."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if indices.shape != values.shape:
            raise ValidationError("trace indices and values differ in length")
        if np.any(np.diff(indices) <= 0):
            raise ValidationError("trace indices must be strictly increasing")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @property
    def points(self) -> list:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    @property
    def final(self) -> float:
        return float(self.values[-1])

    def is_non_decreasing(self, tol: float = MONOTONE_TOL) -> bool:
        return bool(np.all(np.diff(self.values) >= -tol))

    def to_frame(self, index_name: str = "step") -> pd.DataFrame:
        index = self.indices.astype(int) if index_name == "step" else self.indices
        return pd.DataFrame({index_name: index, "value": self.values})


@dataclass(frozen=True)
class ChannelMeasures:
    """Smallest (m1) and largest (m2) pairwise divergence between rows or columns."""

    m1: float
    m2: float
    axis: Literal["rows", "columns"]

    def to_dict(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "axis": self.axis}


def shannon_entropy(p, base: float = LOG_BASE) -> float:
    """
    H(p) = -sum p_i log p_i with 0 log 0 = 0.

    Args:
        p: Probability vector
        base: Logarithm base (2 gives bits)

    Returns:
        Entropy, between 0 and log(M)
    """
    h = float(np.sum(entr(np.asarray(p, dtype=float)))) / math.log(base)
    return h if h > 0 else 0.0


def kl_divergence(p, q, base: float = LOG_BASE) -> float:
    """
    D(p || q); +inf when p puts mass where q has none.

    Args:
        p: Probability vector
        q: Probability vector of the same length
        base: Logarithm base

    Returns:
        Nonnegative divergence or math.inf
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValidationError(f"length mismatch: {p.size} vs {q.size}")
    d = float(np.sum(rel_entr(p, q)))
    if math.isinf(d):
        return math.inf
    d /= math.log(base)
    return d if d > 0 else 0.0


def _trajectory(chain: Chain, pi0, horizon) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(chain, StochasticMatrix):
        result = dtmc_transient(chain, pi0, int(horizon))
        return np.asarray(result.steps, dtype=float), result.distributions
    if isinstance(chain, GeneratorMatrix):
        times = [horizon] if np.isscalar(horizon) else horizon
        result = ctmc_transient(chain, pi0, times)
        return np.asarray(result.times, dtype=float), result.distributions
    raise ValidationError(f"unsupported chain type {type(chain).__name__}")


def entropy_trace(chain: Chain, pi0, horizon: Union[int, Sequence[float]], base: float = LOG_BASE) -> Trace:
    """
    H(pi(n)) for n = 0..horizon (DTMC) or H(pi(t)) on a time grid (CTMC).
    """
    indices, distributions = _trajectory(chain, pi0, horizon)
    return Trace(indices, np.array([shannon_entropy(row, base) for row in distributions]))


def kl_trace(chain: Chain, pi0, horizon: Union[int, Sequence[float]], base: float = LOG_BASE) -> Trace:
    """
    g = D(pi(0) || pi(n)) along the trajectory.

    Early points are +inf until the walk has spread over the support of pi(0).
    """
    indices, distributions = _trajectory(chain, pi0, horizon)
    start = distributions[0]
    return Trace(indices, np.array([kl_divergence(start, row, base) for row in distributions]))


def feinstein_step(b: StochasticMatrix, p) -> np.ndarray:
    """
    p_bar_i = sum_j b_ij p_j for a doubly stochastic b.

    Never lowers entropy; equality only when p_bar rearranges p.
    """
    if not b.doubly_stochastic:
        raise PreconditionError("Feinstein map requires a doubly stochastic matrix")
    p = probability_vector(p)
    if p.size != b.size:
        raise ValidationError(f"vector has {p.size} entries, matrix is {b.size}x{b.size}")
    return probability_vector(b.matrix @ p)


def channel_measures(b: StochasticMatrix,
                     axis: Literal["rows", "columns"] = "rows",
                     base: float = LOG_BASE) -> ChannelMeasures:
    """
    Min and max of D(q_i || q_j) over ordered pairs i != j.

    Args:
        b: Channel or transition matrix
        axis: "rows", or "columns" for a doubly stochastic b
        base: Logarithm base

    Returns:
        ChannelMeasures
    """
    if b.size < 2:
        raise ValidationError("channel measures need at least two inputs")
    if axis == "rows":
        vectors = b.matrix
    elif axis == "columns":
        if not b.doubly_stochastic:
            raise PreconditionError("column measures need a doubly stochastic matrix")
        vectors = b.matrix.T
    else:
        raise ValidationError(f"unknown axis {axis!r}")

    divergences = [kl_divergence(vectors[i], vectors[j], base)
                   for i, j in itertools.permutations(range(b.size), 2)]
    logger.debug("Evaluated %d ordered %s pairs", len(divergences), axis)
    return ChannelMeasures(min(divergences), max(divergences), axis)
