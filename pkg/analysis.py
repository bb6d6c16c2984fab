"""
Chain Analysis Module
Equilibrium and transient distributions of DTMCs/CTMCs, plus a seeded
Monte Carlo walk simulator used as an independent oracle.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Literal, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.stats import poisson

from chains import GeneratorMatrix, StochasticMatrix
from errors import ReducibleChainError, ValidationError
from graph import probability_vector

logger = logging.getLogger(__name__)

POISSON_TAIL_TOL = 1e-12
SIMULATION_BLOCK = 1 << 16

Chain = Union[StochasticMatrix, GeneratorMatrix]


@dataclass(frozen=True, eq=False)
class TransientResultDTMC:
    """pi(n) for n in steps; distributions has one row per step."""

    steps: Tuple[int, ...]
    distributions: np.ndarray

    def at(self, step: int) -> np.ndarray:
        return self.distributions[self.steps.index(step)]

    def to_frame(self) -> pd.DataFrame:
        return _trace_frame("step", self.steps, self.distributions)


@dataclass(frozen=True, eq=False)
class TransientResultCTMC:
    """pi(t) for t in times; distributions has one row per time."""

    times: Tuple[float, ...]
    distributions: np.ndarray

    def at(self, t: float) -> np.ndarray:
        return self.distributions[self.times.index(t)]

    def to_frame(self) -> pd.DataFrame:
        return _trace_frame("time", self.times, self.distributions)


def _trace_frame(index_name: str, index: Sequence, distributions: np.ndarray) -> pd.DataFrame:
    columns = [f"state{i}" for i in range(distributions.shape[1])]
    frame = pd.DataFrame(distributions, columns=columns)
    frame.insert(0, index_name, list(index))
    return frame


def _check_dims(chain: Chain, pi0) -> np.ndarray:
    pi0 = probability_vector(pi0)
    if pi0.size != chain.size:
        raise ValidationError(f"initial distribution has {pi0.size} entries, chain has {chain.size} states")
    return pi0


def dtmc_transient(p: StochasticMatrix, pi0, n_max: int) -> TransientResultDTMC:
    """
    pi(k) = pi(0) P^k for k = 0..n_max via pi(k+1) = pi(k) P.

    Args:
        p: Transition matrix
        pi0: Initial PMF
        n_max: Last step

    Returns:
        TransientResultDTMC holding every intermediate step
    """
    pi0 = _check_dims(p, pi0)
    if n_max < 0:
        raise ValidationError(f"step count must be nonnegative, got {n_max}")
    out = np.empty((n_max + 1, p.size))
    out[0] = pi0
    for k in range(n_max):
        out[k + 1] = out[k] @ p.matrix
    return TransientResultDTMC(tuple(range(n_max + 1)), out)


def _uniformization_rate(q: GeneratorMatrix) -> float:
    return float(np.max(-np.diag(q.matrix))) if q.size else 0.0


def _poisson_weights(mean: float, tol: float = POISSON_TAIL_TOL) -> np.ndarray:
    """Poisson(mean) pmf on 0..K with the tail beyond K below tol."""
    if mean == 0:
        return np.ones(1)
    right = int(poisson.isf(tol, mean)) + 1
    return poisson.pmf(np.arange(right + 1), mean)


def _uniformized(q: GeneratorMatrix, start: np.ndarray, times: Sequence[float]) -> List[np.ndarray]:
    """
    start @ e^{Qt} for each t, with P_u = I + Q/rate and Poisson(rate*t) weights.

    start may be a row vector or a matrix (for the full kernel).
    """
    rate = _uniformization_rate(q)
    if rate == 0:
        return [start.copy() for _ in times]

    p_u = np.eye(q.size) + q.matrix / rate
    weights = [_poisson_weights(rate * t) for t in times]
    depth = max(w.size for w in weights)
    logger.debug("Uniformization rate %.6g, %d Poisson terms", rate, depth)

    results = [np.zeros_like(start, dtype=float) for _ in times]
    term = np.array(start, dtype=float)
    for k in range(depth):
        for res, w in zip(results, weights):
            if k < w.size:
                res += w[k] * term
        term = term @ p_u
    return results


def _check_times(times: Sequence[float]) -> Tuple[float, ...]:
    times = tuple(float(t) for t in times)
    if any(t < 0 for t in times):
        raise ValidationError("times must be nonnegative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValidationError("times must be strictly increasing")
    return times


def expm_symmetric(q: GeneratorMatrix, t: float) -> np.ndarray:
    """e^{Qt} via the eigendecomposition of a symmetric generator."""
    if not np.allclose(q.matrix, q.matrix.T, atol=1e-12):
        raise ValidationError("eigendecomposition path needs a symmetric generator")
    w, v = np.linalg.eigh(q.matrix)
    return (v * np.exp(w * t)) @ v.T


def transition_kernel(q: GeneratorMatrix, t: float) -> np.ndarray:
    """Full matrix e^{Qt} computed by uniformization."""
    return _uniformized(q, np.eye(q.size), _check_times([t]))[0]


def ctmc_transient(q: GeneratorMatrix,
                   pi0,
                   times: Sequence[float],
                   method: Literal["uniformization", "eigen"] = "uniformization") -> TransientResultCTMC:
    """
    pi(t) = pi(0) e^{Qt} on a time grid.

    Args:
        q: Generator
        pi0: Initial PMF
        times: Nonnegative, ascending time points
        method: "uniformization" (any generator) or "eigen" (symmetric only)

    Returns:
        TransientResultCTMC
    """
    pi0 = _check_dims(q, pi0)
    times = _check_times(times)
    if method == "uniformization":
        rows = _uniformized(q, pi0, times)
    elif method == "eigen":
        rows = [pi0 @ expm_symmetric(q, t) for t in times]
    else:
        raise ValidationError(f"unknown method {method!r}")
    distributions = np.array(rows).reshape(len(times), q.size)
    return TransientResultCTMC(times, distributions)


def is_irreducible(matrix: np.ndarray) -> bool:
    """Strong connectivity of the off-diagonal support digraph."""
    support = np.array(matrix, dtype=float) != 0
    np.fill_diagonal(support, False)
    if support.shape[0] == 1:
        return True
    n_components, _ = connected_components(csr_matrix(support), directed=True, connection="strong")
    return n_components == 1


def _solve_stationary(system: np.ndarray) -> np.ndarray:
    """Solve pi @ system = 0 with sum(pi) = 1."""
    m = system.shape[0]
    lhs = np.vstack([system.T, np.ones((1, m))])
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    pi = np.clip(pi, 0.0, None)
    return probability_vector(pi / pi.sum())


def dtmc_equilibrium(p: StochasticMatrix) -> np.ndarray:
    """
    Unique pi with pi P = pi for an irreducible chain.

    Solved directly rather than by power iteration, so periodic chains
    (bipartite graphs) are handled.
    """
    if not is_irreducible(p.matrix):
        raise ReducibleChainError("transition matrix is reducible; equilibrium is not unique")
    if p.doubly_stochastic:
        logger.debug("Doubly stochastic irreducible chain; equilibrium is uniform")
        return probability_vector(np.full(p.size, 1.0 / p.size))
    return _solve_stationary(p.matrix - np.eye(p.size))


def ctmc_equilibrium(q: GeneratorMatrix) -> np.ndarray:
    """Unique pi with pi Q = 0 for an irreducible generator."""
    if not is_irreducible(q.matrix):
        raise ReducibleChainError("generator is reducible; equilibrium is not unique")
    if np.all(q.matrix.sum(axis=0) == 0):
        logger.debug("Generator has zero column sums; equilibrium is uniform")
        return probability_vector(np.full(q.size, 1.0 / q.size))
    return _solve_stationary(q.matrix)


def total_variation(p, q) -> float:
    """Total variation distance between two PMFs."""
    return 0.5 * float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


def _block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based substream: Philox keyed by seed, advanced by block index."""
    return np.random.Generator(np.random.Philox(key=seed % (1 << 64)).jumped(block))


def _cumulative(rows: np.ndarray) -> np.ndarray:
    """Row-wise CDFs ending at exactly 1 (all-zero rows map to all ones)."""
    cumulative = np.cumsum(rows, axis=-1)
    total = cumulative[..., -1:]
    cumulative = cumulative / np.where(total > 0, total, 1.0)
    cumulative[..., -1] = 1.0
    return cumulative


def _draw(cumulative: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.minimum(np.searchsorted(cumulative, u, side="right"), cumulative.size - 1)


def _transition(cumulative: np.ndarray, states: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Move every path from its state using that state's CDF row."""
    moved = np.empty_like(states)
    for s in np.unique(states):
        here = states == s
        moved[here] = _draw(cumulative[s], u[here])
    return moved


def _simulate_dtmc_block(p: np.ndarray, pi0: np.ndarray, steps: int,
                         n: int, rng: np.random.Generator) -> np.ndarray:
    cum_p = _cumulative(p)
    states = _draw(_cumulative(pi0), rng.random(n))
    for _ in range(steps):
        states = _transition(cum_p, states, rng.random(n))
    return states


def _simulate_ctmc_block(q: np.ndarray, pi0: np.ndarray, horizon: float,
                         n: int, rng: np.random.Generator) -> np.ndarray:
    rates = -np.diag(q)
    jumps = np.where(rates[:, None] > 0, q / np.where(rates > 0, rates, 1.0)[:, None], 0.0)
    np.fill_diagonal(jumps, 0.0)
    cum_jumps = _cumulative(jumps)

    states = _draw(_cumulative(pi0), rng.random(n))
    clock = np.zeros(n)
    active = rates[states] > 0
    while active.any():
        idx = np.flatnonzero(active)
        clock[idx] += rng.exponential(1.0 / rates[states[idx]])
        moving = idx[clock[idx] <= horizon]
        active[idx[clock[idx] > horizon]] = False
        if moving.size:
            states[moving] = _transition(cum_jumps, states[moving], rng.random(moving.size))
            active[moving] = rates[states[moving]] > 0
    return states


def simulate_walk(chain: Chain,
                  pi0,
                  horizon: Union[int, float],
                  n_paths: int,
                  seed: int,
                  workers: int = 1) -> np.ndarray:
    """
    Empirical distribution of the state at the horizon over n_paths walks.

    Paths are cut into fixed-size blocks; block b always draws from the
    substream (seed, b), so the result does not depend on workers.

    Args:
        chain: StochasticMatrix (horizon in steps) or GeneratorMatrix (horizon in time)
        pi0: Initial PMF
        horizon: Steps or time
        n_paths: Number of independent trajectories
        seed: 64-bit seed
        workers: Threads used for blocks

    Returns:
        Empirical PMF
    """
    pi0 = _check_dims(chain, pi0)
    if n_paths < 1:
        raise ValidationError(f"n_paths must be positive, got {n_paths}")
    if horizon < 0:
        raise ValidationError(f"horizon must be nonnegative, got {horizon}")

    if isinstance(chain, StochasticMatrix):
        if int(horizon) != horizon:
            raise ValidationError("DTMC horizon must be an integer number of steps")

        def run_block(n, rng):
            return _simulate_dtmc_block(chain.matrix, pi0, int(horizon), n, rng)
    else:
        def run_block(n, rng):
            return _simulate_ctmc_block(chain.matrix, pi0, float(horizon), n, rng)

    sizes = [min(SIMULATION_BLOCK, n_paths - start) for start in range(0, n_paths, SIMULATION_BLOCK)]
    logger.debug("Simulating %d paths in %d blocks on %d workers", n_paths, len(sizes), workers)

    def count_block(block: int) -> np.ndarray:
        states = run_block(sizes[block], _block_rng(seed, block))
        return np.bincount(states, minlength=chain.size)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        counts = sum(pool.map(count_block, range(len(sizes))))
    return probability_vector(counts / n_paths)
