"""
Graph Module
Simple weighted/unweighted, directed/undirected graphs and the matrices and
distributions derived from them (adjacency, degree, Laplacian, degree PMF).
"""

import io
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Literal, NamedTuple, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from errors import GraphError, GraphParseError, ValidationError

logger = logging.getLogger(__name__)

Orientation = Literal["undirected", "in", "out"]
GraphKind = Literal["ring", "complete", "star"]

ORIENTATIONS = ("undirected", "in", "out")
PMF_TOL = 1e-9

_MIN_VERTICES = {"ring": 3, "complete": 2, "star": 2}


class Edge(NamedTuple):
    """One edge u -> v (or u -- v) with a strictly positive weight."""

    u: int
    v: int
    weight: float = 1.0


@dataclass(frozen=True)
class Graph:
    """
    Immutable simple graph on vertices 0..num_vertices-1.

    Args:
        num_vertices: Vertex count M
        edges: Edges as (u, v, weight) triples
        directed: Whether (u, v) is an ordered pair
    """

    num_vertices: int
    edges: Tuple[Edge, ...] = ()
    directed: bool = False

    def __post_init__(self):
        if self.num_vertices < 1:
            raise GraphError(f"graph needs at least one vertex, got {self.num_vertices}")
        edges = tuple(Edge(int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0) for e in self.edges)
        seen = set()
        for u, v, w in edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside [0, {self.num_vertices - 1}]")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (np.isfinite(w) and w > 0):
                raise GraphError(f"edge ({u}, {v}) has non-positive weight {w}")
            key = (u, v) if self.directed else (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(key)
        object.__setattr__(self, "edges", edges)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def is_unit_weighted(self) -> bool:
        return all(e.weight == 1.0 for e in self.edges)

    def unweighted(self) -> "Graph":
        """Same structure with every weight set to one."""
        return Graph(self.num_vertices, tuple(Edge(e.u, e.v, 1.0) for e in self.edges), self.directed)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """
        Rename vertex i to perm[i].

        Args:
            perm: A permutation of 0..M-1

        Returns:
            Relabeled graph
        """
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.num_vertices)):
            raise GraphError("relabeling must be a permutation of all vertices")
        edges = tuple(Edge(perm[e.u], perm[e.v], e.weight) for e in self.edges)
        return Graph(self.num_vertices, edges, self.directed)


def _iter_lines(text: Union[str, TextIO, Iterable[str]]) -> Iterator[str]:
    if isinstance(text, str):
        text = io.StringIO(text)
    for line in text:
        yield line.rstrip("\r\n")


def parse_edge_list(text: Union[str, TextIO, Iterable[str]], directed: bool = False) -> Graph:
    """
    Parse the edge-list format.

    Lines starting with '#' are comments. The first non-comment line may be
    "vertices <M>"; every other non-empty line is "<u> <v>" or "<u> <v> <w>".

    Args:
        text: Edge-list text, an open text file or an iterable of lines
        directed: Directedness (not stored in the file)

    Returns:
        Parsed Graph
    """
    declared: Optional[int] = None
    edges: List[Edge] = []
    seen = {}
    first_data = True

    for line_no, raw in enumerate(_iter_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()

        if fields[0] == "vertices":
            if not first_data:
                raise GraphParseError("'vertices' header must precede all edges", line_no)
            if len(fields) != 2:
                raise GraphParseError(f"malformed header {line!r}", line_no)
            try:
                declared = int(fields[1])
            except ValueError:
                raise GraphParseError(f"vertex count {fields[1]!r} is not an integer", line_no) from None
            if declared < 1:
                raise GraphParseError(f"vertex count must be positive, got {declared}", line_no)
            first_data = False
            continue
        first_data = False

        if len(fields) not in (2, 3):
            raise GraphParseError(f"expected '<u> <v> [w]', got {line!r}", line_no)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphParseError(f"vertex ids must be integers in {line!r}", line_no) from None
        if u < 0 or v < 0:
            raise GraphParseError(f"negative vertex id in {line!r}", line_no)
        weight = 1.0
        if len(fields) == 3:
            try:
                weight = float(fields[2])
            except ValueError:
                raise GraphParseError(f"weight {fields[2]!r} is not a number", line_no) from None
            if not (np.isfinite(weight) and weight > 0):
                raise GraphParseError(f"weight must be positive, got {fields[2]}", line_no)
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", line_no)
        if declared is not None and max(u, v) >= declared:
            raise GraphParseError(f"vertex id {max(u, v)} exceeds declared count {declared}", line_no)

        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise GraphParseError(f"duplicate edge ({u}, {v}), first seen on line {seen[key]}", line_no)
        seen[key] = line_no
        edges.append(Edge(u, v, weight))

    if declared is None:
        if not edges:
            raise GraphParseError("no edges and no 'vertices' header")
        declared = 1 + max(max(e.u, e.v) for e in edges)

    logger.debug("Parsed %d edges on %d vertices (directed=%s)", len(edges), declared, directed)
    return Graph(declared, tuple(edges), directed)


def load_edge_list(path: str, directed: bool = False) -> Graph:
    """Read an edge-list file (UTF-8)."""
    with open(path, "r", encoding="utf-8") as f:
        return parse_edge_list(f, directed=directed)


def format_edge_list(g: Graph) -> str:
    """Render g in the edge-list format; weights are written only when not all one."""
    lines = [f"vertices {g.num_vertices}"]
    with_weights = not g.is_unit_weighted
    for e in g.edges:
        if with_weights:
            lines.append(f"{e.u} {e.v} {e.weight:.12g}")
        else:
            lines.append(f"{e.u} {e.v}")
    return "\n".join(lines) + "\n"


def _check_orientation(g: Graph, orientation: str):
    if orientation not in ORIENTATIONS:
        raise GraphError(f"unknown orientation {orientation!r}")
    if orientation == "undirected" and g.directed:
        raise GraphError("orientation 'undirected' needs an undirected graph; use 'in' or 'out'")
    if orientation != "undirected" and not g.directed:
        raise GraphError(f"orientation {orientation!r} needs a directed graph")


def default_orientation(g: Graph) -> str:
    """'undirected' for undirected graphs, 'in' for directed ones."""
    return "in" if g.directed else "undirected"


def adjacency_matrix(g: Graph, orientation: Optional[str] = None) -> np.ndarray:
    """
    Weighted adjacency matrix.

    For 'out', A[i][j] is the weight of i -> j; for 'in', row i lists the
    sources of edges into i, so A_in is the transpose of A_out.

    Args:
        g: Graph
        orientation: "undirected", "in" or "out" (default chosen from g)

    Returns:
        M x M float array
    """
    orientation = orientation or default_orientation(g)
    _check_orientation(g, orientation)
    m = g.num_vertices
    a = np.zeros((m, m), dtype=float)
    for u, v, w in g.edges:
        a[u, v] = w
        if orientation == "undirected":
            a[v, u] = w
    if orientation == "in":
        a = a.T.copy()
    return a


def degrees(g: Graph, orientation: Optional[str] = None) -> np.ndarray:
    """Weighted degree of every vertex (row sums of the adjacency matrix)."""
    return adjacency_matrix(g, orientation).sum(axis=1)


def degree_matrix(g: Graph, orientation: Optional[str] = None) -> np.ndarray:
    return np.diag(degrees(g, orientation))


def laplacian(g: Graph) -> np.ndarray:
    """
    L = D - A for an undirected graph.

    Args:
        g: Undirected graph

    Returns:
        Symmetric M x M array with zero row and column sums
    """
    if g.directed:
        raise GraphError("Laplacian is defined for undirected graphs only")
    a = adjacency_matrix(g, "undirected")
    return np.diag(a.sum(axis=1)) - a


def probability_vector(entries: Iterable[float], tol: float = PMF_TOL) -> np.ndarray:
    """
    Validate and freeze a probability mass function.

    Args:
        entries: Candidate probabilities
        tol: Allowed deviation of the sum from one

    Returns:
        Read-only float array
    """
    p = np.array(list(entries) if not isinstance(entries, np.ndarray) else entries, dtype=float).ravel()
    if p.size == 0:
        raise ValidationError("probability vector is empty")
    if not np.all(np.isfinite(p)):
        raise ValidationError("probability vector has non-finite entries")
    negative = np.flatnonzero(p < 0)
    if negative.size:
        raise ValidationError(f"probability vector entry {negative[0]} is negative ({p[negative[0]]})")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probability vector sums to {total:.12g}, not 1")
    p.setflags(write=False)
    return p


def uniform_pmf(m: int) -> np.ndarray:
    return probability_vector(np.full(m, 1.0 / m))


def point_pmf(m: int, k: int) -> np.ndarray:
    """All mass on vertex k."""
    if not 0 <= k < m:
        raise ValidationError(f"point mass index {k} outside [0, {m - 1}]")
    p = np.zeros(m)
    p[k] = 1.0
    return probability_vector(p)


def degree_pmf(g: Graph, orientation: Optional[str] = None) -> np.ndarray:
    """
    Vertex-degree distribution p_i = deg(i) / sum of degrees.

    Directed graphs use in- or out-degrees according to orientation.
    """
    d = degrees(g, orientation)
    total = d.sum()
    if total <= 0:
        raise GraphError("degree distribution is undefined for a graph without edges")
    return probability_vector(d / total)


def generate(kind: str, m: int) -> Graph:
    """
    Build a ring, complete or star graph on m vertices.

    The star's hub is vertex m-1, so its adjacency matrix has ones only in
    the last row and column.

    Args:
        kind: "ring", "complete" or "star"
        m: Vertex count

    Returns:
        Undirected unit-weight Graph
    """
    if kind not in _MIN_VERTICES:
        raise GraphError(f"unknown graph kind {kind!r}")
    if m < _MIN_VERTICES[kind]:
        raise GraphError(f"{kind} graph needs at least {_MIN_VERTICES[kind]} vertices, got {m}")

    if kind == "ring":
        edges = [Edge(i, (i + 1) % m) for i in range(m)]
    elif kind == "complete":
        edges = [Edge(i, j) for i, j in itertools.combinations(range(m), 2)]
    else:
        edges = [Edge(i, m - 1) for i in range(m - 1)]
    return Graph(m, tuple(edges), directed=False)


def is_connected(g: Graph) -> bool:
    """Connectivity of the underlying undirected structure."""
    a = adjacency_matrix(g, "out" if g.directed else "undirected")
    n_components, _ = connected_components(csr_matrix(a), directed=g.directed, connection="weak")
    return n_components == 1


def enumerate_graphs(m: int, connected: bool = False, min_edges: int = 1) -> Iterator[Graph]:
    """
    Yield every simple undirected unit-weight graph on m labelled vertices.

    There are 2^(m(m-1)/2) of them, so this is for brute-force checks on
    small m only.
    """
    pairs = list(itertools.combinations(range(m), 2))
    for mask in range(1 << len(pairs)):
        chosen = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if len(chosen) < min_edges:
            continue
        g = Graph(m, tuple(Edge(u, v) for u, v in chosen))
        if connected and not is_connected(g):
            continue
        yield g


def random_graph(m: int,
                 edge_prob: float,
                 rng: np.random.Generator,
                 connected: bool = True,
                 max_tries: int = 1000) -> Graph:
    """
    Erdos-Renyi sample G(m, edge_prob).

    Args:
        m: Vertex count
        edge_prob: Probability of each unordered pair being an edge
        rng: numpy Generator
        connected: Resample until the graph is connected
        max_tries: Give up after this many samples

    Returns:
        Undirected unit-weight Graph
    """
    pairs = list(itertools.combinations(range(m), 2))
    for _ in range(max_tries):
        keep = rng.random(len(pairs)) < edge_prob
        edges = tuple(Edge(u, v) for (u, v), k in zip(pairs, keep) if k)
        if not edges:
            continue
        g = Graph(m, edges)
        if not connected or is_connected(g):
            return g
    raise GraphError(f"no connected sample of G({m}, {edge_prob}) in {max_tries} tries")
