import itertools

import numpy as np
import pytest

from chains import (
    ctmc_from_graph,
    dtmc_from_graph,
    permutation_matrix,
    random_doubly_stochastic,
    validate_generator,
    validate_stochastic,
)
from errors import GraphError, ValidationError
from graph import Graph, adjacency_matrix, enumerate_graphs, generate


class TestDtmc:
    def test_triangle(self, triangle):
        p = dtmc_from_graph(triangle)
        np.testing.assert_allclose(p.matrix, adjacency_matrix(triangle) / 2)
        assert p.doubly_stochastic

    def test_path_is_not_doubly_stochastic(self, path3):
        p = dtmc_from_graph(path3)
        np.testing.assert_allclose(p.matrix, [[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]])
        assert not p.doubly_stochastic
        np.testing.assert_allclose(p.matrix.sum(axis=0), [0.5, 2, 0.5])

    def test_zero_in_degree_becomes_absorbing(self, out_star):
        p = dtmc_from_graph(out_star, "in")
        np.testing.assert_array_equal(p.matrix, [[1, 0, 0], [1, 0, 0], [1, 0, 0]])

    def test_out_orientation(self, out_star):
        p = dtmc_from_graph(out_star, "out")
        np.testing.assert_allclose(p.matrix, [[0, 0.5, 0.5], [0, 1, 0], [0, 0, 1]])

    def test_weighted_normalization(self):
        g = Graph(3, ((0, 1, 1.0), (0, 2, 3.0)))
        np.testing.assert_allclose(dtmc_from_graph(g).matrix[0], [0, 0.25, 0.75])

    def test_directed_defaults_to_in(self, out_star):
        np.testing.assert_array_equal(dtmc_from_graph(out_star).matrix, dtmc_from_graph(out_star, "in").matrix)

    def test_requires_edges(self):
        with pytest.raises(GraphError):
            dtmc_from_graph(Graph(3))

    def test_result_is_read_only(self, triangle):
        with pytest.raises(ValueError):
            dtmc_from_graph(triangle).matrix[0, 0] = 1.0

    def test_doubly_stochastic_iff_regular(self):
        for m in range(2, 6):
            for g in enumerate_graphs(m, connected=True):
                d = adjacency_matrix(g).sum(axis=1)
                assert dtmc_from_graph(g).doubly_stochastic == bool(np.all(d == d[0]))


class TestCtmc:
    def test_path(self, path3):
        np.testing.assert_array_equal(ctmc_from_graph(path3).matrix, [[-1, 1, 0], [1, -2, 1], [0, 1, -1]])

    def test_single_edge(self):
        np.testing.assert_array_equal(ctmc_from_graph(Graph(2, ((0, 1),))).matrix, [[-1, 1], [1, -1]])

    def test_weighted_triangle(self):
        g = Graph(3, ((0, 1, 2.0), (1, 2, 2.0), (0, 2, 2.0)))
        np.testing.assert_array_equal(ctmc_from_graph(g).matrix, [[-4, 2, 2], [2, -4, 2], [2, 2, -4]])

    def test_undirected_generator_properties(self):
        for g in enumerate_graphs(5, connected=True):
            q = ctmc_from_graph(g).matrix
            assert np.all(q.sum(axis=1) == 0)
            assert np.all(np.ones(5) @ q == 0)
            np.testing.assert_array_equal(q, q.T)

    def test_directed_both_orientations(self):
        g = Graph(4, ((0, 1), (1, 2), (2, 0), (3, 0, 2.0)), directed=True)
        for orientation in ("in", "out"):
            q = ctmc_from_graph(g, orientation).matrix
            assert np.all(q.sum(axis=1) == 0)
            off = q - np.diag(np.diag(q))
            assert np.all(off >= 0)
            assert np.all(np.diag(q) <= 0)


def test_permutation_equivariance(rng):
    g = Graph(5, ((0, 1), (1, 2, 2.0), (2, 3), (3, 4, 0.5), (4, 0), (0, 2)))
    perm = rng.permutation(5)
    # relabel sends vertex i to perm[i]; permutation_matrix(perm) has ones at (i, perm[i])
    pm = permutation_matrix(perm)
    relabeled = g.relabel(perm)
    np.testing.assert_allclose(dtmc_from_graph(relabeled).matrix, pm.T @ dtmc_from_graph(g).matrix @ pm)
    np.testing.assert_allclose(ctmc_from_graph(relabeled).matrix, pm.T @ ctmc_from_graph(g).matrix @ pm)


class TestValidateStochastic:
    def test_uniform_two_by_two(self):
        assert validate_stochastic([[0.5, 0.5], [0.5, 0.5]]).doubly_stochastic

    def test_bad_row_named(self):
        with pytest.raises(ValidationError, match="row 1 sums to 0.9"):
            validate_stochastic([[1, 0], [0.3, 0.6]])

    def test_symmetric(self):
        assert validate_stochastic([[0.75, 0.25], [0.25, 0.75]]).doubly_stochastic

    def test_negative_entry(self):
        with pytest.raises(ValidationError, match="row 0"):
            validate_stochastic([[1.5, -0.5], [0.5, 0.5]])

    def test_not_square(self):
        with pytest.raises(ValidationError):
            validate_stochastic([[0.5, 0.5]])

    def test_row_but_not_column_stochastic(self):
        assert not validate_stochastic([[1, 0], [1, 0]]).doubly_stochastic


class TestGeneratorValidation:
    def test_valid(self):
        q = validate_generator([[-2, 2], [1, -1]])
        assert not q.is_symmetric

    def test_invalid(self):
        with pytest.raises(ValidationError):
            validate_generator([[-1, 2], [1, -1]])
        with pytest.raises(ValidationError):
            validate_generator([[1, -1], [1, -1]])


def test_random_doubly_stochastic(rng):
    for m, k in itertools.product(range(2, 9), (1, 3, 8)):
        b = random_doubly_stochastic(m, k, rng)
        assert b.doubly_stochastic
        np.testing.assert_allclose(b.matrix.sum(axis=0), 1, atol=1e-12)
