"""
Shared fixtures for the test suite.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Modules live at the project root
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from graph import Edge, Graph, generate  # noqa: E402


@pytest.fixture
def triangle():
    return generate("complete", 3)


@pytest.fixture
def path3():
    return Graph(3, (Edge(0, 1), Edge(1, 2)))


@pytest.fixture
def out_star():
    """Directed edges 0->1, 0->2."""
    return Graph(3, (Edge(0, 1), Edge(0, 2)), directed=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
