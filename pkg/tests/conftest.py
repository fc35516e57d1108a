import logging

import numpy as np
import pytest

from markov_interp.core.config import LOGGER_NAME, LOG_ENV_VAR
from markov_interp.core.experiments import random_geometric_graph
from markov_interp.core.graph import Graph
from markov_interp.core.progress import PROGRESS_ENV_VAR


@pytest.fixture(autouse=True)
def _reset_package_logger(monkeypatch):
    """Undo handlers and ``propagate = False`` left behind by a Workbench."""
    monkeypatch.delenv(LOG_ENV_VAR, raising=False)
    monkeypatch.delenv(PROGRESS_ENV_VAR, raising=False)
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.propagate = True
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def star():
    """5-node star with unit weights; node 0 is the center."""
    return Graph.from_edges(5, [0, 0, 0, 0], [1, 2, 3, 4], [1.0, 1.0, 1.0, 1.0])


@pytest.fixture
def k2():
    return Graph.from_edges(2, [0], [1], [1.0])


@pytest.fixture
def k3():
    return Graph.from_edges(3, [0, 0, 1], [1, 2, 2], [1.0, 1.0, 1.0])


@pytest.fixture
def path4():
    return Graph.from_edges(4, [0, 1, 2], [1, 2, 3], [1.0, 1.0, 1.0])


@pytest.fixture
def weighted_complete():
    """Complete graph on 6 nodes with seeded weights in [0.5, 1.5]."""
    rng = np.random.default_rng(7)
    src, dst = np.triu_indices(6, k=1)
    return Graph.from_edges(6, src, dst, rng.uniform(0.5, 1.5, size=src.size))


@pytest.fixture
def rgg():
    graph, _ = random_geometric_graph(60, 8, seed=3)
    return graph
