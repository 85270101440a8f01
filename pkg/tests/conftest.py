"""Shared fixtures and graph builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from bipcore import BipartiteGraph, Fugacities


def random_bipartite(rng: np.random.Generator, max_L: int = 4, max_R: int = 4,
                     p: float = 0.5) -> BipartiteGraph:
    """A random bipartite graph with at least one vertex per side."""
    n_L = int(rng.integers(1, max_L + 1))
    n_R = int(rng.integers(1, max_R + 1))
    edges = [
        (u, v)
        for u in range(n_L)
        for v in range(n_R)
        if rng.random() < p
    ]
    return BipartiteGraph(n_L, n_R, edges)


def random_fugacities(rng: np.random.Generator, low: float = 0.05,
                      high: float = 5.0) -> Fugacities:
    return Fugacities(
        float(rng.uniform(low, high)), float(rng.uniform(low, high))
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(20260814))
