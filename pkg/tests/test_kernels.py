"""Parity between the compiled and pure-Python kernel backends.

Both implement the same recursions in the same floating-point evaluation
order, so results must be bit-identical, not merely close.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipcore import kernels
from bipcore.kernels import pykernels

from conftest import random_bipartite

try:
    from bipcore.kernels import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled kernel extension not built"
)


def _to_global(g):
    adj = list(g.global_adjacency())
    return adj


def test_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_is_sum_real_tiny():
    # single vertex, weight 2: 1 + 2
    assert pykernels.is_sum_real([0], [2.0], 1) == 3.0
    # edge with weights a, b: 1 + a + b
    assert pykernels.is_sum_real([2, 1], [2.0, 5.0], 3) == 8.0
    # free=0 means the empty set only
    assert pykernels.is_sum_real([2, 1], [2.0, 5.0], 0) == 1.0


def test_is_sum_complex_matches_real_on_real_inputs():
    adj = [2, 1]
    zr = pykernels.is_sum_real(adj, [2.0, 5.0], 3)
    zc = pykernels.is_sum_complex(adj, [2.0 + 0j, 5.0 + 0j], 3)
    assert zc == complex(zr)


@needs_compiled
@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_real_backends_bit_identical(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    g = random_bipartite(rng, 5, 5, 0.5)
    adj = _to_global(g)
    w = [float(rng.uniform(0.01, 8.0)) for _ in range(g.n_vertices)]
    free = (1 << g.n_vertices) - 1
    a = pykernels.is_sum_real(adj, w, free)
    b = _ckernels.is_sum_real(adj, w, free)
    assert a == b  # bit-identical, same evaluation order


@needs_compiled
@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_complex_backends_bit_identical(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    g = random_bipartite(rng, 5, 5, 0.5)
    adj = _to_global(g)
    w = [
        complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        for _ in range(g.n_vertices)
    ]
    free = (1 << g.n_vertices) - 1
    a = pykernels.is_sum_complex(adj, w, free)
    b = _ckernels.is_sum_complex(adj, w, free)
    assert a == b


@needs_compiled
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ursell_edge_sum_backends_identical(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    n = int(rng.integers(1, 6))
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.6
    ]
    a = pykernels.ursell_edge_sum(n, edges)
    b = _ckernels.ursell_edge_sum(n, edges)
    assert a == b
    assert isinstance(a, int) and isinstance(b, int)


def test_pure_python_env_override(tmp_path, monkeypatch):
    import importlib
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c",
         "from bipcore import kernels; print(kernels.BACKEND)"],
        env={"BIPCORE_PURE": "1", "PATH": "/usr/bin:/bin:/usr/local/bin"},
        capture_output=True,
        text=True,
    )
    assert out.stdout.strip() == "python"
