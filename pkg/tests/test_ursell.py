"""Ursell factors: known values, dual implementations, rational exactness."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest

from bipcore import SizeCapError, ursell, ursell_deletion_contraction, ursell_edge_subsets
from bipcore.clusters import _connected, _validate_simple


def _complete(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _cycle(n):
    return [(i, (i + 1) % n) for i in range(n)]


def _path_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def test_known_values():
    assert ursell(1, []) == Fraction(1)
    assert ursell(2, [(0, 1)]) == Fraction(-1, 2)
    assert ursell(3, _complete(3)) == Fraction(1, 3)
    assert ursell(4, _cycle(4)) == Fraction(-1, 8)


def test_complete_graph_closed_form():
    # U(K_k) = (-1)^(k-1) (k-1)!, so phi = (-1)^(k-1)/k
    for k in range(1, 7):
        assert ursell(k, _complete(k)) == Fraction((-1) ** (k - 1), k)


def test_tree_values_dual_implementations():
    # a tree has exactly one spanning connected edge subset: all of it
    for n in range(1, 8):
        edges = _path_edges(n)
        want = Fraction((-1) ** (n - 1), __import__("math").factorial(n))
        assert ursell_edge_subsets(n, edges) == want
        assert ursell_deletion_contraction(n, edges) == want


def test_rejects_disconnected_and_oversized():
    with pytest.raises(ValueError):
        ursell(2, [])
    with pytest.raises(ValueError):
        ursell(4, [(0, 1), (2, 3)])
    with pytest.raises(SizeCapError):
        ursell(13, _path_edges(13))
    with pytest.raises(ValueError):
        ursell(2, [(0, 0)])  # loop


def _all_connected_graphs(n):
    all_edges = _complete(n)
    for r in range(len(all_edges) + 1):
        for sub in combinations(all_edges, r):
            es = _validate_simple(n, sub)
            if _connected(n, es):
                yield list(sub)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_dual_implementations_agree_exhaustively(n):
    count = 0
    for edges in _all_connected_graphs(n):
        a = ursell_edge_subsets(n, edges)
        b = ursell_deletion_contraction(n, edges)
        assert a == b, f"n={n} edges={edges}: {a} != {b}"
        count += 1
    assert count >= 1


def test_dc_handles_multi_contraction_cases():
    # diamond (C_4 plus a chord): denominator-heavy, a good cancellation case
    edges = _cycle(4) + [(0, 2)]
    assert ursell_edge_subsets(4, edges) == ursell_deletion_contraction(4, edges)
    # complete bipartite K_{2,3} as an abstract graph on 5 vertices
    edges = [(i, 2 + j) for i in range(2) for j in range(3)]
    assert ursell_edge_subsets(5, edges) == ursell_deletion_contraction(5, edges)


def test_values_are_exact_rationals():
    v = ursell(4, _cycle(4))
    assert isinstance(v, Fraction)
    assert v.denominator in (8,)  # reduced from 24
