"""Rooted binary Cayley tree in heap layout.

Vertex ``v`` has children ``2v+1`` and ``2v+2``; the root is 0 and also has
exactly two successors (the semi-infinite tree). Edge and prolonged-pair lists
are built lazily so that deep trees can be passed to the level-recursive
partition function without materialising ~2**n vertices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DepthTooLarge, LeafVertex, NoGrandchildren, UnsupportedOrder

#: largest admissible |V_n|; depth 30 is the deepest tree the DP accepts
DEFAULT_VERTEX_BUDGET = 2**31 - 1


def level(v: int) -> int:
    """Level of vertex ``v`` (root is level 0)."""
    if v < 0:
        raise ValueError(f"vertex id must be non-negative, got {v}")
    return (v + 1).bit_length() - 1


def level_range(m: int) -> range:
    """Vertex ids of W_m."""
    return range(2**m - 1, 2 ** (m + 1) - 1)


def n_vertices(n: int) -> int:
    """|V_n| = 2^(n+1) - 1."""
    return 2 ** (n + 1) - 1


@dataclass(frozen=True)
class CayleyTree:
    k: int
    n: int
    vertex_budget: int = field(default=DEFAULT_VERTEX_BUDGET, compare=False, repr=False)

    @property
    def num_vertices(self) -> int:
        return n_vertices(self.n)

    @property
    def level_sets(self) -> list[range]:
        return [level_range(m) for m in range(self.n + 1)]

    @cached_property
    def edges(self) -> np.ndarray:
        """(|V_n|-1, 2) array of (parent, child) pairs in child-id order."""
        child = np.arange(1, self.num_vertices, dtype=np.int64)
        return np.column_stack([(child - 1) // 2, child])

    @cached_property
    def prolonged_pairs(self) -> np.ndarray:
        """(grandparent, grandchild) pairs in grandchild-id order."""
        z = np.arange(3, self.num_vertices, dtype=np.int64)
        return np.column_stack([((z - 1) // 2 - 1) // 2, z])

    def boundary_edges(self) -> np.ndarray:
        """Edges from W_{n-1} to W_n, the only ones carrying boundary fields."""
        if self.n == 0:
            return np.empty((0, 2), dtype=np.int64)
        return self.edges[2**self.n - 2 :]

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.num_vertices


def build_tree(k: int = 2, n: int = 0, *, vertex_budget: int = DEFAULT_VERTEX_BUDGET) -> CayleyTree:
    if k != 2:
        raise UnsupportedOrder(f"only order k=2 is supported, got k={k}")
    if n < 0:
        raise ValueError(f"depth must be >= 0, got {n}")
    if n_vertices(n) > vertex_budget:
        raise DepthTooLarge(f"|V_{n}| = {n_vertices(n)} exceeds vertex budget {vertex_budget}")
    return CayleyTree(k, n, vertex_budget)


def _check_vertex(t: CayleyTree, v: int) -> None:
    if v not in t:
        raise ValueError(f"vertex {v} is not in V_{t.n}")


def successors(t: CayleyTree, v: int) -> list[int]:
    """Direct successors S(v): the two children one level further from the root."""
    _check_vertex(t, v)
    if level(v) >= t.n:
        raise LeafVertex(f"vertex {v} lies on the last level W_{t.n}")
    return [2 * v + 1, 2 * v + 2]


def prolonged_successors(t: CayleyTree, v: int) -> list[int]:
    """S(S(v)): the four grandchildren, i.e. the prolonged next-nearest neighbours below v."""
    _check_vertex(t, v)
    if level(v) > t.n - 2:
        raise NoGrandchildren(f"vertex {v} at level {level(v)} has no grandchildren in V_{t.n}")
    return [4 * v + 3, 4 * v + 4, 4 * v + 5, 4 * v + 6]
