"""Graph constructors used by the tests, the CLI corpus, and the demos:
named small graphs, bipartite circulants, seeded random regular bipartite
graphs, and the small cubic bipartite catalog."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graphcore import Graph

__all__ = [
    "cycle_graph",
    "path_graph",
    "complete_graph",
    "complete_bipartite",
    "circulant_bipartite",
    "disjoint_union",
    "petersen",
    "random_regular_bipartite",
    "cubic_bipartite_catalog",
]


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    v = np.arange(n)
    return Graph(n, np.column_stack([v, (v + 1) % n]))


def path_graph(n: int) -> Graph:
    v = np.arange(n - 1)
    return Graph(n, np.column_stack([v, v + 1]))


def complete_graph(n: int) -> Graph:
    return Graph(n, list(combinations(range(n), 2)))


def complete_bipartite(a: int, b: int, with_parts: bool = True) -> Graph:
    left = np.arange(a)
    right = np.arange(b)
    edges = np.column_stack([np.repeat(left, b), a + np.tile(right, a)])
    parts = None
    if with_parts:
        parts = np.concatenate([np.ones(a, np.int64), np.full(b, 2, np.int64)])
    return Graph(a + b, edges, parts)


def circulant_bipartite(side: int, offsets, with_parts: bool = True) -> Graph:
    """Left i joined to right (i + o) mod side for each offset o."""
    offsets = sorted(set(int(o) % side for o in offsets))
    if len(offsets) != len(set(offsets)):
        raise ValueError("offsets must be distinct mod side")
    v = np.arange(side)
    edges = np.concatenate([np.column_stack([v, side + (v + o) % side]) for o in offsets])
    parts = None
    if with_parts:
        parts = np.concatenate([np.ones(side, np.int64), np.full(side, 2, np.int64)])
    return Graph(2 * side, edges, parts)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    edges = np.concatenate([g1.edges, g2.edges + g1.n]) if g2.m else g1.edges.copy()
    if g1.parts is not None and g2.parts is not None:
        parts = np.concatenate([g1.parts, g2.parts])
    else:
        parts = None
    return Graph(g1.n + g2.n, edges, parts)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph(10, outer + inner + spokes)


def _augment(avail, match_l, match_r, u0):
    """Iterative alternating-path search over still-available pairs."""
    s = avail.shape[0]
    visited = np.zeros(s, dtype=bool)
    stack = [(u0, 0)]
    parent = {}
    found = -1
    while stack:
        u, start = stack.pop()
        for v in range(start, s):
            if not avail[u, v] or visited[v]:
                continue
            visited[v] = True
            parent[v] = u
            if match_r[v] == -1:
                found = v
                stack.clear()
                break
            stack.append((u, v + 1))
            stack.append((match_r[v], 0))
            break
    if found < 0:
        return False
    v = found
    while True:
        u = parent[v]
        prev = match_l[u]
        match_l[u] = v
        match_r[v] = u
        if u == u0:
            return True
        v = prev


def random_regular_bipartite(side: int, d: int, rng, with_parts: bool = True) -> Graph:
    """A uniform-ish simple d-regular bipartite graph on side + side vertices,
    built as d edge-disjoint perfect matchings (random greedy rounds with
    alternating-path repair)."""
    if not 0 <= d <= side:
        raise ValueError("need 0 <= d <= side")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    avail = np.ones((side, side), dtype=bool)
    rounds = []
    for _ in range(d):
        match_l = np.full(side, -1, dtype=np.int64)
        match_r = np.full(side, -1, dtype=np.int64)
        for u in rng.permutation(side):
            free = np.flatnonzero(avail[u] & (match_r == -1))
            if free.size:
                v = int(free[rng.integers(free.size)])
                match_l[u] = v
                match_r[v] = u
        for u in np.flatnonzero(match_l == -1):
            if not _augment(avail, match_l, match_r, int(u)):
                raise RuntimeError("matching round failed; graph too constrained")
        avail[np.arange(side), match_l] = False
        rounds.append(match_l)
    if d == 0:
        edges = np.empty((0, 2), dtype=np.int64)
    else:
        edges = np.concatenate(
            [np.column_stack([np.arange(side), side + r]) for r in rounds]
        )
    parts = None
    if with_parts:
        parts = np.concatenate([np.ones(side, np.int64), np.full(side, 2, np.int64)])
    return Graph(2 * side, edges, parts)


def cubic_bipartite_catalog(max_side: int = 7, randoms_per_side: int = 10, seed: int = 2024):
    """Deterministic catalog of 3-regular bipartite graphs on up to
    2 * max_side vertices: all bipartite circulants with offset sets
    {0, a, b} plus seeded random instances, deduplicated by edge set."""
    graphs = []
    seen = set()
    for side in range(3, max_side + 1):
        for a, b in combinations(range(1, side), 2):
            g = circulant_bipartite(side, (0, a, b))
            key = (g.n, g.edges.tobytes())
            if key not in seen:
                seen.add(key)
                graphs.append(g)
        for i in range(randoms_per_side):
            g = random_regular_bipartite(side, 3, np.random.default_rng([seed, side, i]))
            key = (g.n, g.edges.tobytes())
            if key not in seen:
                seen.add(key)
                graphs.append(g)
    return graphs
