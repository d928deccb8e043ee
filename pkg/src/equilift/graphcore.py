"""Simple undirected graphs with optional part labels, edge signings, 2-lifts,
and the edge-list text format.

Vertices are 0-based.  Edges are stored canonically as (min, max) pairs in
lexicographic order; every iteration order and tie-break in the package
derives from this canonical order.  Graphs and signings are immutable after
construction.  Under a 2-lift, the copies of vertex v are v and v + n.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _canonical_edges(edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be pairs of vertex indices")
    lo = arr.min(axis=1)
    hi = arr.max(axis=1)
    arr = np.column_stack([lo, hi])
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    return arr[order]


class Graph:
    """Simple undirected graph, optionally k-partite via 1-based part labels."""

    __slots__ = ("n", "edges", "parts", "_cache")

    def __init__(self, n: int, edges, parts=None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = int(n)
        arr = _canonical_edges(edges)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                bad = arr[(arr[:, 0] < 0) | (arr[:, 1] >= n)][0]
                raise ValueError(f"edge ({bad[0]}, {bad[1]}) out of vertex range 0..{n - 1}")
            loops = arr[:, 0] == arr[:, 1]
            if loops.any():
                v = int(arr[loops][0, 0])
                raise ValueError(f"self-loop at vertex {v}")
            dup = (np.diff(arr[:, 0]) == 0) & (np.diff(arr[:, 1]) == 0)
            if dup.any():
                u, v = arr[1:][dup][0]
                raise ValueError(f"duplicate edge ({u}, {v})")
        arr.setflags(write=False)
        self.edges = arr
        if parts is not None:
            p = np.asarray(parts, dtype=np.int64)
            if p.shape != (self.n,):
                raise ValueError("parts must assign one label per vertex")
            k = int(p.max()) if self.n else 0
            if self.n and (p.min() < 1 or len(np.unique(p)) != k):
                raise ValueError("part labels must be contiguous 1..k")
            if arr.size:
                same = p[arr[:, 0]] == p[arr[:, 1]]
                if same.any():
                    u, v = arr[same][0]
                    raise ValueError(f"edge ({u}, {v}) joins two vertices of part {p[u]}")
            p.setflags(write=False)
            self.parts = p
        else:
            self.parts = None
        self._cache = {}

    # -- basic views ------------------------------------------------------

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def part_count(self) -> int:
        if self.parts is None:
            return 0
        return int(self.parts.max()) if self.n else 0

    def degrees(self) -> np.ndarray:
        deg = self._cache.get("degrees")
        if deg is None:
            deg = np.bincount(self.edges.ravel(), minlength=self.n)
            deg.setflags(write=False)
            self._cache["degrees"] = deg
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        if self.m:
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def csr(self):
        """Incidence CSR (indptr, nbr_vertex, nbr_edge), adjacency sorted by edge id."""
        csr = self._cache.get("csr")
        if csr is None:
            csr = build_csr(self.n, self.edges)
            self._cache["csr"] = csr
        return csr

    def edge_ids(self) -> dict:
        ids = self._cache.get("edge_ids")
        if ids is None:
            ids = {(int(u), int(v)): i for i, (u, v) in enumerate(self.edges)}
            self._cache["edge_ids"] = ids
        return ids

    def bipartition(self) -> np.ndarray | None:
        """Two-coloring as a 0/1 array; part labels are used when k == 2.

        Returns None when the graph is not bipartite.  Isolated vertices and
        component roots (smallest vertex of each component) get color 0.
        """
        colors = self._cache.get("colors", False)
        if colors is False:
            if self.parts is not None and self.part_count == 2:
                colors = (self.parts - 1).astype(np.int8)
            else:
                colors = _two_color(self.n, *self.csr()[:2])
            if colors is not None:
                colors.setflags(write=False)
            self._cache["colors"] = colors
        return colors

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or not np.array_equal(self.edges, other.edges):
            return False
        if (self.parts is None) != (other.parts is None):
            return False
        return self.parts is None or np.array_equal(self.parts, other.parts)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        k = self.part_count
        tag = f", parts={k}" if k else ""
        return f"Graph(n={self.n}, m={self.m}{tag})"


def build_csr(n: int, edges: np.ndarray):
    m = edges.shape[0]
    ends = np.concatenate([edges[:, 0], edges[:, 1]])
    other = np.concatenate([edges[:, 1], edges[:, 0]])
    eids = np.concatenate([np.arange(m, dtype=np.int64)] * 2)
    order = np.lexsort((eids, ends))
    nbr_v = other[order]
    nbr_e = eids[order]
    counts = np.bincount(ends, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, nbr_v, nbr_e


def _two_color(n: int, indptr, nbr_v) -> np.ndarray | None:
    colors = np.full(n, -1, dtype=np.int8)
    queue = np.empty(n, dtype=np.int64)
    for root in range(n):
        if colors[root] >= 0:
            continue
        colors[root] = 0
        queue[0] = root
        head, tail = 0, 1
        while head < tail:
            x = queue[head]
            head += 1
            cx = colors[x]
            for ptr in range(indptr[x], indptr[x + 1]):
                y = nbr_v[ptr]
                if colors[y] < 0:
                    colors[y] = 1 - cx
                    queue[tail] = y
                    tail += 1
                elif colors[y] == cx:
                    return None
    return colors


def connected_components(g: Graph) -> np.ndarray:
    """Component label per vertex, labels in order of smallest member."""
    indptr, nbr_v, _ = g.csr()
    comp = np.full(g.n, -1, dtype=np.int64)
    queue = np.empty(g.n, dtype=np.int64)
    label = 0
    for root in range(g.n):
        if comp[root] >= 0:
            continue
        comp[root] = label
        queue[0] = root
        head, tail = 0, 1
        while head < tail:
            x = queue[head]
            head += 1
            for ptr in range(indptr[x], indptr[x + 1]):
                y = nbr_v[ptr]
                if comp[y] < 0:
                    comp[y] = label
                    queue[tail] = y
                    tail += 1
        label += 1
    return comp


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or int(connected_components(g).max()) == 0


def build_graph(n: int, edges, parts=None) -> Graph:
    """Validated graph constructor; rejects self-loops, duplicate edges, and
    (when parts are given) edges inside a part, naming the offending edge."""
    return Graph(n, edges, parts)


def regularity(g: Graph):
    """Common degree d if the graph is d-regular, else None."""
    if g.n == 0:
        return 0
    deg = g.degrees()
    d = int(deg[0])
    return d if bool((deg == d).all()) else None


class Signing:
    """An edge -> {+1, -1} labeling of a base graph.

    Signs are stored aligned with the base's canonical edge order, so the
    domain is exactly the edge set by construction.
    """

    __slots__ = ("base", "signs")

    def __init__(self, base: Graph, signs):
        arr = np.asarray(signs, dtype=np.int8)
        if arr.shape != (base.m,):
            raise ValueError("signs must assign one label per edge")
        if arr.size and not np.isin(arr, (-1, 1)).all():
            raise ValueError("signs must be +1 or -1")
        arr.setflags(write=False)
        self.base = base
        self.signs = arr

    @classmethod
    def all_plus(cls, base: Graph) -> "Signing":
        return cls(base, np.ones(base.m, dtype=np.int8))

    @classmethod
    def from_mapping(cls, base: Graph, mapping) -> "Signing":
        ids = base.edge_ids()
        signs = np.ones(base.m, dtype=np.int8)
        seen = 0
        for (u, v), s in mapping.items():
            key = (min(u, v), max(u, v))
            if key not in ids:
                raise ValueError(f"sign given for non-edge {key}")
            signs[ids[key]] = s
            seen += 1
        if seen != base.m:
            raise ValueError("signing must cover every edge exactly once")
        return cls(base, signs)

    def signed_adjacency(self) -> np.ndarray:
        a = np.zeros((self.base.n, self.base.n), dtype=np.float64)
        if self.base.m:
            e = self.base.edges
            a[e[:, 0], e[:, 1]] = self.signs
            a[e[:, 1], e[:, 0]] = self.signs
        return a

    def __repr__(self):
        neg = int((self.signs < 0).sum())
        return f"Signing(base={self.base!r}, negatives={neg})"


def two_lift(s: Signing) -> Graph:
    """The double cover determined by a signing.

    Edge uv lifts to (u, v) and (u+n, v+n) when signed +1, and to (u, v+n)
    and (v, u+n) when signed -1.  Part labels are inherited by both copies.
    """
    g = s.base
    n = g.n
    e = g.edges
    pos = s.signs > 0
    ep = e[pos]
    en = e[~pos]
    lifted = np.concatenate(
        [
            ep,
            ep + n,
            np.column_stack([en[:, 0], en[:, 1] + n]),
            np.column_stack([en[:, 1], en[:, 0] + n]),
        ]
    )
    parts = None if g.parts is None else np.concatenate([g.parts, g.parts])
    return Graph(2 * n, lifted, parts)


def check_graph_lift(g: Graph, mat) -> bool:
    """True iff each pair of parts (i, j) induces an M[i][j]-regular bipartite
    graph.  Requires part labels and a symmetric zero-diagonal M of matching
    dimension."""
    if g.parts is None:
        raise ValueError("graph has no part labels")
    mat = np.asarray(mat, dtype=np.int64)
    k = g.part_count
    if mat.shape != (k, k):
        raise ValueError(f"matrix is {mat.shape} but graph has {k} parts")
    if not np.array_equal(mat, mat.T) or np.diagonal(mat).any():
        raise ValueError("matrix must be symmetric with zero diagonal")
    if (mat < 0).any():
        raise ValueError("matrix entries must be nonnegative")
    # cross-part neighbor counts per vertex
    counts = np.zeros((g.n, k + 1), dtype=np.int64)
    if g.m:
        e = g.edges
        np.add.at(counts, (e[:, 0], g.parts[e[:, 1]]), 1)
        np.add.at(counts, (e[:, 1], g.parts[e[:, 0]]), 1)
    for i in range(1, k + 1):
        members = np.flatnonzero(g.parts == i)
        for j in range(1, k + 1):
            if i == j:
                continue
            if not (counts[members, j] == mat[i - 1, j - 1]).all():
                return False
    return True


# -- edge-list text format ------------------------------------------------
#
#   n m k
#   p_0 ... p_{n-1}        (only when k > 0)
#   u v                    (m lines, canonical order; signings add a +-1 column)


def graph_to_text(g: Graph) -> str:
    k = g.part_count
    lines = [f"{g.n} {g.m} {k}"]
    if k:
        lines.append(" ".join(str(int(p)) for p in g.parts))
    for u, v in g.edges:
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(graph_to_text(g))


def graph_from_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph file")
    n, m, k = (int(t) for t in lines[0].split())
    pos = 1
    parts = None
    if k > 0:
        parts = [int(t) for t in lines[pos].split()]
        pos += 1
    edges = []
    for ln in lines[pos : pos + m]:
        u, v = (int(t) for t in ln.split())
        edges.append((u, v))
    if len(edges) != m:
        raise ValueError(f"expected {m} edges, found {len(edges)}")
    return Graph(n, edges, parts)


def read_graph(path) -> Graph:
    return graph_from_text(Path(path).read_text())


def signing_to_text(s: Signing) -> str:
    g = s.base
    k = g.part_count
    lines = [f"{g.n} {g.m} {k}"]
    if k:
        lines.append(" ".join(str(int(p)) for p in g.parts))
    for (u, v), sg in zip(g.edges, s.signs):
        lines.append(f"{u} {v} {'+1' if sg > 0 else '-1'}")
    return "\n".join(lines) + "\n"


def write_signing(s: Signing, path) -> None:
    Path(path).write_text(signing_to_text(s))


def signing_from_text(text: str) -> Signing:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m, k = (int(t) for t in lines[0].split())
    pos = 1
    parts = None
    if k > 0:
        parts = [int(t) for t in lines[pos].split()]
        pos += 1
    edges = []
    signs = []
    for ln in lines[pos : pos + m]:
        u, v, sg = ln.split()
        edges.append((int(u), int(v)))
        signs.append(int(sg))
    g = Graph(n, edges, parts)
    # align signs with canonical order
    ids = g.edge_ids()
    arr = np.ones(m, dtype=np.int8)
    for (u, v), sg in zip(edges, signs):
        arr[ids[(min(u, v), max(u, v))]] = sg
    return Signing(g, arr)


def read_signing(path) -> Signing:
    return signing_from_text(Path(path).read_text())
