"""Random factors of regular bipartite graphs.

Implements the short-cycle partition, the half-factor distribution, the
recursive a-factor distribution with its auxiliary matrix M, concentrated
factor selection against a test subspace, and Monte Carlo tail audits.

The auxiliary matrix of every sample is supported on the base graph's edges,
so it is carried as one weight per canonical base edge; dense form is
materialized on demand.  Sampling consumes randomness only through uniform
bits, one per short cycle, plus substream splits at recursion branches, so a
seeded generator reproduces a sample exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import cycle_partition_kernel, even_cycles_kernel, kuhn_matching_kernel
from .graphcore import Graph, build_csr, regularity

__all__ = [
    "CyclePartition",
    "FactorSample",
    "FactorSearch",
    "ConcentrationReport",
    "cycle_partition",
    "decompose_even_into_cycles",
    "find_perfect_matching",
    "enumerate_perfect_matchings",
    "sample_half_factor",
    "sample_a_factor",
    "c_bound",
    "select_concentrated_factor",
    "concentration_stats",
    "spectral_norm_edges",
]

_EMPTY_IDS = np.empty(0, dtype=np.int64)
_EMPTY_IDS.setflags(write=False)


def default_threshold(n: int) -> int:
    """Short-cycle length threshold 2*ceil(log2 n)."""
    if n < 2:
        return 3
    return max(3, 2 * int(math.ceil(math.log2(n))))


# -- cycle partition --------------------------------------------------------


@dataclass(frozen=True)
class CyclePartition:
    """Edge-disjoint short cycles plus a residual with no cycle of length <= L."""

    graph: Graph
    L: int
    short_cycles: tuple
    residual: tuple

    def residual_graph(self) -> Graph:
        return Graph(self.graph.n, np.array(self.residual, dtype=np.int64).reshape(-1, 2), self.graph.parts)

    def cycles_graph(self) -> Graph:
        flat = [e for cyc in self.short_cycles for e in cyc]
        return Graph(self.graph.n, np.array(flat, dtype=np.int64).reshape(-1, 2), self.graph.parts)


def _run_cycle_partition(g: Graph, L: int):
    indptr, nbr_v, nbr_e = g.csr()
    min_len = 4 if g.bipartition() is not None else 3
    return cycle_partition_kernel(g.n, g.m, indptr, nbr_v, nbr_e, L, min_len)


def cycle_partition(g: Graph, L: int | None = None) -> CyclePartition:
    """Greedily remove shortest cycles of length <= L (default 2*ceil(log2 n)).

    Ties break on the canonical scan order (start vertices ascending,
    adjacency in edge order).  Cycles come out in removal order, each rotated
    so its smallest edge leads; the residual has no cycle of length <= L.
    """
    if L is None:
        L = default_threshold(g.n)
    if L < 3:
        raise ValueError("threshold must be at least 3")
    flat, off, alive = _run_cycle_partition(g, L)
    cycles = []
    for i in range(len(off) - 1):
        ids = flat[off[i] : off[i + 1]]
        cycles.append(tuple((int(g.edges[e, 0]), int(g.edges[e, 1])) for e in ids))
    residual = tuple((int(u), int(v)) for u, v in g.edges[alive])
    return CyclePartition(graph=g, L=L, short_cycles=tuple(cycles), residual=residual)


def decompose_even_into_cycles(g: Graph) -> tuple:
    """Partition the edges of an even-degree graph into cycles (walk order)."""
    deg = g.degrees()
    odd = np.flatnonzero(deg % 2)
    if odd.size:
        raise ValueError(f"vertex {int(odd[0])} has odd degree {int(deg[odd[0]])}")
    if g.m == 0:
        return ()
    indptr, nbr_v, nbr_e = g.csr()
    flat, off = even_cycles_kernel(g.n, g.m, indptr, nbr_v, nbr_e, np.ones(g.m, dtype=bool))
    cycles = []
    for i in range(len(off) - 1):
        ids = flat[off[i] : off[i + 1]]
        cycles.append(tuple((int(g.edges[e, 0]), int(g.edges[e, 1])) for e in ids))
    return tuple(cycles)


# -- matchings ---------------------------------------------------------------


def _matching_local(n, edges, colors):
    """Maximum matching on a bipartite level graph, in kernel form."""
    m = edges.shape[0]
    indptr, nbr_v, nbr_e = build_csr(n, edges)
    left = colors == 0
    match_v, match_e = kuhn_matching_kernel(
        n, m, indptr, nbr_v, nbr_e, edges[:, 0].copy(), edges[:, 1].copy(), left
    )
    deg = np.bincount(edges.ravel(), minlength=n)
    uncovered = (match_v < 0) & (deg > 0)
    return match_v, match_e, uncovered


def find_perfect_matching(g: Graph) -> tuple:
    """A perfect matching chosen deterministically from the canonical edge
    order (greedy pass, then augmenting paths)."""
    colors = g.bipartition()
    if colors is None:
        raise ValueError("graph is not bipartite")
    n_left = int((colors == 0).sum())
    if 2 * n_left != g.n:
        raise ValueError(f"sides have sizes {n_left} and {g.n - n_left}; no perfect matching exists")
    match_v, match_e, _ = _matching_local(g.n, np.asarray(g.edges), colors)
    if (match_v < 0).any():
        raise ValueError("no perfect matching exists")
    ids = np.unique(match_e[match_e >= 0])
    return tuple((int(g.edges[e, 0]), int(g.edges[e, 1])) for e in ids)


def enumerate_perfect_matchings(g: Graph):
    """All perfect matchings as tuples of edge ids, in canonical backtracking
    order.  Intended for small oracle-style enumerations."""
    colors = g.bipartition()
    if colors is None:
        raise ValueError("graph is not bipartite")
    lefts = [v for v in range(g.n) if colors[v] == 0]
    if 2 * len(lefts) != g.n:
        raise ValueError("sides differ in size; no perfect matching exists")
    indptr, nbr_v, nbr_e = g.csr()
    used = np.zeros(g.n, dtype=bool)
    chosen = []
    out = []

    def extend(i):
        if i == len(lefts):
            out.append(tuple(chosen))
            return
        u = lefts[i]
        for ptr in range(indptr[u], indptr[u + 1]):
            v = nbr_v[ptr]
            if used[v]:
                continue
            used[v] = True
            chosen.append(int(nbr_e[ptr]))
            extend(i + 1)
            chosen.pop()
            used[v] = False

    extend(0)
    return out


# -- the factor distribution -------------------------------------------------


def c_bound(d: int) -> float:
    """The recursive norm bound: c_1 = 0, c_d = c_{d-1} + 1 for odd d > 1,
    c_d = c_{d/2} + sqrt(2d) for even d."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    c = 0.0
    # iterative evaluation over the d -> d/2 / d-1 chain
    chain = []
    x = int(d)
    while x > 1:
        chain.append(x)
        x = x // 2 if x % 2 == 0 else x - 1
    for x in reversed(chain):
        c = c + math.sqrt(2.0 * x) if x % 2 == 0 else c + 1.0
    return c


def _partition_step(base_edges, n, base_ids, L):
    """Deterministic half-factor data for one even level, in base edge ids."""
    edges = base_edges[base_ids]
    m = edges.shape[0]
    indptr, nbr_v, nbr_e = build_csr(n, edges)
    flat1, off1, alive = cycle_partition_kernel(n, m, indptr, nbr_v, nbr_e, L, 4)
    flat0, off0 = even_cycles_kernel(n, m, indptr, nbr_v, nbr_e, alive)
    lens0 = np.diff(off0)
    par0 = (np.arange(flat0.size) - np.repeat(off0[:-1], lens0)) & 1
    h0_local = flat0[par0 == 0]
    e0_local = np.flatnonzero(alive)
    in_h0 = np.zeros(m, dtype=bool)
    in_h0[h0_local] = True
    ncyc = off1.size - 1
    lens1 = np.diff(off1)
    return {
        "flat1": base_ids[flat1],
        "ci": np.repeat(np.arange(ncyc), lens1),
        "pa": (np.arange(flat1.size) - np.repeat(off1[:-1], lens1)) & 1,
        "ncyc": int(ncyc),
        "h0": np.sort(base_ids[h0_local]),
        "m1_idx": base_ids[e0_local],
        "m1_val": np.where(in_h0[e0_local], -0.5, 0.5),
    }


def _matching_step(base_edges, n, base_ids, colors):
    """Deterministic matching-removal data for one odd level, in base ids."""
    edges = base_edges[base_ids]
    match_v, match_e, _ = _matching_local(n, edges, colors)
    if (match_v < 0).any():
        raise ValueError("no perfect matching exists")
    local = np.unique(match_e[match_e >= 0])
    match_b = base_ids[local]
    keep = np.ones(base_ids.size, dtype=bool)
    keep[local] = False
    rest_b = base_ids[keep]
    return match_b, rest_b


def _ensure_plan(g: Graph, d: int):
    """Cache the deterministic prefix of the sampling recursion: matching
    removals for leading odd degrees, then the first even level's partition."""
    plan = g._cache.get("factor_plan")
    if plan is not None:
        return plan
    colors = g.bipartition()
    if colors is None:
        raise ValueError("graph is not bipartite")
    base_edges = np.asarray(g.edges)
    base_ids = np.arange(g.m, dtype=np.int64)
    L = default_threshold(g.n)
    steps = []
    dd = d
    while dd > 1:
        if dd % 2 == 1:
            match_b, rest_b = _matching_step(base_edges, g.n, base_ids, colors)
            steps.append(("odd", match_b, rest_b))
            base_ids = rest_b
            dd -= 1
        else:
            steps.append(("even", _partition_step(base_edges, g.n, base_ids, L)))
            break
    plan = {"colors": colors, "L": L, "steps": steps}
    g._cache["factor_plan"] = plan
    return plan


def _draw_half(step, rng):
    bits = rng.integers(0, 2, step["ncyc"])
    if step["ncyc"]:
        h1 = step["flat1"][step["pa"] == bits[step["ci"]]]
    else:
        h1 = _EMPTY_IDS
    return np.sort(np.concatenate([step["h0"], h1]))


def _rec(base_edges, n, base_ids, d, a, rng, w, wsign, colors, L, steps, pos):
    if a == 0:
        return _EMPTY_IDS
    if a == d:
        return base_ids
    if 2 * a > d:
        inner = _rec(base_edges, n, base_ids, d, d - a, rng, w, -wsign, colors, L, steps, pos)
        return np.setdiff1d(base_ids, inner, assume_unique=True)
    if d % 2 == 1:
        if pos < len(steps) and steps[pos][0] == "odd":
            _, match_b, rest_b = steps[pos]
        else:
            match_b, rest_b = _matching_step(base_edges, n, base_ids, colors)
        w[match_b] += wsign * a / d
        w[rest_b] += -wsign * a / (d * (d - 1.0))
        return _rec(base_edges, n, rest_b, d - 1, a, rng, w, wsign, colors, L, steps, pos + 1)
    # even: sample a half-factor, then an a-factor of it
    if pos < len(steps) and steps[pos][0] == "even":
        step = steps[pos][1]
    else:
        step = _partition_step(base_edges, n, base_ids, L)
    rng_draw, rng_sub = rng.spawn(2)
    half = _draw_half(step, rng_draw)
    w[step["m1_idx"]] += (wsign * 2.0 * a / d) * step["m1_val"]
    return _rec(base_edges, n, half, d // 2, a, rng_sub, w, wsign, colors, L, (), 0)


@dataclass
class FactorSample:
    """An a-factor H of a d-regular bipartite base graph together with the
    auxiliary matrix M of its distribution, kept as one weight per base edge."""

    base: Graph
    H: Graph
    a: int
    d: int
    h_edge_ids: np.ndarray
    m_weights: np.ndarray

    @property
    def M(self) -> np.ndarray:
        n = self.base.n
        mat = np.zeros((n, n), dtype=np.float64)
        e = self.base.edges
        nz = self.m_weights != 0
        mat[e[nz, 0], e[nz, 1]] = self.m_weights[nz]
        mat[e[nz, 1], e[nz, 0]] = self.m_weights[nz]
        return mat

    def m_norm(self) -> float:
        return spectral_norm_edges(self.base.n, np.asarray(self.base.edges), self.m_weights)

    def norm_bound(self) -> float:
        return c_bound(self.d) if self.d >= 1 else 0.0

    def is_regular(self) -> bool:
        deg = np.bincount(self.base.edges[self.h_edge_ids].ravel(), minlength=self.base.n)
        return bool((deg == self.a).all())


def _validated_degree(g: Graph) -> int:
    d = regularity(g)
    if d is None:
        raise ValueError("graph is not regular")
    if g.bipartition() is None:
        raise ValueError("graph is not bipartite")
    return d


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _make_sample(g: Graph, a: int, d: int, ids: np.ndarray, w: np.ndarray) -> FactorSample:
    h = Graph(g.n, g.edges[ids], g.parts)
    return FactorSample(base=g, H=h, a=a, d=d, h_edge_ids=ids, m_weights=w)


def sample_half_factor(g: Graph, rng) -> FactorSample:
    """One draw from the half-factor distribution of an even-degree regular
    bipartite graph: deterministic alternating picks on the short-cycle-free
    residual, one uniform bit per short cycle, M = A_residual/2 - A_picked."""
    d = _validated_degree(g)
    if d % 2:
        raise ValueError("degree must be even")
    rng = _as_generator(rng)
    w = np.zeros(g.m, dtype=np.float64)
    if d == 0:
        return _make_sample(g, 0, 0, _EMPTY_IDS, w)
    plan = _ensure_plan(g, d)
    step = plan["steps"][0][1]
    half = _draw_half(step, rng)
    w[step["m1_idx"]] = step["m1_val"]
    return _make_sample(g, d // 2, d, half, w)


def sample_a_factor(g: Graph, a: int, rng) -> FactorSample:
    """One draw from the recursive a-factor distribution of a d-regular
    bipartite graph.  The recursion follows the degree chain (complement when
    a > d/2, half-factor when d is even, matching removal when d is odd) and
    accumulates the auxiliary matrix so that ||M|| <= c_d <= 6 sqrt(d)."""
    d = _validated_degree(g)
    if not 0 <= a <= d:
        raise ValueError(f"target degree {a} outside 0..{d}")
    rng = _as_generator(rng)
    w = np.zeros(g.m, dtype=np.float64)
    if d == 0 or a in (0, d):
        ids = _EMPTY_IDS if a == 0 else np.arange(g.m, dtype=np.int64)
        return _make_sample(g, a, d, ids, w)
    plan = _ensure_plan(g, d)
    base_edges = np.asarray(g.edges)
    base_ids = np.arange(g.m, dtype=np.int64)
    ids = _rec(
        base_edges, g.n, base_ids, d, a, rng, w, 1.0, plan["colors"], plan["L"], plan["steps"], 0
    )
    return _make_sample(g, a, d, ids, w)


# -- norms and audits ---------------------------------------------------------

_DENSE_NORM_LIMIT = 320


def spectral_norm_edges(n: int, edges: np.ndarray, w: np.ndarray) -> float:
    """Spectral norm of the symmetric matrix with weight w_e on edge positions."""
    nz = w != 0
    if not nz.any():
        return 0.0
    if n <= _DENSE_NORM_LIMIT:
        mat = np.zeros((n, n), dtype=np.float64)
        mat[edges[nz, 0], edges[nz, 1]] = w[nz]
        mat[edges[nz, 1], edges[nz, 0]] = w[nz]
        vals = np.linalg.eigvalsh(mat)
        return float(max(-vals[0], vals[-1]))
    import scipy.sparse as sp
    import scipy.sparse.linalg as spl

    e = edges[nz]
    ww = w[nz]
    mat = sp.coo_matrix(
        (np.concatenate([ww, ww]), (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]]))),
        shape=(n, n),
    ).tocsr()
    v0 = np.random.default_rng(0x5EED).standard_normal(n)
    try:
        val = spl.eigsh(mat, k=1, which="LM", v0=v0, return_eigenvectors=False, maxiter=50 * n)
        return float(abs(val[0]))
    except spl.ArpackNoConvergence:  # pragma: no cover - rare; dense rescue
        vals = np.linalg.eigvalsh(mat.toarray())
        return float(max(-vals[0], vals[-1]))


@dataclass
class FactorSearch:
    """Outcome of concentrated-factor selection: the accepted (or best) sample,
    its compressed quadratic-form bound, and whether the threshold was met."""

    sample: FactorSample
    bound: float
    threshold: float
    trials: int
    met: bool


def select_concentrated_factor(
    g: Graph,
    a: int,
    basis: np.ndarray,
    max_trials: int,
    rng,
    check_orthonormal: bool = True,
) -> FactorSearch:
    """Retry sampling until sup over unit v in span(basis) of
    |v^T (A_H - (a/d) A_G) v| is at most 7 sqrt(d), evaluated exactly as the
    spectral norm of the compressed matrix B^T (A_H - (a/d) A_G) B.

    On budget exhaustion the best sample found is returned with met=False.
    """
    d = _validated_degree(g)
    rng = _as_generator(rng)
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim == 1:
        basis = basis.reshape(-1, 1)
    if basis.size and basis.shape[0] != g.n:
        raise ValueError("basis vectors must have one entry per vertex")
    r = basis.shape[1] if basis.size else 0
    if r and check_orthonormal:
        gram = basis.T @ basis
        if float(np.abs(gram - np.eye(r)).max()) > 1e-8:
            raise ValueError("basis vectors must be pairwise orthonormal")
    threshold = 7.0 * math.sqrt(d) if d else 0.0
    if max_trials < 1:
        raise ValueError("need at least one trial")
    e = np.asarray(g.edges)
    if r:
        b0 = basis[e[:, 0]]
        b1 = basis[e[:, 1]]
        cg = b0.T @ b1 + b1.T @ b0
    best = None
    for trial in range(max_trials):
        child = rng.spawn(1)[0]
        sample = sample_a_factor(g, a, child)
        if r == 0:
            return FactorSearch(sample=sample, bound=0.0, threshold=threshold, trials=trial + 1, met=True)
        sel = sample.h_edge_ids
        ch = b0[sel].T @ b1[sel] + b1[sel].T @ b0[sel]
        comp = ch - (a / d) * cg
        vals = np.linalg.eigvalsh(comp)
        bound = float(max(-vals[0], vals[-1]))
        if bound <= threshold + 1e-9:
            return FactorSearch(sample=sample, bound=bound, threshold=threshold, trials=trial + 1, met=True)
        if best is None or bound < best[0]:
            best = (bound, sample)
    return FactorSearch(sample=best[1], bound=best[0], threshold=threshold, trials=max_trials, met=False)


@dataclass
class ConcentrationReport:
    """Empirical tail frequencies of |u^T (A_H - (a/d) A_G + M) v| against the
    bounded-differences tail bound 2 log2(d) exp(-t^2/2)."""

    d: int
    a: int
    samples: int
    scale: float
    t_values: tuple
    frequencies: tuple
    bounds: tuple
    max_stat: float

    @property
    def within_bounds(self) -> bool:
        return all(f <= b for f, b in zip(self.frequencies, self.bounds))


def concentration_stats(g: Graph, a: int, u, v, samples: int, t_values, rng) -> ConcentrationReport:
    """Monte Carlo audit of the factor distribution's concentration."""
    d = _validated_degree(g)
    if d < 1:
        raise ValueError("degree must be at least 1")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = _as_generator(rng)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    n = g.n
    scale = (
        (2.0 + math.sqrt(2.0))
        * math.sqrt(d * n * math.ceil(math.log2(n)))
        * float(np.abs(u).max())
        * float(np.abs(v).max())
    )
    e = np.asarray(g.edges)
    cross = u[e[:, 0]] * v[e[:, 1]] + u[e[:, 1]] * v[e[:, 0]]
    cross_total = float(cross.sum())
    t_values = tuple(float(t) for t in t_values)
    stats = np.empty(samples, dtype=np.float64)
    for i in range(samples):
        child = rng.spawn(1)[0]
        s = sample_a_factor(g, a, child)
        stats[i] = float(cross[s.h_edge_ids].sum()) - (a / d) * cross_total + float(s.m_weights @ cross)
    stats = np.abs(stats)
    freqs = tuple(float((stats > t * scale).mean()) for t in t_values)
    bounds = tuple(2.0 * math.log2(d) * math.exp(-t * t / 2.0) for t in t_values)
    return ConcentrationReport(
        d=d,
        a=a,
        samples=samples,
        scale=scale,
        t_values=t_values,
        frequencies=freqs,
        bounds=bounds,
        max_stat=float(stats.max()) if samples else 0.0,
    )
