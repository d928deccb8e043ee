"""Matrix triples (base matrix, sign matrix, mixing ratio), the integer and
surd families, their seed graphs, and the iterated multiplicity-growing run.

A triple is feasible when the top eigenvalue of the 2x2 comparison form stays
at or below the sign matrix's top eigenvalue; feasible triples admit
multiplicity-incrementing lifts from any suitable seed.  Paper mode keeps the
guaranteed-growth schedule (2^t > n^8 lifts per stage, so it aborts at the
resource cap almost immediately); relaxed mode runs caller-chosen schedules
and converts every guarantee into a checked certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphcore import Graph, check_graph_lift, is_connected, regularity
from .lifts import IncrementCertificate, ResourceCapExceeded, increment_multiplicity
from .spectral import SpectralSummary, SpectralTarget, eigen_sym, max_quadform_2x2

__all__ = [
    "MatrixTriple",
    "TripleReport",
    "PipelineStage",
    "PipelineResult",
    "validate_triple",
    "integer_triple",
    "surd_triple",
    "seed_graph",
    "run_pipeline",
]


def _check_irreducible(mat: np.ndarray) -> bool:
    k = mat.shape[0]
    seen = np.zeros(k, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        x = stack.pop()
        for y in range(k):
            if mat[x, y] > 0 and not seen[y]:
                seen[y] = True
                stack.append(y)
    return bool(seen.all())


class MatrixTriple:
    """A base matrix M, a sign matrix M' (entrywise |M'| <= M, same parity),
    and a ratio beta in (0, 1/2), with the derived quantities D = (M - M')/2,
    gamma = lambda_1(|D - beta M|), and sigma = sum_ij sqrt(M_ij)."""

    def __init__(self, M, Mp, beta: float, family: str | None = None, params: tuple = ()):
        M = np.array(M, dtype=np.int64)
        Mp = np.array(Mp, dtype=np.int64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("base matrix must be square")
        if not np.array_equal(M, M.T):
            raise ValueError("base matrix must be symmetric")
        if np.diagonal(M).any():
            raise ValueError("base matrix must have zero diagonal")
        if (M < 0).any():
            raise ValueError("base matrix entries must be nonnegative")
        if not _check_irreducible(M):
            raise ValueError("base matrix must be irreducible")
        if Mp.shape != M.shape or not np.array_equal(Mp, Mp.T):
            raise ValueError("sign matrix must be symmetric of the same dimension")
        if ((Mp - M) % 2).any():
            raise ValueError("sign matrix entries must match the base matrix's parity")
        if (np.abs(Mp) > M).any():
            raise ValueError("sign matrix entries must not exceed the base matrix's")
        if not 0.0 < beta < 0.5:
            raise ValueError(f"beta must lie in (0, 1/2), got {beta}")
        M.setflags(write=False)
        Mp.setflags(write=False)
        self.M = M
        self.Mp = Mp
        self.beta = float(beta)
        self.family = family
        self.params = tuple(params)

    @property
    def k(self) -> int:
        return self.M.shape[0]

    @property
    def D(self) -> np.ndarray:
        return (self.M - self.Mp) // 2

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.M.astype(np.float64)).sum())

    @property
    def gamma(self) -> float:
        dev = np.abs(self.D - self.beta * self.M)
        return float(np.linalg.eigvalsh(dev)[-1])

    @property
    def lambda1_M(self) -> float:
        return float(np.linalg.eigvalsh(self.M.astype(np.float64))[-1])

    @property
    def lambda1_Mp(self) -> float:
        return float(np.linalg.eigvalsh(self.Mp.astype(np.float64))[-1])

    def _bipartite_degrees(self) -> tuple | None:
        """(d, target) when the triple has the two-part complete shape."""
        if self.k != 2:
            return None
        d = int(self.M[0, 1])
        c = int(self.Mp[0, 1])
        if d <= 0 or c < 0:
            return None
        return d, c

    @property
    def target(self) -> SpectralTarget | None:
        if self.family == "surd":
            return SpectralTarget.surd(self.params[1])
        bip = self._bipartite_degrees()
        if bip is not None:
            return SpectralTarget.integer(bip[1])
        return None

    def __repr__(self):
        tag = f", family={self.family}{self.params}" if self.family else ""
        return f"MatrixTriple(k={self.k}, beta={self.beta:.6g}{tag})"


@dataclass(frozen=True)
class TripleReport:
    """Feasibility verdict: top eigenvalue of the comparison form vs the sign
    matrix's top eigenvalue."""

    member: bool
    lhs: float
    rhs: float
    margin: float
    gamma: float
    sigma: float
    lambda1_D: float
    beta: float


def validate_triple(M, Mp=None, beta: float | None = None) -> TripleReport:
    """Membership test for the feasibility set of triples.

    Structural violations (sign-matrix conditions, irreducibility, beta out
    of range) raise; structurally valid triples get a verdict with margin
    rhs - lhs, member iff margin >= -1e-9.
    """
    triple = M if isinstance(M, MatrixTriple) else MatrixTriple(M, Mp, beta)
    gamma = triple.gamma
    sigma = triple.sigma
    lam_d = float(np.linalg.eigvalsh(triple.D.astype(np.float64))[-1])
    rhs = triple.lambda1_Mp
    r = (1.0 - 2.0 * triple.beta) * rhs + 2.0 * gamma + 7.0 * sigma
    s = 2.0 * lam_d
    t = 2.0 * lam_d + sigma
    lhs = max_quadform_2x2(r, s, t)
    margin = rhs - lhs
    return TripleReport(
        member=margin >= -1e-9,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        gamma=gamma,
        sigma=sigma,
        lambda1_D=lam_d,
        beta=triple.beta,
    )


def integer_triple(d: int) -> MatrixTriple:
    """The bipartite family: degree d, removal degree a = ceil(12 sqrt(d)),
    target eigenvalue d - 2a."""
    if d < 1:
        raise ValueError("degree must be positive")
    a = math.isqrt(144 * d)
    if a * a < 144 * d:
        a += 1
    if d - 2 * a <= 0:
        raise ValueError(f"degenerate: d - 2a = {d - 2 * a} <= 0 at d = {d} (a = {a})")
    m = [[0, d], [d, 0]]
    mp = [[0, d - 2 * a], [d - 2 * a, 0]]
    return MatrixTriple(m, mp, a / d, family="integer", params=(d, a))


def relaxed_integer_triple(d: int, a: int) -> MatrixTriple:
    """The bipartite family at an explicit removal degree a, for exploration
    at small scales where ceil(12 sqrt(d)) would be degenerate.  Feasibility
    is not implied; run_pipeline requires the override flag for these."""
    if not 0 < a <= d // 2 or d - 2 * a <= 0:
        raise ValueError("need 0 < a and d - 2a > 0")
    m = [[0, d], [d, 0]]
    mp = [[0, d - 2 * a], [d - 2 * a, 0]]
    return MatrixTriple(m, mp, a / d, family="integer", params=(d, a))


def surd_triple(t: int, u: int, strict: bool = False) -> MatrixTriple:
    """The 4-part family with target eigenvalue 2 sqrt(u^2 + 1) - 1.

    Requires t > u >= 1 of the same parity; with ``strict`` the parameters
    must also satisfy (5/6) t <= u <= t - 56 sqrt(t) - 62, the range under
    which every feasibility guarantee is proved.
    """
    if not (t > u >= 1):
        raise ValueError("need t > u >= 1")
    if (t - u) % 2:
        raise ValueError(f"t = {t} and u = {u} must have the same parity")
    if strict:
        low = 5.0 * t / 6.0
        high = t - 56.0 * math.sqrt(t) - 62.0
        if not (low <= u <= high):
            raise ValueError(f"strict range violated: need {low:.6g} <= u <= {high:.6g}")
    m = [[0, t, t, 3], [t, 0, 3, t], [t, 3, 0, t], [3, t, t, 0]]
    mp = [[0, u, u, 1], [u, 0, -3, u], [u, -3, 0, u], [1, u, u, 0]]
    return MatrixTriple(m, mp, (t - u) / (2.0 * t), family="surd", params=(t, u))


_SEED_EDGE_CAP = 5_000_000


def seed_graph(triple: MatrixTriple, edge_cap: int = _SEED_EDGE_CAP) -> Graph:
    """The starting graph lift: the complete bipartite graph for two-part
    triples; for the surd family, complete bipartite blocks on the four
    t-regular pairs and canonical circulants (i -> i, i+1, i+2 mod t) on the
    two 3-regular pairs."""
    bip = triple._bipartite_degrees()
    if bip is not None:
        d = bip[0]
        if d * d > edge_cap:
            raise ResourceCapExceeded(
                f"complete bipartite seed needs {d * d} edges, over the cap of {edge_cap}",
                required=d * d,
                cap=edge_cap,
            )
        left = np.arange(d)
        edges = np.column_stack([np.repeat(left, d), d + np.tile(left, d)])
        parts = np.concatenate([np.ones(d, np.int64), np.full(d, 2, np.int64)])
        return Graph(2 * d, edges, parts)
    if triple.family == "surd":
        t = triple.params[0]
        if t < 3:
            raise ValueError("surd seed needs t >= 3")
        if 4 * t * t + 6 * t > edge_cap:
            raise ResourceCapExceeded("surd seed too large", required=4 * t * t + 6 * t, cap=edge_cap)
        base = np.arange(t)
        edges = []
        for p, q in ((1, 2), (1, 3), (2, 4), (3, 4)):
            off_p = (p - 1) * t
            off_q = (q - 1) * t
            edges.append(np.column_stack([off_p + np.repeat(base, t), off_q + np.tile(base, t)]))
        for p, q in ((1, 4), (2, 3)):
            off_p = (p - 1) * t
            off_q = (q - 1) * t
            for shift in (0, 1, 2):
                edges.append(np.column_stack([off_p + base, off_q + (base + shift) % t]))
        parts = np.repeat(np.arange(1, 5, dtype=np.int64), t)
        return Graph(4 * t, np.concatenate(edges), parts)
    raise ValueError("unsupported triple shape: no seed construction for generic triples")


def _analytic_integer_seed_summary(d: int) -> SpectralSummary:
    vals = np.concatenate([[float(d)], np.zeros(2 * d - 2), [float(-d)]])
    vals.setflags(write=False)
    return SpectralSummary(
        eigenvalues=vals, groups=((float(d), 1), (0.0, 2 * d - 2), (float(-d), 1)), tol=1e-6 * d
    )


@dataclass
class PipelineStage:
    index: int
    graph: Graph | None
    summary: SpectralSummary | None
    certificate: IncrementCertificate | None
    info: dict = field(default_factory=dict)


@dataclass
class PipelineResult:
    stages: list
    ok: bool
    reason: str
    triple_report: TripleReport

    @property
    def final_graph(self) -> Graph | None:
        for stage in reversed(self.stages):
            if stage.graph is not None:
                return stage.graph
        return None


def run_pipeline(
    triple: MatrixTriple,
    iterations: int,
    mode: str = "relaxed",
    t_schedule=None,
    rng=None,
    signing_budget: int = 4000,
    factor_trials: int = 400,
    vertex_cap: int = 1_000_000,
    override: bool = False,
    exhaustive: bool = False,
) -> PipelineResult:
    """Run the iterated construction: seed, then multiplicity increments.

    Relaxed mode uses the caller's t schedule (default all zeros) and halts
    with partial results at the first certificate that misses its target;
    paper mode forces t to the guaranteed value per stage and aborts with a
    structured reason once the vertex cap is exceeded.
    """
    if mode not in ("paper", "relaxed"):
        raise ValueError("mode must be 'paper' or 'relaxed'")
    report = validate_triple(triple)
    if not report.member and not (mode == "relaxed" and override):
        raise ValueError(
            f"triple is not feasible (margin {report.margin:.6g}); "
            "use relaxed mode with override to explore it anyway"
        )
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    if t_schedule is None:
        t_schedule = [0] * iterations
    t_schedule = list(t_schedule)
    if mode == "relaxed" and len(t_schedule) < iterations:
        raise ValueError("t_schedule shorter than the iteration count")

    regular_expected = None
    ones = np.ones(triple.k)
    row = triple.M.astype(np.float64) @ ones
    if np.allclose(row, row[0]):
        regular_expected = int(round(row[0]))

    stages = []
    ok = True
    reason = "complete"
    lam1_m = triple.lambda1_M
    lam1_mp = triple.lambda1_Mp
    try:
        g = seed_graph(triple)
    except ResourceCapExceeded as exc:
        bip = triple._bipartite_degrees()
        if bip is None:
            raise
        d = bip[0]
        stages.append(
            PipelineStage(
                index=0,
                graph=None,
                summary=_analytic_integer_seed_summary(d),
                certificate=None,
                info={"n": 2 * d, "materialized": False, "note": str(exc)},
            )
        )
        g = None
    if g is not None:
        summary = eigen_sym(g.adjacency())
        info = {"n": g.n, "materialized": True}
        if not check_graph_lift(g, triple.M):
            raise AssertionError("seed graph is not a lift of the base matrix")
        if abs(summary.top(1) - lam1_m) > 1e-8:
            raise AssertionError("seed top eigenvalue differs from the base matrix's")
        if g.n > 1 and summary.top(2) > lam1_mp + 1e-8:
            raise AssertionError("seed second eigenvalue exceeds the target")
        if regular_expected is not None and regularity(g) != regular_expected:
            raise AssertionError("seed graph is not regular at the expected degree")
        info["connected"] = is_connected(g)
        stages.append(PipelineStage(index=0, graph=g, summary=summary, certificate=None, info=info))

    for i in range(1, iterations + 1):
        if g is None:
            n0 = stages[-1].info["n"]
            t_req = 1
            while (1 << t_req) <= n0**8:
                t_req += 1
            required = n0 * (1 << t_req)
            ok = False
            reason = (
                f"infeasible at desk scale: stage {i} needs {n0} * 2^{t_req} = "
                f"{required} vertices, over the cap of {vertex_cap}"
            )
            stages.append(
                PipelineStage(
                    index=i,
                    graph=None,
                    summary=None,
                    certificate=None,
                    info={"aborted": True, "required_vertices": required, "cap": vertex_cap, "t": t_req},
                )
            )
            break
        t_i = t_schedule[i - 1] if i - 1 < len(t_schedule) else 0
        try:
            lifted, cert = increment_multiplicity(
                g,
                triple,
                t=t_i,
                rng=rng.spawn(1)[0],
                mode=mode,
                signing_budget=signing_budget,
                factor_trials=factor_trials,
                exhaustive=exhaustive,
                vertex_cap=vertex_cap,
            )
        except ResourceCapExceeded as exc:
            ok = False
            reason = f"infeasible at desk scale: {exc}"
            stages.append(
                PipelineStage(
                    index=i,
                    graph=None,
                    summary=None,
                    certificate=None,
                    info={"aborted": True, "required_vertices": exc.required, "cap": exc.cap},
                )
            )
            break
        summary = cert.after
        info = {"n": lifted.n, "t": cert.t, "materialized": True}
        if mode == "paper":
            info["growth_ok"] = lifted.n <= 4 * g.n**9
        if abs(summary.top(1) - lam1_m) > 1e-8:
            raise AssertionError("stage top eigenvalue differs from the base matrix's")
        if regular_expected is not None:
            if regularity(lifted) != regular_expected:
                raise AssertionError("stage graph is not regular at the expected degree")
        stages.append(PipelineStage(index=i, graph=lifted, summary=summary, certificate=cert, info=info))
        if not cert.met:
            ok = False
            reason = (
                f"stage {i} signing reached lambda1 {cert.signing_lambda1:.9g} "
                f"vs target {cert.target:.9g}"
            )
            break
        g = lifted
    return PipelineResult(stages=stages, ok=ok, reason=reason, triple_report=report)
