"""Equiangular line systems from graphs with a repeated positive second
eigenvalue.

A d-regular graph on n vertices whose second eigenvalue lambda > 0 has
multiplicity k yields n unit vectors in dimension n - k with pairwise
|cosine| alpha = 1/(2 lambda + 1): the Gram matrix (1-alpha) I + alpha J -
2 alpha A is positive semidefinite with kernel dimension k.  Appending rows
and columns of +alpha extends the witness to larger sizes under an explicit
sufficiency inequality, and the perfect-square test decides when the surd
eigenvalue can never be a graph's top eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphcore import Graph, regularity
from .spectral import eigen_sym

__all__ = [
    "GramEnsemble",
    "LineSystem",
    "LineVerification",
    "SurdObstruction",
    "gram_from_graph",
    "extend_gram",
    "extract_lines",
    "surd_obstruction",
    "verify_line_system",
]

RANK_REL_TOL = 1e-8
PSD_TOL = 1e-9


@dataclass
class GramEnsemble:
    """A unit-diagonal matrix with off-diagonal entries +-alpha, PSD with a
    kernel of dimension at least mult_k."""

    gram: np.ndarray
    alpha: float
    lam: float
    rank: int
    base_n: int
    mult_k: int
    degree: int
    extended: bool = False

    @property
    def size(self) -> int:
        return self.gram.shape[0]


@dataclass
class LineSystem:
    """Unit vectors whose pairwise inner products are +-alpha."""

    dim: int
    vectors: np.ndarray
    alpha: float

    @property
    def count(self) -> int:
        return self.vectors.shape[0]


def _numeric_rank(eigenvalues: np.ndarray) -> int:
    if eigenvalues.size == 0:
        return 0
    top = float(np.abs(eigenvalues).max())
    if top == 0.0:
        return 0
    return int((eigenvalues > RANK_REL_TOL * top).sum())


def gram_from_graph(g: Graph, lam: float) -> GramEnsemble:
    """Build the Gram witness (1-alpha) I + alpha J - 2 alpha A for a
    d-regular graph whose second eigenvalue is lam > 0, alpha = 1/(2 lam + 1).

    The eigenvalue transport is verified: the all-ones direction maps to
    1 - alpha + alpha n - 2 alpha d and every other adjacency eigenvalue mu
    maps to (1 - alpha) - 2 alpha mu, so the kernel dimension equals the
    multiplicity k of lam among the non-top directions and the rank is n - k.
    """
    d = regularity(g)
    if d is None:
        raise ValueError("graph is not regular")
    n = g.n
    if n < 2 * d:
        raise ValueError(f"need n >= 2d, got n = {n}, d = {d}")
    if lam <= 0:
        raise ValueError("second eigenvalue must be positive")
    summary = eigen_sym(g.adjacency())
    tol = max(summary.tol, 1e-8)
    if abs(summary.top(2) - lam) > tol:
        raise ValueError(
            f"{lam:.6g} is not the second eigenvalue (found {summary.top(2):.6g})"
        )
    k = summary.multiplicity(lam, tol=tol)
    if abs(summary.top(1) - lam) <= tol:
        k -= 1  # one copy of lam is the top (disconnected regular case)
    alpha = 1.0 / (2.0 * lam + 1.0)
    a = g.adjacency()
    gram = (1.0 - alpha) * np.eye(n) + alpha * np.ones((n, n)) - 2.0 * alpha * a
    gvals = np.linalg.eigvalsh(gram)
    if gvals[0] < -PSD_TOL:
        raise ValueError(f"Gram matrix has negative eigenvalue {gvals[0]:.3g}")
    expected = np.sort(
        np.concatenate(
            [
                [1.0 - alpha + alpha * n - 2.0 * alpha * d],
                (1.0 - alpha) - 2.0 * alpha * summary.eigenvalues[1:],
            ]
        )
    )
    if float(np.abs(expected - gvals).max()) > 1e-8:
        raise AssertionError("eigenvalue transport check failed")
    rank = _numeric_rank(gvals)
    if rank != n - k:
        raise AssertionError(f"rank {rank} differs from n - k = {n - k}")
    return GramEnsemble(gram=gram, alpha=alpha, lam=float(lam), rank=rank, base_n=n, mult_k=k, degree=d)


def extend_gram(base: GramEnsemble, ell: int) -> GramEnsemble:
    """Append ell - n rows and columns with all off-diagonal entries +alpha.

    Needs lam >= 2 sqrt(d-1) and lam >= 2d/3 and n <= ell < 2n; positive
    semidefiniteness follows from (1 - 2(d-lam)/n)(1 + 2 lam/n) >= 1, which
    is checked, and the kernel survives, so the rank stays at most ell - k.
    """
    if base.extended:
        raise ValueError("ensemble was already extended")
    n = base.base_n
    d = base.degree
    lam = base.lam
    if lam < 2.0 * math.sqrt(max(d - 1.0, 0.0)) - 1e-9:
        raise ValueError(f"need lambda >= 2 sqrt(d-1): {lam:.6g} < {2 * math.sqrt(d - 1):.6g}")
    if lam < 2.0 * d / 3.0 - 1e-9:
        raise ValueError(f"need lambda >= 2d/3: {lam:.6g} < {2 * d / 3:.6g}")
    if not n <= ell < 2 * n:
        raise ValueError(f"extension size must lie in [{n}, {2 * n}), got {ell}")
    if ell == n:
        return base
    margin = (1.0 - 2.0 * (d - lam) / n) * (1.0 + 2.0 * lam / n)
    if margin < 1.0 - 1e-12:
        raise ValueError(f"sufficiency condition fails: {margin:.9g} < 1")
    alpha = base.alpha
    t = ell - n
    gram = np.full((ell, ell), alpha)
    gram[:n, :n] = base.gram
    gram[np.arange(n, ell), np.arange(n, ell)] = 1.0
    gvals = np.linalg.eigvalsh(gram)
    if gvals[0] < -PSD_TOL:
        raise ValueError(f"extended Gram matrix has negative eigenvalue {gvals[0]:.3g}")
    rank = _numeric_rank(gvals)
    if rank > ell - base.mult_k:
        raise AssertionError(f"extended rank {rank} exceeds ell - k = {ell - base.mult_k}")
    return GramEnsemble(
        gram=gram,
        alpha=alpha,
        lam=lam,
        rank=rank,
        base_n=ell,
        mult_k=base.mult_k,
        degree=d,
        extended=True,
    )


def extract_lines(ens: GramEnsemble) -> LineSystem:
    """Factor the Gram matrix as W^T W with rank(gram) rows; the columns of W
    are the unit vectors of the line system."""
    vals, vecs = np.linalg.eigh(ens.gram)
    if vals[0] < -PSD_TOL:
        raise ValueError(f"Gram matrix has negative eigenvalue {vals[0]:.3g}")
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    r = ens.rank
    w = (vecs[:, :r] * np.sqrt(np.maximum(vals[:r], 0.0))).T
    recon = w.T @ w
    err = float(np.abs(recon - ens.gram).max())
    if err > 1e-9:
        raise ValueError(f"factorization residual {err:.3g} exceeds 1e-9")
    return LineSystem(dim=r, vectors=w.T.copy(), alpha=ens.alpha)


@dataclass(frozen=True)
class SurdObstruction:
    """Verdict on whether 2 sqrt(t) - 1 can be a graph's top eigenvalue."""

    t: int
    verdict: str
    square_root: int | None

    @property
    def k_infinite(self) -> bool:
        return self.verdict == "k-infinite"


def surd_obstruction(t: int) -> SurdObstruction:
    """For non-square t the value 2 sqrt(t) - 1 has the conjugate
    -2 sqrt(t) - 1 of larger magnitude, so no graph has it as a top
    eigenvalue and the spectral radius order is infinite; perfect squares are
    inconclusive."""
    if t < 1:
        raise ValueError("t must be a positive integer")
    r = math.isqrt(t)
    if r * r == t:
        return SurdObstruction(t=t, verdict="inconclusive", square_root=r)
    return SurdObstruction(t=t, verdict="k-infinite", square_root=None)


@dataclass(frozen=True)
class LineVerification:
    passed: bool
    count: int
    dim: int
    max_norm_dev: float
    max_cos_dev: float
    worst_pair: tuple

    @property
    def excess(self) -> int:
        """Lines beyond the ambient dimension (the lower-bound witness gain)."""
        return self.count - self.dim


NORM_TOL = 1e-10
COS_TOL = 1e-9


def verify_line_system(ls: LineSystem) -> LineVerification:
    """Check unit norms and the common |cosine|, and report the witness count
    against the ambient dimension.  An empty system passes vacuously."""
    v = np.asarray(ls.vectors, dtype=np.float64)
    if v.size == 0:
        return LineVerification(True, 0, ls.dim, 0.0, 0.0, (-1, -1))
    norms = np.linalg.norm(v, axis=1)
    norm_dev = float(np.abs(norms - 1.0).max())
    inner = v @ v.T
    dev = np.abs(np.abs(inner) - ls.alpha)
    np.fill_diagonal(dev, 0.0)
    cos_dev = float(dev.max())
    worst = np.unravel_index(int(dev.argmax()), dev.shape) if ls.count > 1 else (-1, -1)
    passed = norm_dev <= NORM_TOL and cos_dev <= COS_TOL
    return LineVerification(
        passed=passed,
        count=ls.count,
        dim=ls.dim,
        max_norm_dev=norm_dev,
        max_cos_dev=cos_dev,
        worst_pair=(int(worst[0]), int(worst[1])),
    )
