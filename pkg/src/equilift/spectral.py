"""Symmetric eigenanalysis with tolerance clustering, plus exact multiplicity
certification for integer matrices via integer minimal-polynomial kernels.

Numeric eigenvalues come from LAPACK; exact certificates come from
fraction-free elimination over arbitrary-precision integers, so acceptance
checks never hinge on floating-point rank decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "SpectralSummary",
    "SpectralTarget",
    "CertificationUnavailable",
    "eigen_sym",
    "certify_multiplicity",
    "max_quadform_2x2",
    "integer_nullity",
]

SYMMETRY_TOL = 1e-12


class CertificationUnavailable(RuntimeError):
    """Raised when the exact certificate cannot be issued under the guard."""


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues of a real symmetric matrix, descending, clustered at tol."""

    eigenvalues: np.ndarray
    groups: tuple
    tol: float
    vectors: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def top(self, i: int = 1) -> float:
        """The i-th largest eigenvalue (1-based, counted with multiplicity)."""
        return float(self.eigenvalues[i - 1])

    def multiplicity(self, value: float, tol: float | None = None) -> int:
        t = self.tol if tol is None else tol
        return int(np.sum(np.abs(self.eigenvalues - value) <= t))

    def group_of(self, value: float):
        """The (value, multiplicity) group nearest to value, or None."""
        best = None
        for gv, mult in self.groups:
            if best is None or abs(gv - value) < abs(best[0] - value):
                best = (gv, mult)
        return best


@dataclass(frozen=True)
class SpectralTarget:
    """An eigenvalue target: an integer ell, or 2*sqrt(u^2+1) - 1 for integer u.

    The minimal polynomial (coefficients in increasing degree) is x - ell for
    integer targets and x^2 + 2x - (4u^2 + 3) for surd targets; the surd's
    algebraic conjugate is -2*sqrt(u^2+1) - 1.
    """

    kind: str
    param: int

    def __post_init__(self):
        if self.kind not in ("integer", "surd"):
            raise ValueError("kind must be 'integer' or 'surd'")
        if self.kind == "surd" and self.param < 1:
            raise ValueError("surd parameter must be a positive integer")

    @classmethod
    def integer(cls, ell: int) -> "SpectralTarget":
        return cls("integer", int(ell))

    @classmethod
    def surd(cls, u: int) -> "SpectralTarget":
        return cls("surd", int(u))

    @property
    def minimal_polynomial(self) -> tuple:
        if self.kind == "integer":
            return (-self.param, 1)
        return (-(4 * self.param * self.param + 3), 2, 1)

    def value(self) -> float:
        if self.kind == "integer":
            return float(self.param)
        return 2.0 * math.sqrt(self.param * self.param + 1.0) - 1.0

    def conjugate(self) -> float | None:
        if self.kind == "integer":
            return None
        return -2.0 * math.sqrt(self.param * self.param + 1.0) - 1.0


def default_cluster_tol(a: np.ndarray) -> float:
    row = float(np.abs(a).sum(axis=1).max()) if a.size else 0.0
    return 1e-6 * max(1.0, row)


def eigen_sym(a, tol: float | None = None, vectors: bool = False) -> SpectralSummary:
    """Eigenvalues of a real symmetric matrix, descending, clustered at tol.

    Raises on inputs that are not symmetric to within 1e-12 entrywise.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.size and float(np.abs(a - a.T).max()) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    if tol is None:
        tol = default_cluster_tol(a)
    if vectors:
        vals, vecs = np.linalg.eigh(a)
        vals = vals[::-1].copy()
        vecs = vecs[:, ::-1].copy()
    else:
        vals = np.linalg.eigvalsh(a)[::-1].copy()
        vecs = None
    groups = []
    i = 0
    while i < len(vals):
        j = i + 1
        while j < len(vals) and vals[j - 1] - vals[j] <= tol:
            j += 1
        groups.append((float(vals[i:j].mean()), j - i))
        i = j
    vals.setflags(write=False)
    return SpectralSummary(eigenvalues=vals, groups=tuple(groups), tol=float(tol), vectors=vecs)


def max_quadform_2x2(r: float, s: float, t: float) -> float:
    """Maximum of R x^2 + 2 S x y + T y^2 over the unit circle."""
    return 0.5 * (r + t + math.hypot(r - t, 2.0 * s))


# -- exact integer linear algebra ------------------------------------------


def _as_int_matrix(a) -> list:
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix must be square")
    if arr.dtype != object and not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if arr.size and float(np.abs(arr - rounded).max()) > 0:
            raise ValueError("matrix entries must be integers")
        arr = rounded
    out = []
    for row in arr:
        ints = []
        for x in row:
            ix = int(x)
            if ix != x:
                raise ValueError("matrix entries must be integers")
            ints.append(ix)
        out.append(ints)
    return out


def integer_rank(a) -> int:
    """Exact rank of an integer matrix by fraction-free (Bareiss) elimination."""
    rows = _as_int_matrix(a)
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    prev = 1
    for col in range(n_cols):
        piv = None
        for r in range(rank, n_rows):
            if rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][col]
        for r in range(rank + 1, n_rows):
            fr = rows[r][col]
            for c in range(col + 1, n_cols):
                rows[r][c] = (rows[r][c] * pv - rows[rank][c] * fr) // prev
            rows[r][col] = 0
        prev = pv
        rank += 1
        if rank == n_rows:
            break
    return rank


def integer_nullity(a) -> int:
    """Exact nullity of a square integer matrix."""
    arr = np.asarray(a)
    return arr.shape[0] - integer_rank(arr)


def _rational_kernel_basis(a) -> list:
    """Kernel basis of an integer matrix over Q (list of Fraction columns)."""
    rows = [[Fraction(x) for x in row] for row in _as_int_matrix(a)]
    n = len(rows)
    piv_cols = []
    rank = 0
    for col in range(n):
        piv = None
        for r in range(rank, n):
            if rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][col]
        rows[rank] = [x / pv for x in rows[rank]]
        for r in range(n):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        piv_cols.append(col)
        rank += 1
    free_cols = [c for c in range(n) if c not in piv_cols]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for r, pc in enumerate(piv_cols):
            vec[pc] = -rows[r][fc]
        basis.append(vec)
    return basis


def _rational_inertia(c: list) -> tuple:
    """(positive, negative, zero) inertia of a symmetric rational matrix."""
    c = [row[:] for row in c]
    idx = list(range(len(c)))
    pos = neg = zero = 0
    while idx:
        piv = None
        for i in idx:
            if c[i][i] != 0:
                piv = i
                break
        if piv is not None:
            d = c[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            idx.remove(piv)
            for i in idx:
                fi = c[i][piv] / d
                for j in idx:
                    c[i][j] -= fi * c[piv][j]
            for i in idx:
                c[i][piv] = Fraction(0)
                c[piv][i] = Fraction(0)
            continue
        hyper = None
        for ii, i in enumerate(idx):
            for j in idx[ii + 1 :]:
                if c[i][j] != 0:
                    hyper = (i, j)
                    break
            if hyper:
                break
        if hyper is None:
            zero += len(idx)
            break
        i, j = hyper
        b = c[i][j]
        pos += 1
        neg += 1
        idx.remove(i)
        idx.remove(j)
        for k in idx:
            fki, fkj = c[k][i], c[k][j]
            for l in idx:
                c[k][l] -= (fki * c[j][l] + fkj * c[i][l]) / b
        for k in idx:
            c[k][i] = c[k][j] = Fraction(0)
            c[i][k] = c[j][k] = Fraction(0)
    return pos, neg, zero


def certify_multiplicity(
    a,
    target: SpectralTarget,
    summary: SpectralSummary | None = None,
    split_conjugate: bool = False,
) -> int:
    """Exact multiplicity of the target eigenvalue in an integer symmetric matrix.

    Computes the rational-arithmetic nullity of p(A) for the target's minimal
    polynomial p.  For surd targets the guard requires that no numeric
    eigenvalue lies within 10x the cluster tolerance of the algebraic
    conjugate -2*sqrt(u^2+1)-1; otherwise the nullity mixes the conjugate's
    multiplicity in and CertificationUnavailable is raised.  Passing
    ``split_conjugate=True`` instead separates the two exactly via the sign
    of A + I on the kernel of p(A) (rational inertia), which stays exact even
    when the conjugate is present.
    """
    mat = np.asarray(a)
    rows = _as_int_matrix(mat)
    n = len(rows)
    ident = np.eye(n, dtype=object)
    intmat = np.array(rows, dtype=object)
    if target.kind == "integer":
        p_of_a = intmat - target.param * ident
        return integer_nullity(p_of_a)
    # surd: p(A) = A^2 + 2A - (4u^2+3) I
    c0 = 4 * target.param * target.param + 3
    p_of_a = intmat @ intmat + 2 * intmat - c0 * ident
    if not split_conjugate:
        if summary is None:
            summary = eigen_sym(mat.astype(np.float64))
        conj = target.conjugate()
        if np.any(np.abs(summary.eigenvalues - conj) <= 10.0 * summary.tol):
            raise CertificationUnavailable(
                "conjugate may be present; exact certification unavailable"
            )
        return integer_nullity(p_of_a)
    basis = _rational_kernel_basis(p_of_a)
    if not basis:
        return 0
    shifted = intmat + ident  # eigenvalues 2*sqrt(u^2+1) vs -2*sqrt(u^2+1) on the kernel
    c = []
    for x in basis:
        sx = [sum(int(shifted[i][j]) * x[j] for j in range(n)) for i in range(n)]
        c.append([sum(y[i] * sx[i] for i in range(n)) for y in basis])
    pos, _neg, _zero = _rational_inertia(c)
    return pos
