"""Text serialization: key-value reports with stable ordering, factor-sample
files, Gram matrices, line systems, and spectral reports.

Report fields use 12 significant digits; matrix and vector payloads use full
17-digit precision so they round-trip floats exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .equiangular import GramEnsemble, LineSystem
from .factors import FactorSample
from .graphcore import Graph
from .spectral import SpectralSummary

__all__ = [
    "fmt",
    "write_report",
    "report_text",
    "read_report",
    "factor_sample_to_text",
    "write_factor_sample",
    "read_factor_sample",
    "gram_to_text",
    "write_gram",
    "read_gram",
    "lines_to_text",
    "write_lines",
    "read_lines",
    "spectral_report_text",
    "read_spectral_report",
]


def fmt(value) -> str:
    """Report formatting: 12 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def report_text(items) -> str:
    return "".join(f"{key}: {fmt(value)}\n" for key, value in items)


def write_report(path, items) -> None:
    Path(path).write_text(report_text(items))


def read_report(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        out[key.strip()] = value.strip()
    return out


def _row_text(row) -> str:
    return " ".join(f"{x:.17g}" for x in row)


def factor_sample_to_text(sample: FactorSample, base_ref: str = "") -> str:
    lines = [
        "factor-sample",
        f"base: {base_ref}",
        f"n: {sample.base.n}",
        f"a: {sample.a}",
        f"d: {sample.d}",
        f"norm_m: {fmt(sample.m_norm())}",
        f"c_d: {fmt(sample.norm_bound())}",
        f"h_edges: {len(sample.h_edge_ids)}",
    ]
    for u, v in sample.base.edges[sample.h_edge_ids]:
        lines.append(f"{u} {v}")
    lines.append(f"m_matrix: {sample.base.n}")
    for row in sample.M:
        lines.append(_row_text(row))
    return "\n".join(lines) + "\n"


def write_factor_sample(sample: FactorSample, path, base_ref: str = "") -> None:
    Path(path).write_text(factor_sample_to_text(sample, base_ref))


def read_factor_sample(path, base: Graph):
    """Parse a factor-sample file against its base graph; returns
    (FactorSample, declared norm, declared bound, base reference string)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "factor-sample":
        raise ValueError("not a factor-sample file")
    fields = {}
    pos = 1
    while ":" in lines[pos]:
        key, _, value = lines[pos].partition(":")
        fields[key.strip()] = value.strip()
        pos += 1
        if key.strip() == "h_edges":
            break
    count = int(fields["h_edges"])
    ids = base.edge_ids()
    h_ids = []
    for ln in lines[pos : pos + count]:
        u, v = (int(t) for t in ln.split())
        h_ids.append(ids[(min(u, v), max(u, v))])
    pos += count
    n = int(lines[pos].partition(":")[2])
    pos += 1
    mat = np.array([[float(x) for x in ln.split()] for ln in lines[pos : pos + n]])
    w = np.zeros(base.m)
    e = base.edges
    w[:] = mat[e[:, 0], e[:, 1]]
    h_arr = np.array(sorted(h_ids), dtype=np.int64)
    sample = FactorSample(
        base=base,
        H=Graph(base.n, base.edges[h_arr], base.parts),
        a=int(fields["a"]),
        d=int(fields["d"]),
        h_edge_ids=h_arr,
        m_weights=w,
    )
    return sample, float(fields["norm_m"]), float(fields["c_d"]), fields["base"]


def gram_to_text(ens: GramEnsemble) -> str:
    lines = [
        "gram",
        f"n: {ens.size}",
        f"alpha: {ens.alpha:.17g}",
        f"lambda: {ens.lam:.17g}",
        f"k: {ens.mult_k}",
        f"rank: {ens.rank}",
        f"degree: {ens.degree}",
    ]
    for row in ens.gram:
        lines.append(_row_text(row))
    return "\n".join(lines) + "\n"


def write_gram(ens: GramEnsemble, path) -> None:
    Path(path).write_text(gram_to_text(ens))


def read_gram(path) -> GramEnsemble:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "gram":
        raise ValueError("not a gram file")
    fields = {}
    pos = 1
    for _ in range(6):
        key, _, value = lines[pos].partition(":")
        fields[key.strip()] = value.strip()
        pos += 1
    n = int(fields["n"])
    mat = np.array([[float(x) for x in ln.split()] for ln in lines[pos : pos + n]])
    return GramEnsemble(
        gram=mat,
        alpha=float(fields["alpha"]),
        lam=float(fields["lambda"]),
        rank=int(fields["rank"]),
        base_n=n,
        mult_k=int(fields["k"]),
        degree=int(fields["degree"]),
    )


def lines_to_text(ls: LineSystem) -> str:
    lines = [
        "lines",
        f"dim: {ls.dim}",
        f"count: {ls.count}",
        f"alpha: {ls.alpha:.17g}",
    ]
    for row in ls.vectors:
        lines.append(_row_text(row))
    return "\n".join(lines) + "\n"


def write_lines(ls: LineSystem, path) -> None:
    Path(path).write_text(lines_to_text(ls))


def read_lines(path) -> LineSystem:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "lines":
        raise ValueError("not a lines file")
    dim = int(lines[1].partition(":")[2])
    count = int(lines[2].partition(":")[2])
    alpha = float(lines[3].partition(":")[2])
    vecs = np.array([[float(x) for x in ln.split()] for ln in lines[4 : 4 + count]])
    vecs = vecs.reshape(count, dim)
    return LineSystem(dim=dim, vectors=vecs, alpha=alpha)


def spectral_report_text(summary: SpectralSummary, certified: dict | None = None) -> str:
    lines = [
        "spectral-report",
        f"dim: {summary.dim}",
        f"tol: {fmt(summary.tol)}",
    ]
    for value, mult in summary.groups:
        flag = "false"
        if certified:
            for cv, ok in certified.items():
                if abs(cv - value) <= max(summary.tol, 1e-8):
                    flag = "true" if ok else "false"
        lines.append(f"group: {fmt(value)} {mult} {flag}")
    return "\n".join(lines) + "\n"


def read_spectral_report(path) -> dict:
    """Parse a spectral report into dim, tol, and (value, mult, certified) rows."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "spectral-report":
        raise ValueError("not a spectral report")
    out = {
        "dim": int(lines[1].partition(":")[2]),
        "tol": float(lines[2].partition(":")[2]),
        "groups": [],
    }
    for ln in lines[3:]:
        if not ln.startswith("group:"):
            continue
        value, mult, flag = ln.partition(":")[2].split()
        out["groups"].append((float(value), int(mult), flag == "true"))
    return out
