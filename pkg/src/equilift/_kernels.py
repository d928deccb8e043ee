"""Hot graph kernels: greedy short-cycle removal, even-degree cycle
decomposition, and bipartite matching.

Each kernel is a plain function over integer numpy arrays and is compiled with
numba when available.  Setting ``EQUILIFT_NO_NUMBA=1`` (or numba being absent)
selects the uncompiled path.  Both paths execute the same function body and the
kernels perform integer work only, so results are identical bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "cycle_partition_kernel",
    "even_cycles_kernel",
    "kuhn_matching_kernel",
]


def _cycle_partition_impl(n, m, indptr, nbr_v, nbr_e, max_len, min_len):
    """Repeatedly remove a shortest cycle of length at most ``max_len``.

    Scan order: BFS from start vertices in ascending order with adjacency in
    canonical edge order; the first cycle achieving the minimum length is the
    one removed.  Removal order is shortest-first, which makes the surviving
    minimum cycle length monotone; each round first looks for a cycle of the
    last removed length (cheap) and only rescans at full depth when the
    minimum has grown.

    Returns ``(flat, off, alive)``: removed cycles as edge ids in walk order
    (each rotated so its smallest edge id comes first), their offsets, and the
    alive mask of the residual edges.
    """
    alive = np.ones(m, np.bool_)
    out_flat = np.empty(m, np.int64)
    out_off = np.empty(m // 3 + 2, np.int64)
    out_off[0] = 0
    n_cyc = 0
    out_pos = 0

    dist = np.zeros(n, np.int64)
    seen = np.zeros(n, np.int64)
    par_v = np.full(n, -1, np.int64)
    par_e = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    onpath = np.zeros(n, np.int64)
    pathpos = np.zeros(n, np.int64)
    xp_v = np.empty(n + 1, np.int64)
    xp_e = np.empty(n + 1, np.int64)
    yp_e = np.empty(n + 1, np.int64)
    best = np.empty(max_len + 1, np.int64)
    work = np.empty(max_len + 1, np.int64)
    epoch = 0
    pepoch = 0
    glow = min_len
    if glow < 3:
        glow = 3

    while True:
        if glow > max_len:
            # the surviving minimum cycle length already exceeds the threshold
            break
        best_len = 0

        # Phase A: a cycle of length exactly glow, if one survives.
        for start in range(n):
            if best_len > 0:
                break
            epoch += 1
            seen[start] = epoch
            dist[start] = 0
            par_v[start] = -1
            par_e[start] = -1
            queue[0] = start
            qh = 0
            qt = 1
            lim = glow // 2
            while qh < qt:
                x = queue[qh]
                qh += 1
                dx = dist[x]
                if dx > lim:
                    break
                hit = False
                for ptr in range(indptr[x], indptr[x + 1]):
                    e = nbr_e[ptr]
                    if not alive[e] or e == par_e[x]:
                        continue
                    y = nbr_v[ptr]
                    if seen[y] != epoch:
                        seen[y] = epoch
                        dist[y] = dx + 1
                        par_v[y] = x
                        par_e[y] = e
                        queue[qt] = y
                        qt += 1
                    else:
                        c = dx + dist[y] + 1
                        if c <= glow:
                            # extract the simple cycle through (x, e, y)
                            cnt = 0
                            v = x
                            while v != -1:
                                xp_v[cnt] = v
                                xp_e[cnt] = par_e[v]
                                cnt += 1
                                v = par_v[v]
                            pepoch += 1
                            for i in range(cnt):
                                onpath[xp_v[i]] = pepoch
                                pathpos[xp_v[i]] = i
                            w = y
                            ylen = 0
                            while onpath[w] != pepoch:
                                yp_e[ylen] = par_e[w]
                                ylen += 1
                                w = par_v[w]
                            iw = pathpos[w]
                            pos = 0
                            for i in range(iw - 1, -1, -1):
                                best[pos] = xp_e[i]
                                pos += 1
                            best[pos] = e
                            pos += 1
                            for i in range(ylen):
                                best[pos] = yp_e[i]
                                pos += 1
                            best_len = pos
                            hit = True
                            break
                if hit:
                    break

        if best_len == 0:
            # Phase B: the minimum candidate value dist(x) + dist(y) + 1 over a
            # full-depth scan equals the new girth; remember where the first
            # minimal candidate lives, then re-run that BFS to extract it (the
            # traversal is deterministic, and a candidate at the minimum never
            # shortens under common-ancestor trimming).
            best_cand = 0
            best_start = -1
            for start in range(n):
                epoch += 1
                seen[start] = epoch
                dist[start] = 0
                par_e[start] = -1
                queue[0] = start
                qh = 0
                qt = 1
                while qh < qt:
                    x = queue[qh]
                    qh += 1
                    dx = dist[x]
                    cap = max_len if best_cand == 0 else best_cand - 1
                    if dx > cap // 2:
                        break
                    for ptr in range(indptr[x], indptr[x + 1]):
                        e = nbr_e[ptr]
                        if not alive[e] or e == par_e[x]:
                            continue
                        y = nbr_v[ptr]
                        if seen[y] != epoch:
                            seen[y] = epoch
                            dist[y] = dx + 1
                            par_e[y] = e
                            queue[qt] = y
                            qt += 1
                        else:
                            c = dx + dist[y] + 1
                            if c <= max_len and (best_cand == 0 or c < best_cand):
                                best_cand = c
                                best_start = start
            if best_start < 0:
                break
            # re-BFS from the winning start; the first candidate at the
            # minimum value is the one the scan saw first
            epoch += 1
            start = best_start
            seen[start] = epoch
            dist[start] = 0
            par_v[start] = -1
            par_e[start] = -1
            queue[0] = start
            qh = 0
            qt = 1
            done = False
            while qh < qt and not done:
                x = queue[qh]
                qh += 1
                dx = dist[x]
                if dx > best_cand // 2:
                    break
                for ptr in range(indptr[x], indptr[x + 1]):
                    e = nbr_e[ptr]
                    if not alive[e] or e == par_e[x]:
                        continue
                    y = nbr_v[ptr]
                    if seen[y] != epoch:
                        seen[y] = epoch
                        dist[y] = dx + 1
                        par_v[y] = x
                        par_e[y] = e
                        queue[qt] = y
                        qt += 1
                    else:
                        c = dx + dist[y] + 1
                        if c == best_cand:
                            cnt = 0
                            v = x
                            while v != -1:
                                xp_v[cnt] = v
                                xp_e[cnt] = par_e[v]
                                cnt += 1
                                v = par_v[v]
                            pepoch += 1
                            for i in range(cnt):
                                onpath[xp_v[i]] = pepoch
                                pathpos[xp_v[i]] = i
                            w = y
                            ylen = 0
                            while onpath[w] != pepoch:
                                yp_e[ylen] = par_e[w]
                                ylen += 1
                                w = par_v[w]
                            iw = pathpos[w]
                            pos = 0
                            for i in range(iw - 1, -1, -1):
                                best[pos] = xp_e[i]
                                pos += 1
                            best[pos] = e
                            pos += 1
                            for i in range(ylen):
                                best[pos] = yp_e[i]
                                pos += 1
                            best_len = pos
                            done = True
                            break
            glow = best_len

        # Commit: rotate so the smallest edge id leads, then kill the edges.
        mp = 0
        for i in range(1, best_len):
            if best[i] < best[mp]:
                mp = i
        for i in range(mp, best_len):
            out_flat[out_pos] = best[i]
            out_pos += 1
        for i in range(mp):
            out_flat[out_pos] = best[i]
            out_pos += 1
        for i in range(best_len):
            alive[best[i]] = False
        n_cyc += 1
        out_off[n_cyc] = out_pos

    return out_flat[:out_pos], out_off[: n_cyc + 1], alive


def _even_cycles_impl(n, m, indptr, nbr_v, nbr_e, sel):
    """Decompose the (even-degree) subgraph selected by ``sel`` into cycles.

    Closed-walk extraction in canonical order: walk from the smallest live
    vertex along the smallest unconsumed edge until a vertex repeats, emit the
    enclosed cycle (rotated so its smallest edge id comes first), and continue
    from the repeat point.  Returns ``(flat, off)``.
    """
    consumed = np.empty(m, np.bool_)
    for i in range(m):
        consumed[i] = not sel[i]
    out_flat = np.empty(m, np.int64)
    out_off = np.empty(m // 3 + 2, np.int64)
    out_off[0] = 0
    n_cyc = 0
    out_pos = 0
    cursor = indptr.copy()
    sv = np.empty(m + 1, np.int64)
    se = np.empty(m + 1, np.int64)
    inwalk = np.full(n, -1, np.int64)

    for start in range(n):
        cur = start
        top = 0
        while True:
            c = cursor[cur]
            e = np.int64(-1)
            w = np.int64(-1)
            while c < indptr[cur + 1]:
                if not consumed[nbr_e[c]]:
                    e = nbr_e[c]
                    w = nbr_v[c]
                    break
                c += 1
            cursor[cur] = c
            if e == -1:
                break
            consumed[e] = True
            sv[top] = cur
            se[top] = e
            inwalk[cur] = top
            top += 1
            cur = w
            p = inwalk[cur]
            if p >= 0:
                mp = p
                for i in range(p + 1, top):
                    if se[i] < se[mp]:
                        mp = i
                for i in range(mp, top):
                    out_flat[out_pos] = se[i]
                    out_pos += 1
                for i in range(p, mp):
                    out_flat[out_pos] = se[i]
                    out_pos += 1
                n_cyc += 1
                out_off[n_cyc] = out_pos
                for i in range(p, top):
                    inwalk[sv[i]] = -1
                top = p

    return out_flat[:out_pos], out_off[: n_cyc + 1]


def _kuhn_matching_impl(n, m, indptr, nbr_v, nbr_e, edge_u, edge_v, left):
    """Maximum bipartite matching: greedy pass in canonical edge order, then
    augmenting paths from each unmatched left vertex in ascending order.

    Returns ``(match_v, match_e)`` with -1 for unmatched vertices.
    """
    match_v = np.full(n, -1, np.int64)
    match_e = np.full(n, -1, np.int64)
    for e in range(m):
        u = edge_u[e]
        v = edge_v[e]
        if match_v[u] == -1 and match_v[v] == -1:
            match_v[u] = v
            match_v[v] = u
            match_e[u] = e
            match_e[v] = e

    vis = np.zeros(n, np.int64)
    f_u = np.empty(n + 1, np.int64)
    f_c = np.empty(n + 1, np.int64)
    f_v = np.empty(n + 1, np.int64)
    f_e = np.empty(n + 1, np.int64)
    epoch = 0
    for u0 in range(n):
        if not left[u0] or match_v[u0] != -1:
            continue
        epoch += 1
        sp = 0
        f_u[0] = u0
        f_c[0] = indptr[u0]
        success = False
        while sp >= 0:
            uu = f_u[sp]
            c = f_c[sp]
            moved = False
            while c < indptr[uu + 1]:
                v = nbr_v[c]
                e = nbr_e[c]
                c += 1
                if vis[v] == epoch:
                    continue
                vis[v] = epoch
                f_v[sp] = v
                f_e[sp] = e
                f_c[sp] = c
                if match_v[v] == -1:
                    success = True
                else:
                    sp += 1
                    f_u[sp] = match_v[v]
                    f_c[sp] = indptr[match_v[v]]
                moved = True
                break
            if success:
                break
            if not moved:
                sp -= 1
        if success:
            for t in range(sp, -1, -1):
                vv = f_v[t]
                uu = f_u[t]
                ee = f_e[t]
                match_v[vv] = uu
                match_v[uu] = vv
                match_e[vv] = ee
                match_e[uu] = ee

    return match_v, match_e


def _want_numba() -> bool:
    flag = os.environ.get("EQUILIFT_NO_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


if _want_numba():
    try:
        from numba import njit

        cycle_partition_kernel = njit(cache=True)(_cycle_partition_impl)
        even_cycles_kernel = njit(cache=True)(_even_cycles_impl)
        kuhn_matching_kernel = njit(cache=True)(_kuhn_matching_impl)
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - exercised via env flag instead
        cycle_partition_kernel = _cycle_partition_impl
        even_cycles_kernel = _even_cycles_impl
        kuhn_matching_kernel = _kuhn_matching_impl
        BACKEND = "python"
else:
    cycle_partition_kernel = _cycle_partition_impl
    even_cycles_kernel = _even_cycles_impl
    kuhn_matching_kernel = _kuhn_matching_impl
    BACKEND = "python"
