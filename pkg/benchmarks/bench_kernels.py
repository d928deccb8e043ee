#!/usr/bin/env python3
"""Benchmark the hot kernels under the compiled and pure-Python backends.

Times the short-cycle partition kernel and full a-factor sampling on random
regular bipartite graphs.  Run directly it reports the current backend; with
--both it re-invokes itself under EQUILIFT_NO_NUMBA=1 and prints the
comparison, first asserting that the two backends produce identical samples.
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

import numpy as np

from equilift import BACKEND, cycle_partition, sample_a_factor
from equilift.generate import random_regular_bipartite


def _digest(chunks) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return h.hexdigest()[:16]

CASES = [
    # (side, degree, factor degree, samples)
    (64, 4, 1, 60),
    (128, 6, 2, 40),
    (128, 8, 3, 30),
    (256, 4, 1, 40),
]


def run_cases():
    rows = []
    warm = random_regular_bipartite(8, 4, np.random.default_rng(0))
    cycle_partition(warm)
    sample_a_factor(warm, 1, np.random.default_rng(0))  # compile/caches out of the timings
    for side, d, a, samples in CASES:
        g = random_regular_bipartite(side, d, np.random.default_rng([9, side, d]))
        t0 = time.perf_counter()
        cycle_partition(g)
        t_part = time.perf_counter() - t0
        sample_a_factor(g, a, np.random.default_rng(0))  # warm the plan cache
        chunks = []
        t0 = time.perf_counter()
        for seed in range(samples):
            s = sample_a_factor(g, a, np.random.default_rng([7, seed]))
            chunks.append(s.h_edge_ids.tobytes())
        t_sample = (time.perf_counter() - t0) / samples
        rows.append(
            {
                "n": g.n,
                "d": d,
                "a": a,
                "partition_ms": t_part * 1e3,
                "sample_ms": t_sample * 1e3,
                "digest": _digest(chunks),
            }
        )
    return rows


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--both", action="store_true", help="compare against the pure-Python backend")
    parser.add_argument("--json", action="store_true", help="emit rows as JSON (used by --both)")
    args = parser.parse_args()

    rows = run_cases()
    if args.json:
        print(json.dumps(rows))
        return 0

    print(f"backend: {BACKEND}")
    header = f"{'n':>6} {'d':>3} {'a':>3} {'partition ms':>13} {'sample ms':>10}"
    print(header)
    for r in rows:
        print(f"{r['n']:>6} {r['d']:>3} {r['a']:>3} {r['partition_ms']:>13.2f} {r['sample_ms']:>10.2f}")

    if args.both:
        env = dict(os.environ, EQUILIFT_NO_NUMBA="1")
        out = subprocess.run(
            [sys.executable, __file__, "--json"], env=env, capture_output=True, text=True, check=True
        )
        other = json.loads(out.stdout)
        for mine, theirs in zip(rows, other):
            assert mine["digest"] == theirs["digest"], "backends disagree on sampled factors"
        print("\nbackend: python (fallback)            speedup")
        for mine, theirs in zip(rows, other):
            sp_p = theirs["partition_ms"] / max(mine["partition_ms"], 1e-9)
            sp_s = theirs["sample_ms"] / max(mine["sample_ms"], 1e-9)
            print(
                f"{theirs['n']:>6} {theirs['d']:>3} {theirs['a']:>3} "
                f"{theirs['partition_ms']:>13.2f} {theirs['sample_ms']:>10.2f}"
                f"   x{sp_p:>6.1f} / x{sp_s:>5.1f}"
            )
        print("\nsampled factors identical across backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
