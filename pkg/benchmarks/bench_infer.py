#!/usr/bin/env python3
"""Benchmark the compiled tie-counting kernel against the pure-Python engine.

Generates a synthetic world, runs inference with both backends, and prints
wall time, throughput and the speedup.  Outputs are asserted identical, so
the numbers are comparing the same computation.

    python benchmarks/bench_infer.py --rows 200000
"""

import argparse
import time

from cotravel import infer
from cotravel.synth import GenConfig, generate


def scaled_config(rows: int, seed: int) -> GenConfig:
    # The default world yields ~20k rows; scale the moving parts linearly.
    factor = max(rows / 20_000, 0.05)
    return GenConfig(
        population=max(2_000, int(12_000 * factor)),
        n_cliques=max(100, int(1_200 * factor)),
        n_tour_groups=max(10, int(220 * factor)),
        noise_rate=0.0,
        unique_stranger_pairs=False,
        track_ground_truth=False,
        seed=seed,
    )


def run(dataset, backend: str, shards: int, repeats: int) -> tuple[float, object]:
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = infer.infer_tie_arrays(
            dataset, backend=backend, shards=shards, parallel=shards > 1
        )
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=100_000, help="target SFPG row count")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--shards", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=2)
    parser.add_argument("--skip-python", action="store_true", help="kernel only")
    args = parser.parse_args()

    dataset, _ = generate(scaled_config(args.rows, args.seed))
    rows = len(dataset.records)
    print(f"dataset: {rows} rows, kernel available: {infer.HAVE_KERNEL}")

    results = {}
    if infer.HAVE_KERNEL:
        secs, out = run(dataset, "kernel", args.shards, args.repeats)
        results["kernel"] = (secs, out)
        print(f"kernel : {secs:8.3f}s  {rows / secs:12.0f} rows/s  {len(out[0])} ties")
    if not args.skip_python:
        secs, out = run(dataset, "python", 1, max(1, args.repeats - 1))
        results["python"] = (secs, out)
        print(f"python : {secs:8.3f}s  {rows / secs:12.0f} rows/s  {len(out[0])} ties")

    if len(results) == 2:
        import numpy as np

        same = all(
            np.array_equal(a, b)
            for a, b in zip(results["kernel"][1], results["python"][1])
        )
        print(f"outputs identical: {same}")
        print(f"speedup: {results['python'][0] / results['kernel'][0]:.1f}x")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
