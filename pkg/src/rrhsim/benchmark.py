"""Backend benchmark: run the same ensemble workload through the compiled
kernels and the numpy fallback, verify bit-identical results, and time
both."""

from __future__ import annotations

import time

import numpy as np

from .backend import available_backends, get_kernels


def run_benchmark(n: int = 1000, replicas: int = 2000, seed: int = 1,
                  kind: int = 0, param: float = 0.0) -> dict:
    """Time ensemble statistics on every available backend.

    Returns {"n", "replicas", "results": {backend: seconds}, "speedup",
    "identical"}; ``identical`` is None when only one backend exists.
    """
    results: dict[str, float] = {}
    outputs = {}
    for name in available_backends():
        k = get_kernels(name)
        t0 = time.perf_counter()
        out = k.ensemble_stats(kind, n, param, seed, 0, replicas, 2)
        results[name] = time.perf_counter() - t0
        outputs[name] = out
    identical = None
    if len(outputs) == 2:
        a, b = outputs["ext"], outputs["python"]
        identical = all(
            np.array_equal(a[key], b[key]) if isinstance(a[key], np.ndarray)
            else a[key] == b[key]
            for key in a
        )
    speedup = None
    if "ext" in results and "python" in results:
        speedup = results["python"] / results["ext"]
    return {
        "n": n,
        "replicas": replicas,
        "seed": seed,
        "results": results,
        "speedup": speedup,
        "identical": identical,
    }


def format_benchmark(bench: dict) -> str:
    lines = [
        f"ensemble workload: n={bench['n']} replicas={bench['replicas']} "
        f"seed={bench['seed']}"
    ]
    for name, secs in bench["results"].items():
        rate = bench["replicas"] / secs if secs > 0 else float("inf")
        lines.append(f"  {name:>6}: {secs:8.3f} s   ({rate:,.0f} replicas/s)")
    if bench["speedup"] is not None:
        lines.append(f"  speedup ext vs python: {bench['speedup']:.1f}x")
    if bench["identical"] is not None:
        lines.append(f"  outputs bit-identical: {bench['identical']}")
    return "\n".join(lines)
