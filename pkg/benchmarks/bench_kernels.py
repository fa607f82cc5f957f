"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs under both backends; outputs are
compared before timings are reported.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from regcalc.kernels import available_backends


def cases(rng):
    from regcalc._kernels_py import block_profiles, rgs_partitions
    rgs = rgs_partitions(8)
    nb, sz = block_profiles(rgs)
    gders = rng.standard_normal((9, 64))
    fders = rng.standard_normal((9, 64))
    f = rng.standard_normal(1025)
    g = rng.standard_normal(700)
    m = 12
    up = np.triu(rng.random((m, m)) < 0.5, 1)
    ov = (up | up.T | np.eye(m, dtype=bool)).astype(np.uint8)
    tb = np.triu(rng.random((m, m)) < 0.5, 1)
    bt = ((tb | tb.T | np.eye(m, dtype=bool)) & ov.astype(bool)).astype(np.uint8)
    table = np.array([1, 1], dtype=np.uint8)
    return {
        "rgs_partitions(10)": lambda k: k.rgs_partitions(10),
        "block_profiles(n=8)": lambda k: k.block_profiles(rgs),
        "fdb_sum(n=8, 64 pts)": lambda k: k.fdb_sum(nb, sz, gders, fders),
        "simpson_convolve(1025x700)": lambda k: k.simpson_convolve(f, g, 1e-3),
        "retract_tags(m=12)": lambda k: k.retract_tags(ov, bt, table),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "f":
        return np.allclose(a, b, rtol=1e-12, atol=1e-12)
    return np.array_equal(a, b)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} " + " ".join(f"{name:>12s}" for name in backends) + "   speedup")
    for label, run in cases(rng).items():
        outs = {name: run(mod) for name, mod in backends.items()}
        if "compiled" in outs and not _same(outs["compiled"], outs["python"]):
            print(f"{label}: backends disagree")
            return 1
        times = {}
        for name, mod in backends.items():
            n = 1
            while timeit.timeit(lambda: run(mod), number=n) < 0.05:
                n *= 2
            times[name] = min(timeit.repeat(lambda: run(mod), number=n, repeat=args.repeat)) / n
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{label:28s} " + " ".join(f"{times[name] * 1e3:10.3f}ms" for name in backends)
              + f"   {speed:6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
