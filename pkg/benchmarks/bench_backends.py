"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_backends.py [--n 100000] [--repeat 5]

Each kernel is run once per backend before timing so JIT compilation is not
counted. Outputs are compared as well: integer kernels must match exactly,
floating-point ones to 1e-12.
"""
import argparse
import time

import numpy as np

from opensetpad import _kernels, rng
from opensetpad._backend import HAS_NUMBA, use_backend
from opensetpad.bootstrap import BootstrapConfig, pad_replicate_matrix
from opensetpad.metrics import ScoreSet
from opensetpad.synth import GaussianScoreSpec, gen_scores


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    scores = gen_scores(GaussianScoreSpec(0.0, 1.0, 2.0, 1.0, n, n, seed=0))
    bf, at = scores.sorted_oriented
    emb = np.random.default_rng(0).normal(size=(n, 64))
    key = rng.derive(7, rng.TAG_BOOTSTRAP)
    alphas = np.array([0.05, 0.10])
    small = ScoreSet(scores.bonafide[: n // 10], scores.attack[: n // 10])
    return {
        "words": lambda: _kernels.words(key, 0, n),
        "indices": lambda: _kernels.indices(key, 0, n, n),
        "normals": lambda: _kernels.normals(key, 0, n),
        "sweep": lambda: _kernels.sweep(bf, at),
        "pad_metrics": lambda: _kernels.pad_metrics_sorted(bf, at, alphas),
        "bootstrap(100)": lambda: pad_replicate_matrix(small, BootstrapConfig(100, 0.95, 1)),
        "class_moments": lambda: _kernels.class_moments(emb),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind in "iu":
        return np.array_equal(a, b)
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<16}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>9}  agree")
    for name, fn in cases(args.n).items():
        with use_backend("numpy"):
            t_np, out_np = best_of(fn, args.repeat), fn()
        with use_backend("numba"):
            t_nb, out_nb = best_of(fn, args.repeat), fn()
        print(f"{name:<16}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>8.1f}x  {same(out_np, out_nb)}")


if __name__ == "__main__":
    main()
