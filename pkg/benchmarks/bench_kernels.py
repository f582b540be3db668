"""Time the numba kernels against their pure-numpy fallbacks on desk-scale inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Each row reports the best wall time of ``--repeat`` runs per backend (numba
after a warm-up call, so compilation is excluded) and checks that both
backends return the same result.
"""
import argparse
import time

import numpy as np

from ppclab.energy import pair_sums
from ppclab.kernels import implementation
from ppclab.sequences import gen_nlog, gen_power


def _best(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def _cases(scale):
    rng = np.random.default_rng(0)
    n1 = int(2048 * scale)
    s, _ = pair_sums(gen_power([2.5], n1).values)
    s = np.ascontiguousarray(np.sort(s[:, 0]))
    yield "window_bounds", f"{s.size} sums", lambda k: k.window_bounds(s, 1.0)

    n2 = int(1024 * scale)
    S, w = pair_sums(gen_nlog(1.0, n2).values)
    order = np.argsort(S[:, 0], kind="stable")
    S, w = np.ascontiguousarray(S[order]), w[order]
    lo, hi = implementation("numpy").window_bounds(np.ascontiguousarray(S[:, 0]), 1.0)
    g2 = np.ones(2)
    yield "filtered_window_count", f"{S.shape[0]} pair sums, d=2", \
        lambda k: k.filtered_window_count(S, w, lo, hi, g2)

    n3, d, g = int(20000 * scale), 2, 100
    pts = rng.random((n3, d))
    idx = np.minimum((pts * g).astype(np.int64), g - 1)
    lin = np.ravel_multi_index(tuple(idx.T), (g,) * d)
    order = np.argsort(lin, kind="stable")
    starts = np.concatenate([[0], np.cumsum(np.bincount(lin, minlength=g ** d))]).astype(np.int64)
    pts = np.ascontiguousarray(pts[order])
    yield "grid_pair_count", f"N={n3}, d=2, g={g}", \
        lambda k: k.grid_pair_count(pts, starts, g, 0.99 / g, False)

    n4 = int(4096 * scale)
    y = rng.random(n4)
    yield "power_sums", f"N={n4}, K={n4}", lambda k: k.power_sums(y, n4)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply problem sizes")
    args = ap.parse_args(argv)
    nb, npy = implementation("numba"), implementation("numpy")
    print(f"{'kernel':24s} {'input':28s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}  agree")
    for name, label, call in _cases(args.scale):
        call(nb)  # compile
        a, t_nb = _best(lambda: call(nb), args.repeat)
        b, t_np = _best(lambda: call(npy), args.repeat)
        if isinstance(a, tuple):
            agree = all(np.array_equal(u, v) for u, v in zip(a, b))
        elif isinstance(a, np.ndarray):
            agree = bool(np.allclose(a, b, atol=1e-8 * max(1, a.size)))
        else:
            agree = a == b
        print(f"{name:24s} {label:28s} {t_nb:9.4f} {t_np:9.4f} {t_np / t_nb:7.1f}x  {agree}")


if __name__ == "__main__":
    main()
