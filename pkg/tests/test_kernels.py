import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ppclab import kernels
from ppclab._backend import BACKEND, HAVE_NUMBA

NB = kernels.implementation("numba")
NP = kernels.implementation("numpy")


def test_backend_follows_environment():
    import os
    assert HAVE_NUMBA
    assert BACKEND == os.environ.get("PPCLAB_BACKEND", "numba")


def _sorted_sums(rng, n):
    s = np.sort(rng.uniform(0, 10, size=n))
    if n > 3:
        s[1] = s[0] + 0.5  # exact window edges
    return np.sort(s)


@given(st.integers(1, 300), st.floats(1e-3, 1.0), st.integers(0, 2**32 - 1))
def test_window_bounds_agree_and_are_exact(n, gamma, seed):
    s = _sorted_sums(np.random.default_rng(seed), n)
    lo_a, hi_a = NB.window_bounds(s, gamma)
    lo_b, hi_b = NP.window_bounds(s, gamma)
    np.testing.assert_array_equal(lo_a, lo_b)
    np.testing.assert_array_equal(hi_a, hi_b)
    for i in range(n):
        inside = np.flatnonzero(np.abs(s[i] - s) < gamma)
        assert (lo_a[i], hi_a[i]) == (inside[0], inside[-1] + 1)


@given(st.integers(1, 200), st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_filtered_counts_agree(n, d, seed):
    rng = np.random.default_rng(seed)
    S = rng.uniform(0, 5, size=(n, d))
    S = S[np.argsort(S[:, 0], kind="stable")]
    w = rng.integers(1, 3, size=n).astype(np.int64)
    gamma = rng.uniform(0.1, 1.0, size=d)
    lo, hi = NP.window_bounds(np.ascontiguousarray(S[:, 0]), gamma[0])
    a = NB.filtered_window_count(S, w, lo, hi, gamma)
    b = NP.filtered_window_count(S, w, lo, hi, gamma)
    brute = sum(int(w[p] * w[q]) for p, q in itertools.product(range(n), repeat=2)
                if np.all(np.abs(S[p] - S[q]) < gamma))
    assert a == b == brute


@given(st.integers(2, 300), st.integers(1, 4), st.integers(0, 2**32 - 1), st.booleans())
def test_grid_counts_agree(n, d, seed, euclid):
    rng = np.random.default_rng(seed)
    g = 3 + int(rng.integers(0, 4))
    pts = rng.random((n, d))
    idx = np.minimum((pts * g).astype(np.int64), g - 1)
    lin = np.ravel_multi_index(tuple(idx.T), (g,) * d)
    order = np.argsort(lin, kind="stable")
    starts = np.concatenate([[0], np.cumsum(np.bincount(lin, minlength=g ** d))]).astype(np.int64)
    pts = np.ascontiguousarray(pts[order])
    thr = 0.99 / g
    assert NB.grid_pair_count(pts, starts, g, thr, euclid) == \
        NP.grid_pair_count(pts, starts, g, thr, euclid)


@given(st.integers(1, 200), st.integers(0, 300), st.integers(0, 2**32 - 1))
def test_power_sums_agree(n, K, seed):
    y = np.random.default_rng(seed).random(n)
    a = NB.power_sums(y, K)
    b = NP.power_sums(y, K)
    ref = np.exp(2j * np.pi * np.outer(np.arange(K + 1), y)).sum(axis=1)
    np.testing.assert_allclose(a, ref, atol=1e-9 * max(1, n))
    np.testing.assert_allclose(b, ref, atol=1e-9 * max(1, n))


def test_bad_backend_env_rejected():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-c", "import ppclab.kernels"],
                       env={"PPCLAB_BACKEND": "fortran", "PATH": ""}, capture_output=True)
    assert r.returncode != 0 and b"PPCLAB_BACKEND" in r.stderr


def test_numpy_backend_env_selects_numpy():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-c",
                        "from ppclab import kernels; print(kernels.window_bounds.__module__)"],
                       env={"PPCLAB_BACKEND": "numpy", "PATH": ""}, capture_output=True, text=True)
    assert r.stdout.strip() == "ppclab.kernels._numpy"


def test_benchmark_runs_and_backends_agree(capsys):
    import importlib.util
    import pathlib
    path = pathlib.Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--repeat", "1", "--scale", "0.05"])
    rows = capsys.readouterr().out.strip().splitlines()[1:]
    assert len(rows) == 4 and all(r.endswith("True") for r in rows)
