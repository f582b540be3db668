"""numba-compiled kernels. Same signatures and results as :mod:`ppclab.kernels._numpy`."""
import itertools
import math

import numba
import numpy as np
from numba import njit, prange


@njit(cache=True)
def window_bounds(s, gamma):
    m = s.size
    lo = np.empty(m, dtype=np.int64)
    hi = np.empty(m, dtype=np.int64)
    a = 0
    b = 0
    for i in range(m):
        while abs(s[i] - s[a]) >= gamma:
            a += 1
        if b < i + 1:
            b = i + 1
        while b < m and abs(s[b] - s[i]) < gamma:
            b += 1
        lo[i] = a
        hi[i] = b
    return lo, hi


@njit(parallel=True, cache=True)
def _filtered(S, w, lo, hi, gamma):
    m, dp = S.shape
    total = 0
    for i in prange(m):
        acc = 0
        for j in range(lo[i], hi[i]):
            ok = True
            for col in range(1, dp):
                if abs(S[i, col] - S[j, col]) >= gamma[col]:
                    ok = False
                    break
            if ok:
                acc += w[j]
        total += w[i] * acc
    return total


def filtered_window_count(S, w, lo, hi, gamma):
    return int(_filtered(np.ascontiguousarray(S, dtype=np.float64),
                         np.ascontiguousarray(w, dtype=np.int64),
                         lo, hi, np.ascontiguousarray(gamma, dtype=np.float64)))


@njit(parallel=True, cache=True)
def _grid(pts, starts, g, thr, euclid, offsets):
    n, d = pts.shape
    ncell = starts.size - 1
    noff = offsets.shape[0]
    total = 0
    for c in prange(ncell):
        acc = 0
        if starts[c + 1] > starts[c]:
            cc = np.empty(d, dtype=np.int64)
            rem = c
            for ax in range(d - 1, -1, -1):
                cc[ax] = rem % g
                rem //= g
            for o in range(noff):
                nb = 0
                for ax in range(d):
                    nb = nb * g + (cc[ax] + offsets[o, ax]) % g
                for i in range(starts[c], starts[c + 1]):
                    for j in range(starts[nb], starts[nb + 1]):
                        if i == j:
                            continue
                        if euclid:
                            ssum = 0.0
                            for ax in range(d):
                                diff = pts[i, ax] - pts[j, ax]
                                dd = abs(diff - np.rint(diff))
                                ssum += dd * dd
                            dist = math.sqrt(ssum)
                        else:
                            dist = 0.0
                            for ax in range(d):
                                diff = pts[i, ax] - pts[j, ax]
                                dd = abs(diff - np.rint(diff))
                                if dd > dist:
                                    dist = dd
                        if dist <= thr:
                            acc += 1
        total += acc
    return total


def grid_pair_count(pts, starts, g, thr, euclid):
    d = pts.shape[1]
    offsets = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64)
    return int(_grid(np.ascontiguousarray(pts, dtype=np.float64),
                     np.ascontiguousarray(starts, dtype=np.int64),
                     int(g), float(thr), bool(euclid), offsets))


@njit(cache=True)
def _power_sums(y, K):
    out = np.zeros(K + 1, dtype=np.complex128)
    for n in range(y.size):
        ph = 2.0 * math.pi * y[n]
        step = complex(math.cos(ph), math.sin(ph))
        z = 1.0 + 0.0j
        for j in range(K + 1):
            out[j] += z
            z *= step
    return out


def power_sums(y, K):
    return _power_sums(np.ascontiguousarray(y, dtype=np.float64), int(K))


NUMBA_VERSION = numba.__version__
