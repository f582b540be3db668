"""Pure-numpy kernels. Same signatures and results as :mod:`ppclab.kernels._numba`."""
import itertools

import numpy as np

# Pair expansions are processed in slabs of at most this many candidate pairs.
_PAIR_BUDGET = 1 << 22


def window_bounds(s, gamma):
    """Exact near-collision windows in a sorted array.

    For each ``i`` returns ``lo[i] <= i < hi[i]`` such that ``abs(s[i] - s[j]) < gamma``
    holds exactly for ``lo[i] <= j < hi[i]``. The predicate is evaluated in
    double precision; monotonicity of rounded subtraction makes the set of
    admissible ``j`` contiguous.
    """
    s = np.ascontiguousarray(s, dtype=np.float64)
    m = s.size
    idx = np.arange(m)
    lo = np.minimum(np.searchsorted(s, s - gamma, side="right"), idx)
    hi = np.maximum(np.searchsorted(s, s + gamma, side="left"), idx + 1)

    # searchsorted compares against s[i] -/+ gamma, which can disagree with the
    # exact predicate by a rounding step; walk the bounds until they agree.
    while True:
        cand = lo > 0
        ok = cand.copy()
        ok[cand] = np.abs(s[idx[cand]] - s[lo[cand] - 1]) < gamma
        if not ok.any():
            break
        lo[ok] -= 1
    while True:
        bad = np.abs(s - s[lo]) >= gamma
        if not bad.any():
            break
        lo[bad] += 1
    while True:
        cand = hi < m
        ok = cand.copy()
        ok[cand] = np.abs(s[hi[cand]] - s[idx[cand]]) < gamma
        if not ok.any():
            break
        hi[ok] += 1
    while True:
        bad = np.abs(s[hi - 1] - s) >= gamma
        if not bad.any():
            break
        hi[bad] -= 1
    return lo.astype(np.int64), hi.astype(np.int64)


def filtered_window_count(S, w, lo, hi, gamma):
    """Weighted count of pairs (i, j), j in [lo_i, hi_i), close in every column >= 1.

    ``S`` is sorted by column 0 and the windows already enforce that column.
    Returns ``sum w[i] * w[j]`` over pairs with ``abs(S[i, l] - S[j, l]) < gamma[l]``
    for all ``l >= 1``.
    """
    S = np.asarray(S, dtype=np.float64)
    w = np.asarray(w, dtype=np.int64)
    gamma = np.asarray(gamma, dtype=np.float64)
    m = S.shape[0]
    sizes = hi - lo
    total = 0
    start = 0
    cum = np.cumsum(sizes)
    while start < m:
        base = cum[start - 1] if start else 0
        stop = int(np.searchsorted(cum, base + _PAIR_BUDGET, side="right"))
        stop = max(stop, start + 1)
        rows = np.arange(start, stop)
        counts = sizes[start:stop]
        ii = np.repeat(rows, counts)
        offs = np.arange(ii.size) - np.repeat(np.cumsum(counts) - counts, counts)
        jj = np.repeat(lo[start:stop], counts) + offs
        keep = np.ones(ii.size, dtype=bool)
        for col in range(1, S.shape[1]):
            keep &= np.abs(S[ii, col] - S[jj, col]) < gamma[col]
        total += int(np.sum(w[ii[keep]] * w[jj[keep]]))
        start = stop
    return total


def _pair_dist(a, b, euclid):
    diff = a - b
    dd = np.abs(diff - np.rint(diff))
    if euclid:
        return np.sqrt(np.sum(dd * dd, axis=-1))
    return dd.max(axis=-1)


def grid_pair_count(pts, starts, g, thr, euclid):
    """Ordered pairs (i != j) with torus distance <= thr, via a cell list.

    ``pts`` must be sorted by linear cell id (row-major over ``g**d`` cells) and
    ``starts`` is the CSR offset array of length ``g**d + 1``. Requires g >= 3
    so that the 3**d neighbour cells are distinct. Candidate pairs are
    expanded point by point against each neighbour cell, in bounded chunks.
    """
    n, d = pts.shape
    occ = np.diff(starts)
    shape = (g,) * d
    coords = np.stack(np.unravel_index(np.repeat(np.arange(occ.size), occ), shape), axis=1)
    total = 0
    for off in itertools.product((-1, 0, 1), repeat=d):
        nb = np.ravel_multi_index(tuple(((coords + off) % g).T), shape)
        cnt = occ[nb]
        csum = np.cumsum(cnt)
        p0 = 0
        while p0 < n:
            base = csum[p0 - 1] if p0 else 0
            p1 = max(p0 + 1, int(np.searchsorted(csum, base + _PAIR_BUDGET, side="right")))
            c = cnt[p0:p1]
            m = int(c.sum())
            if m:
                ii = np.repeat(np.arange(p0, p1), c)
                jj = np.repeat(starts[nb[p0:p1]] - (np.cumsum(c) - c), c) + np.arange(m)
                close = _pair_dist(pts[ii], pts[jj], euclid) <= thr
                if not any(off):
                    close &= ii != jj
                total += int(np.count_nonzero(close))
            p0 = p1
    return total


def power_sums(y, K):
    """``S[j] = sum_n exp(2 pi i j y[n])`` for ``j = 0..K``."""
    y = np.asarray(y, dtype=np.float64)
    out = np.empty(K + 1, dtype=np.complex128)
    step = max(1, _PAIR_BUDGET // max(1, y.size))
    for j0 in range(0, K + 1, step):
        j = np.arange(j0, min(K + 1, j0 + step), dtype=np.float64)
        ph = np.outer(j, y)
        ph -= np.floor(ph)
        out[j0:j0 + j.size] = np.exp(2j * np.pi * ph).sum(axis=1)
    return out
