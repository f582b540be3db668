"""Empirical pair correlation on the d-torus."""
import math
from dataclasses import dataclass

import numpy as np

from ppclab import kernels
from ppclab.errors import DomainError
from ppclab.torus import NormKind

# Brute force compares this many row pairs per slab.
_BRUTE_BLOCK = 1 << 21
# Cells are shrunk by this relative margin so that any pair within the
# threshold is guaranteed to sit in adjacent cells despite rounding of y*g.
_CELL_SLACK = 1e-9
# Coarser cells stay exact; this bound keeps the cell table O(N) when s is small.
_CELLS_PER_POINT = 2


@dataclass
class PairCorrCurve:
    s_grid: np.ndarray
    r2: np.ndarray
    reference: np.ndarray
    N: int
    d: int
    norm: str = "sup"

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("s,r2,reference\n")
            for s, r, ref in zip(self.s_grid, self.r2, self.reference):
                fh.write(f"{float(s)!r},{float(r)!r},{float(ref)!r}\n")


def _points(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise DomainError(f"points must be an N x d array, got shape {pts.shape}")
    if pts.shape[0] and (np.any(pts < 0) or np.any(pts >= 1)):
        raise DomainError("points must lie in [0, 1)^d")
    return pts


def threshold(s, N, d):
    return s / N ** (1.0 / d)


def brute_pair_count(pts, thr, norm="sup"):
    """Ordered pairs m != n with torus distance <= thr, by direct comparison."""
    euclid = NormKind.coerce(norm) is NormKind.EUCLID
    n, d = pts.shape
    block = max(1, _BRUTE_BLOCK // max(1, n * d))
    total = 0
    for a in range(0, n, block):
        diff = pts[a:a + block, None, :] - pts[None, :, :]
        dd = np.abs(diff - np.rint(diff))
        dist = np.sqrt(np.sum(dd * dd, axis=-1)) if euclid else dd.max(axis=-1)
        total += int(np.count_nonzero(dist <= thr))
    return total - n  # each point matches itself at distance 0


def cells_per_axis(s, N, d):
    """Cells per axis: as fine as the threshold allows, but at most about 2N cells in total."""
    g = int(math.floor(N ** (1.0 / d) / (s * (1.0 + _CELL_SLACK))))
    if g < 3:
        return max(g, 1)
    return min(g, max(3, int(math.floor((_CELLS_PER_POINT * N) ** (1.0 / d)))))


def grid_pair_count(pts, thr, g, norm="sup"):
    """Ordered pair count using ``g`` cells per axis (g >= 3)."""
    euclid = NormKind.coerce(norm) is NormKind.EUCLID
    n, d = pts.shape
    idx = np.minimum(np.floor(pts * g).astype(np.int64), g - 1)
    lin = np.ravel_multi_index(tuple(idx.T), (g,) * d)
    order = np.argsort(lin, kind="stable")
    starts = np.concatenate([[0], np.cumsum(np.bincount(lin, minlength=g ** d))]).astype(np.int64)
    return kernels.grid_pair_count(np.ascontiguousarray(pts[order]), starts, g, thr, euclid)


def r2_count(points, s, norm="sup", method="grid"):
    """``(1/N) #{m != n : intdist(y_n - y_m) <= s / N**(1/d)}``."""
    pts = _points(points)
    n, d = pts.shape
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if n < 2:
        return 0.0
    thr = threshold(s, n, d)
    if method == "brute":
        count = brute_pair_count(pts, thr, norm)
    elif method == "grid":
        g = cells_per_axis(s, n, d)
        count = brute_pair_count(pts, thr, norm) if g < 3 else grid_pair_count(pts, thr, g, norm)
    else:
        raise DomainError(f"unknown method {method!r}")
    return count / n


def poisson_reference(s, d, norm="sup"):
    """Volume of the radius-s ball: ``(2s)**d`` (sup) or ``pi**(d/2) s**d / Gamma(d/2 + 1)``."""
    norm = NormKind.coerce(norm)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if norm is NormKind.SUP:
        return (2.0 * s) ** d
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * s ** d


def r2_curve(points, s_grid, norm="sup", method="grid"):
    pts = _points(points)
    s_grid = np.asarray(s_grid, dtype=np.float64).reshape(-1)
    if s_grid.size == 0:
        raise DomainError("s_grid is empty")
    if np.any(s_grid <= 0) or np.any(np.diff(s_grid) <= 0):
        raise DomainError("s_grid must be positive and strictly increasing")
    n, d = pts.shape
    r2 = np.array([r2_count(pts, s, norm, method) for s in s_grid])
    ref = np.array([poisson_reference(s, d, norm) for s in s_grid]) * (1.0 - 1.0 / n)
    ref = np.minimum(ref, n - 1)
    return PairCorrCurve(s_grid=s_grid, r2=r2, reference=ref, N=n, d=d,
                         norm=NormKind.coerce(norm).value)
