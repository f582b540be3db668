"""Torus geometry: intrinsic distances and fractional-part dilation."""
from enum import Enum

import numpy as np

from ppclab.errors import DomainError

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant


class NormKind(str, Enum):
    SUP = "sup"
    EUCLID = "euclid"

    @classmethod
    def coerce(cls, value):
        try:
            return cls(value)
        except ValueError:
            raise DomainError(f"unknown norm {value!r}; expected 'sup' or 'euclid'") from None


def nearest_int_dist(y):
    """Distance from each entry of ``y`` to the nearest integer, in [0, 1/2]."""
    y = np.asarray(y, dtype=np.float64)
    return np.abs(y - np.rint(y))


def intdist(y, norm="sup"):
    """Torus distance ``min_k ||y + k||`` of a vector (or stack of vectors).

    The last axis of ``y`` is the coordinate axis. For the sup norm this is the
    largest per-coordinate distance to the nearest integer; for the euclidean
    norm the per-coordinate distances combine in quadrature.
    """
    norm = NormKind.coerce(norm)
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 0:
        y = y[None]
    if y.shape[-1] < 1:
        raise DomainError("intdist needs at least one coordinate")
    if not np.all(np.isfinite(y)):
        raise DomainError("intdist of a non-finite vector")
    d = nearest_int_dist(y)
    if norm is NormKind.SUP:
        out = d.max(axis=-1)
    else:
        out = np.sqrt(np.sum(d * d, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def _two_product(a, b):
    # Error-free product a*b = p + e (Dekker), valid away from overflow.
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def frac_product(x, alpha):
    """Fractional part of ``x * alpha`` computed from the exact product.

    Large ``x * alpha`` (e.g. ``n**3.5`` times a heavy-tailed draw) would lose
    all fractional digits under a naive ``np.mod(x * alpha, 1)``; splitting the
    product into a rounded head and its exact rounding error keeps the result
    accurate to about one unit in the last place of [0, 1).
    """
    x = np.asarray(x, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    p, e = _two_product(x, alpha)
    r = (p - np.floor(p)) + (e - np.floor(e))
    r = r - np.floor(r)
    # r == 1.0 only arises from rounding a value within one ulp below 1
    return np.where(r >= 1.0, 0.0, r)


def dilate_frac(x, alpha):
    """Dilate each column of ``x`` by the matching entry of ``alpha`` mod 1.

    ``x`` is an (N, d) array or a :class:`~ppclab.sequences.SequenceMatrix`;
    returns the (N, d) array of points ``{x[n, l] * alpha[l]}`` in ``[0, 1)``.
    Negative products wrap with the floor convention.
    """
    values = getattr(x, "values", x)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    alpha = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    if alpha.ndim != 1 or alpha.shape[0] != values.shape[1]:
        raise DomainError(
            f"alpha has {alpha.size} entries but the sequence has {values.shape[1]} columns"
        )
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(alpha))):
        raise DomainError("dilate_frac needs finite inputs")
    return frac_product(values, alpha[None, :])
