"""Fejér-type kernel K on the real line and its compactly supported transform."""
import math
from dataclasses import dataclass

import numpy as np

from ppclab.errors import DomainError


@dataclass(frozen=True)
class KernelParams:
    d: int
    delta: float
    N: float

    def __post_init__(self):
        if int(self.d) < 1:
            raise DomainError("d must be >= 1")
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if not self.N >= 3:
            raise DomainError("N must be >= 3 so that log N > 1")

    @property
    def width(self):
        """``(1/d + delta/d) log N``."""
        return (1.0 + self.delta) / self.d * math.log(self.N)


def k_kernel(xi, p):
    """``sin(a xi)**2 / (pi a xi**2)`` with ``a = (1/d + delta/d) log N``; ``a/pi`` at 0."""
    a = p.width
    xi = np.asarray(xi, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(xi == 0, a / math.pi, np.sin(a * xi) ** 2 / (math.pi * a * xi * xi))
    return float(out) if out.ndim == 0 else out


def k_hat(v, p):
    """``max(1 - v / (2a), 0)`` for ``v >= 0``."""
    v = np.asarray(v, dtype=np.float64)
    out = np.maximum(1.0 - np.abs(v) / (2.0 * p.width), 0.0)
    return float(out) if out.ndim == 0 else out
