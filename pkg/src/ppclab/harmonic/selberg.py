"""Selberg majorants and minorants of a symmetric arc on the circle.

For the closed arc ``|x| <= a`` (mod 1), with ``a = s / scale`` and degree K,
the Vaaler polynomial for the sawtooth plus a Fejér-kernel correction gives
degree-K trigonometric polynomials ``f-`` and ``f+`` with

    f-(x) <= 1{ ||x|| <= a } <= f+(x)          for all real x,
    mean(f+-) = 2a +- 1/(K+1),
    |c_j| <= min(2a, 1/(pi |j|)) + 1/(K+1)     for j != 0.

Both are even, so only the cosine coefficients ``c_0..c_K`` are stored.
"""
import math
from dataclasses import dataclass

import numpy as np

from ppclab.errors import DomainError

_EVAL_BUDGET = 1 << 22


def _sign_value(sign):
    if sign in ("plus", "+", 1):
        return 1
    if sign in ("minus", "-", -1):
        return -1
    raise DomainError(f"sign must be 'plus' or 'minus', got {sign!r}")


def vaaler_weight(u):
    """``pi u (1 - u) cot(pi u) + u`` on ``0 < u < 1``; decreases from 1 to 0."""
    u = np.asarray(u, dtype=np.float64)
    return np.pi * u * (1.0 - u) / np.tan(np.pi * u) + u


@dataclass(frozen=True)
class TrigPolynomial:
    """Real even trigonometric polynomial ``c_0 + 2 sum_{j=1}^K c_j cos(2 pi j x)``."""

    half: np.ndarray
    sign: str = "plus"
    s: float = None
    scale: float = None

    @property
    def degree(self):
        return self.half.size - 1

    @property
    def mean(self):
        return float(self.half[0])

    def coefficient(self, j):
        j = abs(int(j))
        return float(self.half[j]) if j <= self.degree else 0.0

    @property
    def coeffs(self):
        """Full coefficient vector for ``j = -K..K`` (index ``j + K``)."""
        return np.concatenate([self.half[:0:-1], self.half]).astype(np.complex128)

    def full_real(self):
        return np.concatenate([self.half[:0:-1], self.half])

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        flat = x.reshape(-1)
        out = np.empty(flat.size)
        j = np.arange(1, self.degree + 1, dtype=np.float64)
        step = max(1, _EVAL_BUDGET // max(1, self.degree))
        for a in range(0, flat.size, step):
            ph = np.outer(flat[a:a + step], j)
            ph -= np.floor(ph)
            out[a:a + step] = self.half[0] + 2.0 * (np.cos(2 * np.pi * ph) @ self.half[1:])
        return out.reshape(x.shape) if x.ndim else float(out[0])


def selberg_poly(K, s, scale, sign="plus"):
    """Degree-K Selberg majorant (``sign='plus'``) or minorant of ``||x|| <= s/scale``."""
    sgn = _sign_value(sign)
    K = int(K)
    if K < 1:
        raise DomainError(f"degree must be >= 1, got {K}")
    if not (s > 0 and scale > 0):
        raise DomainError("s and scale must be positive")
    a = s / scale
    # 2a = 1 is the whole circle; the construction degenerates to 1 +- Fejer and stays valid
    if not 2 * a <= 1:
        raise DomainError(f"arc length 2s/scale = {2 * a} exceeds the circle")
    j = np.arange(1, K + 1, dtype=np.float64)
    u = j / (K + 1)
    ph = j * a - np.floor(j * a)
    # exact arc coefficients damped by the Vaaler weight, plus the Fejér term
    c = vaaler_weight(u) * np.sin(2 * np.pi * ph) / (np.pi * j)
    c += sgn * (1.0 - u) * np.cos(2 * np.pi * ph) / (K + 1)
    half = np.concatenate([[2 * a + sgn / (K + 1)], c])
    return TrigPolynomial(half=half, sign="plus" if sgn > 0 else "minus", s=float(s),
                          scale=float(scale))


def arc_indicator(x, s, scale):
    """Inclusive indicator ``||x|| <= s/scale`` of the torus arc."""
    x = np.asarray(x, dtype=np.float64)
    return (np.abs(x - np.rint(x)) <= s / scale).astype(np.float64)


def tensor_eval(polys, x):
    """``prod_l polys[l](x[..., l])``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != len(polys):
        raise DomainError(f"{len(polys)} factors for {x.shape[-1]}-dimensional points")
    out = np.ones(x.shape[:-1])
    for l, p in enumerate(polys):
        out = out * p(x[..., l])
    return out if out.ndim else float(out)


def tensor_coefficient(polys, j):
    """Coefficient of ``e(j . x)`` in the product: the product of factor coefficients."""
    return math.prod(p.coefficient(jl) for p, jl in zip(polys, j))


def tensor_minorant_eval(minus, plus, x):
    """Minorant of a box indicator built from 1-D minorants and majorants.

    A plain product of minorants is not a minorant once two factors go
    negative, so this uses

        sum_l f-_l(x_l) prod_{k != l} f+_k(x_k) - (d - 1) prod_k f+_k(x_k),

    which is a valid minorant for every d and reduces to ``f-`` when d = 1.
    """
    x = np.asarray(x, dtype=np.float64)
    d = len(plus)
    if len(minus) != d or x.shape[-1] != d:
        raise DomainError("minorant factors, majorant factors and points disagree on d")
    fp = np.stack([plus[l](x[..., l]) for l in range(d)], axis=-1)
    fm = np.stack([minus[l](x[..., l]) for l in range(d)], axis=-1)
    prod_plus = np.prod(fp, axis=-1)
    out = -(d - 1) * prod_plus
    for l in range(d):
        others = np.prod(np.delete(fp, l, axis=-1), axis=-1)
        out = out + fm[..., l] * others
    return out if np.ndim(out) else float(out)


def tensor_minorant_coefficient(minus, plus, j):
    d = len(plus)
    prod_plus = math.prod(p.coefficient(jl) for p, jl in zip(plus, j))
    out = -(d - 1) * prod_plus
    for l in range(d):
        term = minus[l].coefficient(j[l])
        for k in range(d):
            if k != l:
                term *= plus[k].coefficient(j[k])
        out += term
    return out


def tensor_terms(d, K, s, scale, sign):
    """Product-form decomposition ``[(weight, [poly_1..poly_d]), ...]`` of the d-fold sandwich.

    The majorant is a single product; the minorant is the corrected
    combination used by :func:`tensor_minorant_eval`.
    """
    plus = selberg_poly(K, s, scale, "plus")
    if _sign_value(sign) > 0:
        return [(1.0, [plus] * d)]
    minus = selberg_poly(K, s, scale, "minus")
    if d == 1:
        return [(1.0, [minus])]
    terms = [(-(d - 1.0), [plus] * d)]
    for l in range(d):
        terms.append((1.0, [minus if k == l else plus for k in range(d)]))
    return terms


def tensor_constant(terms):
    """Mean over the torus of the combination described by ``terms``."""
    return float(sum(wt * math.prod(p.mean for p in polys) for wt, polys in terms))


@dataclass(frozen=True)
class SandwichCheck:
    K: int
    s: float
    scale: float
    grid: int
    mean_error: float
    coefficient_excess: float
    majorant_margin: float
    minorant_margin: float
    tol: float

    @property
    def ok(self):
        return (self.mean_error <= self.tol and self.coefficient_excess <= self.tol
                and self.majorant_margin >= -self.tol and self.minorant_margin >= -self.tol)

    def to_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["ok"] = self.ok
        return out


def sandwich_check(K, s, scale, grid=10000, tol=1e-12):
    """Check the mean, coefficient bound and pointwise sandwich of the degree-K pair.

    Points are ``i/grid`` plus both arc endpoints; margins are the minima of
    ``f+ - 1_arc`` and ``1_arc - f-`` over those points.
    """
    plus = selberg_poly(K, s, scale, "plus")
    minus = selberg_poly(K, s, scale, "minus")
    a = s / scale
    mean_err = max(abs(plus.mean - (2 * a + 1 / (K + 1))),
                   abs(minus.mean - (2 * a - 1 / (K + 1))))
    j = np.arange(1, K + 1, dtype=np.float64)
    bound = np.minimum(2 * a, 1 / (np.pi * j)) + 1 / (K + 1)
    excess = max(float(np.max(np.abs(p.half[1:]) - bound)) for p in (plus, minus))
    x = np.concatenate([np.arange(grid) / grid, [a, -a]])
    ind = arc_indicator(x, s, scale)
    return SandwichCheck(K=int(K), s=float(s), scale=float(scale), grid=int(grid),
                         mean_error=float(mean_err), coefficient_excess=max(excess, 0.0),
                         majorant_margin=float(np.min(plus(x) - ind)),
                         minorant_margin=float(np.min(ind - minus(x))), tol=tol)
