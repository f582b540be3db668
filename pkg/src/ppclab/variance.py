"""Selberg-smoothed pair statistic, its mean under the sin^2 measure, and its variance.

The statistic for a dilation vector ``alpha`` is

    (1/N) sum_{m != n} F((x_n - x_m) alpha),

with F the d-fold Selberg majorant (or the corrected minorant) of degree
``K = ceil((rN)**(1/d))`` around the sup-norm box of radius ``s / N**(1/d)``.
Because F is a trigonometric polynomial the double sum collapses to
``sum_j c_j |sum_n e(j . y_n)|**2 - N F(0)`` over ``|j|_inf <= K``.
"""
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from ppclab import kernels
from ppclab.errors import DomainError
from ppclab.harmonic.measure import MeasureSpec, mu_sample
from ppclab.harmonic.selberg import tensor_constant, tensor_terms
from ppclab.torus import dilate_frac

_DIRECT_BUDGET = 1 << 20


@dataclass
class VarianceEstimate:
    N: int
    r: int
    s: float
    samples: int
    mean_stat: float
    var_stat: float
    stderr: float
    seed: int
    d: int = 1
    K: int = 0

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def csv_row(self):
        return f"{self.N},{self.var_stat!r},{self.stderr!r}"


@dataclass(frozen=True)
class MeanCalibration:
    mc_mean: float
    target: float
    gap: float
    stderr: float
    samples: int


def degree(r, N, d):
    """Smallest integer K with ``K**d >= r*N``."""
    target = int(r) * int(N)
    if target < 1:
        raise DomainError("r and N must be positive")
    K = max(1, int(round(target ** (1.0 / d))))
    while K ** d < target:
        K += 1
    while K > 1 and (K - 1) ** d >= target:
        K -= 1
    return K


def _values(x):
    v = np.asarray(getattr(x, "values", x), dtype=np.float64)
    return v[:, None] if v.ndim == 1 else v


def _terms(d, N, s, r, sign):
    K = degree(r, N, d)
    return K, tensor_terms(d, K, s, N ** (1.0 / d), sign)


def power_grid(y, K):
    """``|sum_n e(j . y_n)|**2`` for every ``j`` in ``[-K, K]**d`` (axis index ``j + K``)."""
    N, d = y.shape
    if d == 1:
        half = np.abs(kernels.power_sums(y[:, 0], K)) ** 2
        return np.concatenate([half[:0:-1], half])
    k = np.arange(-K, K + 1, dtype=np.float64)
    tables = []
    for l in range(d):
        ph = np.outer(y[:, l], k)
        ph -= np.floor(ph)
        tables.append(np.exp(2j * np.pi * ph))

    def grid(tabs, v):
        if len(tabs) == 2:
            return (tabs[0] * v[:, None]).T @ tabs[1]
        return np.stack([grid(tabs[1:], v * tabs[0][:, i]) for i in range(tabs[0].shape[1])])

    S = grid(tables, np.ones(N, dtype=np.complex128))
    return np.abs(S) ** 2


def _contract(P, polys):
    out = P
    for p in polys:
        out = np.tensordot(p.full_real(), out, axes=([0], [0]))
    return float(out)


def _value_at_zero(terms):
    return sum(wt * math.prod(p(0.0) for p in polys) for wt, polys in terms)


def _direct(y, terms):
    N, d = y.shape
    total = 0.0
    block = max(1, _DIRECT_BUDGET // max(1, N))
    for a in range(0, N, block):
        diff = y[a:a + block, None, :] - y[None, :, :]
        vals = np.zeros(diff.shape[:2])
        for wt, polys in terms:
            prod = np.ones(diff.shape[:2])
            for l, p in enumerate(polys):
                prod = prod * p(diff[..., l])
            vals += wt * prod
        rows = np.arange(a, min(a + block, N))
        vals[rows - a, rows] = 0.0
        total += math.fsum(vals.ravel())
    return total / N


def pair_statistic(x, alpha, s, r, sign="plus", method="fourier"):
    """``(1/N) sum_{m != n} F((x_n - x_m) alpha)``; 0 when N < 2.

    ``method='direct'`` evaluates F at every pair difference (O(N^2 K), for
    checking); ``'fourier'`` uses exponential sums (O(N K^d)).
    """
    values = _values(x)
    N, d = values.shape
    if N < 2:
        return 0.0
    _, terms = _terms(d, N, s, r, sign)
    K = terms[0][1][0].degree
    y = dilate_frac(values, alpha)
    if method == "direct":
        return _direct(y, terms)
    if method != "fourier":
        raise DomainError(f"unknown method {method!r}")
    P = power_grid(y, K)
    total = sum(wt * _contract(P, polys) for wt, polys in terms)
    return (total - N * _value_at_zero(terms)) / N


def tensor_mean(N, d, s, r, sign="plus"):
    """Torus mean of F, i.e. ``c_0**d`` for the majorant."""
    if N < 1:
        raise DomainError("N must be >= 1")
    _, terms = _terms(d, N, s, r, sign)
    return tensor_constant(terms)


def _draws(d, samples, seed):
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    return mu_sample(MeasureSpec.uniform(d, 0.5), samples, seed)


def _mean_and_se(vals):
    n = len(vals)
    m = math.fsum(vals) / n
    # jackknife over leave-one-out means
    loo = (math.fsum(vals) - np.asarray(vals)) / (n - 1)
    se = math.sqrt((n - 1) / n * math.fsum((loo - loo.mean()) ** 2))
    return m, se


def mean_calibration(x, s, r, samples, seed, sign="plus"):
    """Monte Carlo mean of the statistic over the sin^2 measure versus ``N * mean(F)``."""
    values = _values(x)
    N, d = values.shape
    alphas = _draws(d, samples, seed)
    target = N * tensor_mean(N, d, s, r, sign)
    if N < 2:
        return MeanCalibration(0.0, target, abs(target), 0.0, samples)
    stats = [pair_statistic(values, a, s, r, sign) for a in alphas]
    m, se = _mean_and_se(stats)
    return MeanCalibration(m, target, abs(m - target), se, samples)


def variance_estimate(x, s, r, samples, seed, statistic=None, center=None):
    """Monte Carlo estimate of ``integral ((1/N) sum_{m != n} H_N)**2 dmu``.

    Each draw contributes ``(stat - center)**2`` with ``center = (N - 1) mean(F)``
    unless overridden. ``statistic`` replaces the pair statistic by any
    callable of the draw (used to calibrate the estimator).
    """
    values = _values(x)
    N, d = values.shape
    K = degree(r, N, d)
    alphas = _draws(d, samples, seed)
    if statistic is None:
        if N < 2:
            return VarianceEstimate(N, r, s, samples, 0.0, 0.0, 0.0, seed, d, K)
        statistic = lambda a: pair_statistic(values, a, s, r, "plus")  # noqa: E731
    if center is None:
        center = (N - 1) * tensor_mean(N, d, s, r, "plus")
    stats = np.array([float(statistic(a)) for a in alphas])
    sq = list((stats - center) ** 2)
    v, se = _mean_and_se(sq)
    return VarianceEstimate(N=N, r=int(r), s=float(s), samples=int(samples),
                            mean_stat=math.fsum(stats) / samples, var_stat=v, stderr=se,
                            seed=seed, d=d, K=K)
