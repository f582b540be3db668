import numpy as np

from ppclab.errors import DomainError


def exp_sum(phases):
    """``sum_n e(f(n))`` for a table of phase values ``f(n)`` over an integer interval."""
    f = np.asarray(phases, dtype=np.float64).reshape(-1)
    if f.size == 0:
        raise DomainError("empty interval")
    f = f - np.floor(f)
    return complex(np.sum(np.exp(2j * np.pi * f)))


def vdc_bound(lam, alpha, length):
    """Second-derivative test bound ``alpha |I| lam**0.5 + lam**-0.5`` (no implied constant)."""
    if not lam > 0 or alpha < 1:
        raise DomainError("need lam > 0 and alpha >= 1")
    return alpha * length * lam ** 0.5 + lam ** -0.5
