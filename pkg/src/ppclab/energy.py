"""Exact (joint) additive energy counts and related near-collision tallies.

All energies count ordered 4-tuples ``(n1, n2, n3, n4)`` with the strict test
``abs((x[n1] + x[n2]) - (x[n3] + x[n4])) < gamma`` in every constrained column.
The two pair sums are rounded first and then subtracted; the brute-force
oracles in the test-suite evaluate the predicate in the same order, so fast
and brute counts agree exactly.
"""
import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from ppclab import kernels
from ppclab.errors import DomainError, QuadratureError

_MAX_EXACT = 2 ** 62


@dataclass(frozen=True)
class DyadicBlock:
    """Dilation block ``2**(u_l - 1) <= j_l < 2**u_l`` for each coordinate l."""

    u: tuple

    def __post_init__(self):
        u = tuple(int(v) for v in np.atleast_1d(self.u))
        if not u or any(v < 1 for v in u):
            raise DomainError(f"dyadic exponents must be >= 1, got {u}")
        object.__setattr__(self, "u", u)

    def ranges(self):
        return [range(2 ** (v - 1), 2 ** v) for v in self.u]

    def size(self):
        return math.prod(2 ** (v - 1) for v in self.u)


@dataclass
class EnergyReport:
    Ns: list
    counts: list
    gamma: list
    subset: list
    slope: float = None
    slope_stderr: float = None
    meta: dict = field(default_factory=dict)

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("N,count\n")
            for n, c in zip(self.Ns, self.counts):
                fh.write(f"{int(n)},{int(c)}\n")

    def to_json(self, path):
        payload = {k: v for k, v in asdict(self).items() if k not in ("Ns", "counts")}
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, csv_path, json_path):
        with open(csv_path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if lines[0] != "N,count":
            raise ValueError(f"{csv_path}: unexpected header {lines[0]!r}")
        Ns, counts = [], []
        for line in lines[1:]:
            if line:
                n, c = line.split(",")
                Ns.append(int(n))
                counts.append(int(c))
        with open(json_path, encoding="utf-8") as fh:
            side = json.load(fh)
        return cls(Ns=Ns, counts=counts, **side)


def _as_matrix(x):
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    return values


def _check_gamma(gamma, ncols):
    g = np.atleast_1d(np.asarray(gamma, dtype=np.float64))
    if g.size == 1 and ncols > 1:
        g = np.repeat(g, ncols)
    if g.size != ncols:
        raise DomainError(f"gamma has {g.size} entries, expected {ncols}")
    if np.any(~(g > 0)) or np.any(g > 1):
        raise DomainError(f"every gamma must lie in (0, 1], got {g.tolist()}")
    return g


def _check_exact(n):
    if float(n) ** 4 >= _MAX_EXACT:
        raise DomainError(f"N={n} is too large for exact 64-bit tallies")


def pair_sums(cols):
    """Sums over unordered index pairs ``a <= b`` with their ordered multiplicity.

    Returns ``(S, w)``: ``S[p, l] = cols[a, l] + cols[b, l]`` and ``w[p]`` is 1 on
    the diagonal, 2 off it.
    """
    cols = np.asarray(cols, dtype=np.float64)
    n = cols.shape[0]
    ia, ib = np.triu_indices(n)
    S = cols[ia] + cols[ib]
    w = np.where(ia == ib, 1, 2).astype(np.int64)
    return S, w


def near_collision_count(S, w, gamma):
    """``sum w[p] * w[q]`` over pairs (p, q) with ``abs(S[p, l] - S[q, l]) < gamma[l]`` for all l.

    Rows are sorted on the most selective column (smallest total window), which
    is windowed exactly; the remaining columns are filtered pair by pair.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim == 1:
        S = S[:, None]
    w = np.asarray(w, dtype=np.int64)
    gamma = np.asarray(gamma, dtype=np.float64)
    if S.shape[0] == 0:
        return 0
    if S.shape[1] == 1:
        order = np.argsort(S[:, 0], kind="stable")
        s = np.ascontiguousarray(S[order, 0])
        ws = w[order]
        lo, hi = kernels.window_bounds(s, gamma[0])
        cum = np.concatenate([[0], np.cumsum(ws)])
        return int(np.sum(ws * (cum[hi] - cum[lo])))

    best = None
    for col in range(S.shape[1]):
        order = np.argsort(S[:, col], kind="stable")
        s = np.ascontiguousarray(S[order, col])
        lo, hi = kernels.window_bounds(s, gamma[col])
        work = int(np.sum(hi - lo))
        if best is None or work < best[0]:
            best = (work, col, order, lo, hi)
    _, col, order, lo, hi = best
    perm = [col] + [c for c in range(S.shape[1]) if c != col]
    Ss = np.ascontiguousarray(S[order][:, perm])
    return kernels.filtered_window_count(Ss, w[order], lo, hi, gamma[perm])


def energy_1d(x, gamma, N):
    """``E_gamma`` of the first N entries of a single real column."""
    x = np.asarray(getattr(x, "values", x), dtype=np.float64).reshape(-1)
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if N < 1 or x.size < N:
        raise DomainError(f"need at least N={N} >= 1 entries, have {x.size}")
    _check_exact(N)
    S, w = pair_sums(x[:N, None])
    return near_collision_count(S, w, [gamma])


def _resolve_subset(subset, d):
    if subset is None:
        return list(range(d))
    subset = sorted({int(i) for i in subset})
    if not subset:
        raise DomainError("subset D' must be non-empty")
    if subset[0] < 0 or subset[-1] >= d:
        raise DomainError(f"subset {subset} out of range for {d} columns")
    return subset


def joint_energy(x, gamma, subset=None, N=None):
    """Joint energy ``E_gamma(X_N^{D'})`` over the 0-based columns in ``subset``.

    ``gamma`` has one entry per column of ``x`` (a scalar is broadcast); only
    the entries in ``subset`` are used. ``N`` defaults to all rows.
    """
    values = _as_matrix(x)
    d = values.shape[1]
    subset = _resolve_subset(subset, d)
    g = _check_gamma(gamma, d)[subset]
    N = values.shape[0] if N is None else int(N)
    if N < 1 or values.shape[0] < N:
        raise DomainError(f"need at least N={N} >= 1 rows, have {values.shape[0]}")
    _check_exact(N)
    S, w = pair_sums(values[:N][:, subset])
    return near_collision_count(S, w, g)


def block_energy(x, gamma, N, subset=None, clip=False):
    """Near-collision count with all four indices in the window ``[N, 2N]`` (1-based).

    With ``clip=True`` the window is truncated to the available rows instead of
    raising.
    """
    values = _as_matrix(x)
    if N < 1:
        raise DomainError(f"window start must be >= 1, got {N}")
    stop = 2 * N
    if values.shape[0] < stop:
        if not clip or values.shape[0] < N:
            raise DomainError(f"window [{N}, {2 * N}] needs {stop} rows, have {values.shape[0]}")
        stop = values.shape[0]
    d = values.shape[1]
    subset = _resolve_subset(subset, d)
    g = _check_gamma(gamma, d)[subset]
    rows = values[N - 1:stop][:, subset]
    _check_exact(rows.shape[0])
    S, w = pair_sums(rows)
    return near_collision_count(S, w, g)


def _dilated_points(z, block):
    z = _as_matrix(z)
    if z.shape[1] != len(block.u):
        raise DomainError(f"block has {len(block.u)} exponents but z has {z.shape[1]} columns")
    js = np.array(list(itertools.product(*block.ranges())), dtype=np.float64)
    return (js[:, None, :] * z[None, :, :]).reshape(-1, z.shape[1])


def dilated_pair_count(z, block):
    """``sum over j, t in block and 1 <= m, n <= M of 1{ max_l |j_l z_m,l - t_l z_n,l| < 1 }``."""
    if not isinstance(block, DyadicBlock):
        block = DyadicBlock(block)
    P = _dilated_points(z, block)
    return near_collision_count(P, np.ones(P.shape[0], dtype=np.int64), np.ones(P.shape[1]))


def same_component_count(w, u, d):
    """Closed form of ``dilated_pair_count`` for one column replicated d times.

    With ``z_m = (w_m, ..., w_m)`` and block ``(u, ..., u)`` the indicator
    factorises over coordinates, so the count is ``sum_{m,n} c_mn**d`` where
    ``c_mn = #{(j, t) in block^2 : |j w_m - t w_n| < 1}`` is the 1-D count for
    the pair (m, n).
    """
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if int(u) < 1 or int(d) < 1:
        raise DomainError("u and d must be >= 1")
    j = np.arange(2 ** (u - 1), 2 ** u, dtype=np.float64)
    jw = j[:, None] * w[None, :]
    # c[m, n] = sum over (j, t) of 1{|j w_m - t w_n| < 1}
    close = np.abs(jw[:, None, :, None] - jw[None, :, None, :]) < 1
    c = close.sum(axis=(0, 1)).astype(np.int64)
    return int(sum(int(v) ** int(d) for v in c.ravel()))


def fit_exponent(Ns, counts):
    """Least-squares slope of ``log(count)`` against ``log(N)`` with its standard error."""
    Ns = np.asarray(Ns, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if Ns.shape != counts.shape:
        raise DomainError("Ns and counts differ in length")
    if np.unique(Ns).size < 3:
        raise DomainError("exponent fit needs at least 3 distinct N values")
    if np.any(counts <= 0) or np.any(Ns <= 0):
        raise DomainError("exponent fit needs positive N and counts")
    res = stats.linregress(np.log(Ns), np.log(counts))
    return float(res.slope), float(res.stderr)


def energy_report(x, gamma, Ns, subset=None):
    """Exact joint energies for each N in ``Ns`` plus the fitted growth exponent."""
    values = _as_matrix(x)
    d = values.shape[1]
    subset = _resolve_subset(subset, d)
    g = _check_gamma(gamma, d)
    Ns = [int(n) for n in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("Ns must be strictly increasing")
    counts = [joint_energy(values, g, subset, n) for n in Ns]
    slope = stderr = None
    if len(Ns) >= 3:
        slope, stderr = fit_exponent(Ns, counts)
    return EnergyReport(Ns=Ns, counts=counts, gamma=g.tolist(), subset=subset,
                        slope=slope, slope_stderr=stderr)


# -- Watt's counting-versus-integral diagnostic --------------------------------

@dataclass(frozen=True)
class WattResult:
    V: int
    scaled_W: float
    ratio: float
    resolution: int


def _omega_table(A, omega):
    A = np.asarray(sorted(set(int(a) for a in A)), dtype=np.int64)
    if A.size == 0:
        raise DomainError("A must be non-empty")
    if callable(omega):
        table = np.array([np.atleast_1d(omega(int(a))) for a in A], dtype=np.float64)
    else:
        table = np.asarray(omega, dtype=np.float64)
        if table.ndim == 1:
            table = table[:, None]
        if table.shape[0] != A.size:
            raise DomainError(f"omega table has {table.shape[0]} rows for |A| = {A.size}")
    return A, table


def _tuple_sums(table, M):
    # sum_{m<=M} omega(u_m) over all u in A^M
    acc = table
    for _ in range(M - 1):
        acc = (acc[:, None, :] + table[None, :, :]).reshape(-1, table.shape[1])
    return acc


def _midpoint_W(table, D, M, n):
    K = table.shape[1]
    axes = [(-D[k] + (np.arange(n) + 0.5) * (2 * D[k] / n)) for k in range(K)]
    cell = math.prod(2 * D[k] / n for k in range(K))
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, K)
    total = 0.0
    step = max(1, (1 << 20) // table.shape[0])
    for g0 in range(0, grid.shape[0], step):
        ph = grid[g0:g0 + step] @ table.T
        T = np.exp(2j * np.pi * ph).sum(axis=1)
        total += float(np.sum(np.abs(T) ** (2 * M)))
    return total * cell


def watt_ratio(A, omega, delta, M, resolution=64, max_resolution=None, rtol=0.01):
    """Compare the solution count ``V_2M`` with ``delta_1...delta_K * W_2M``.

    ``omega`` maps each integer in ``A`` to a K-vector (a callable, or an
    ``(|A|, K)`` table aligned with ``sorted(A)``). ``W`` integrates
    ``|sum_u e(omega(u).x)|**(2M)`` over the box ``[-D_k, D_k]`` with
    ``2 delta_k D_k = 1`` by the composite midpoint rule, doubling the
    per-axis resolution until successive estimates agree to ``rtol``.
    """
    if M < 1:
        raise DomainError("M must be >= 1")
    A, table = _omega_table(A, omega)
    K = table.shape[1]
    delta = np.atleast_1d(np.asarray(delta, dtype=np.float64))
    if delta.size == 1 and K > 1:
        delta = np.repeat(delta, K)
    if delta.size != K or np.any(~(delta > 0)):
        raise DomainError("delta needs K positive entries")
    D = 1.0 / (2.0 * delta)

    sums = _tuple_sums(table, M)
    V = near_collision_count(sums, np.ones(sums.shape[0], dtype=np.int64), delta)

    if max_resolution is None:
        max_resolution = max(resolution, int(round((1 << 22) ** (1.0 / K))))
    n = resolution
    prev = _midpoint_W(table, D, M, n)
    while True:
        n *= 2
        if n > max_resolution:
            raise QuadratureError(f"W did not settle to {rtol:.0%} by resolution {n // 2}")
        cur = _midpoint_W(table, D, M, n)
        if abs(cur - prev) <= rtol * abs(cur):
            break
        prev = cur
    scaled = float(np.prod(delta) * cur)
    return WattResult(V=int(V), scaled_W=scaled, ratio=V / scaled, resolution=n)
