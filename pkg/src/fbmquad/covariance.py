"""Closed-form covariance kernel of fractional Brownian motion on a uniform grid.

Every second-order quantity needed by the samplers and the Monte Carlo
experiments reduces to two closed forms: the kernel

    R(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2

and the stationary increment shape

    rho(p) = |p+1|^{2H} - 2|p|^{2H} + |p-1|^{2H},

the discrete second difference of x -> |x|^{2H}.  Nothing here is obtained by
numeric quadrature, so these functions double as the brute-force oracle for
the path generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

#: Largest number of increments for which a dense Gram matrix is materialized.
GRAM_CAP_DEFAULT = 4096

#: Sum families supported by :func:`abs_power_sum`.
SUM_KINDS = ("level", "midpoint", "increment")


def floor_index(n: int, t: float) -> int:
    """floor(n*t), snapping up when the float product sits just below an integer."""
    v = n * t
    f = math.floor(v)
    if (f + 1) - v < 1e-9 * max(1.0, abs(v)):
        f += 1
    return f


@dataclass(frozen=True)
class HurstGrid:
    """Uniform partition {j/n : 0 <= j <= floor(nT)} of [0, T] with Hurst exponent H."""

    H: float
    n: int
    T: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.H < 1.0:
            raise ValueError(f"H must lie in the open interval (0, 1), got {self.H}")
        if self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")
        if self.num_increments < 2:
            raise ValueError("grid must have at least 3 points, i.e. floor(nT) >= 2")

    @property
    def num_increments(self) -> int:
        """Number of full increments on [0, T], i.e. floor(nT)."""
        return floor_index(self.n, self.T)

    def times(self) -> np.ndarray:
        """Grid points j/n for j = 0..floor(nT)."""
        return np.arange(self.num_increments + 1, dtype=np.float64) / self.n


def rho(p, H: float):
    """Second difference of |x|^{2H} at integer lag p (scalar or array).

    This is the autocorrelation shape of unit-spacing fractional Gaussian
    noise: rho(0) = 2, rho(p) = rho(-p), and every off-zero lag vanishes for
    Brownian motion (H = 1/2).
    """
    q = np.abs(np.asarray(p, dtype=np.float64))
    out = np.abs(q + 1.0) ** (2 * H) - 2.0 * q ** (2 * H) + np.abs(q - 1.0) ** (2 * H)
    if np.isscalar(p) or np.ndim(p) == 0:
        return float(out)
    return out


def cov(grid: HurstGrid, s: float, t: float) -> float:
    """Kernel R(s, t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2 for times in [0, T]."""
    _check_time(grid, s)
    _check_time(grid, t)
    H2 = 2.0 * grid.H
    gap = 0.0 if s == t else abs(t - s) ** H2
    return 0.5 * (s**H2 + t**H2 - gap)


def increment_cov(grid: HurstGrid, j: int, k: int) -> float:
    """Covariance of the j-th and k-th grid increments.

    Equals n^{-2H} * rho(j - k) / 2; in particular n^{-2H} on the diagonal and
    (2^{2H} - 2) / (2 n^{2H}) at lag one.  Depends on (j, k) only through
    |j - k| (increment stationarity).
    """
    _check_increment_index(grid, j)
    _check_increment_index(grid, k)
    return grid.n ** (-2.0 * grid.H) * rho(j - k, grid.H) / 2.0


def increment_level_cov(grid: HurstGrid, j: int, t: float) -> float:
    """Covariance of the j-th increment with the path level at time t."""
    _check_increment_index(grid, j)
    return cov(grid, (j + 1) / grid.n, t) - cov(grid, j / grid.n, t)


def increment_midpoint_cov(grid: HurstGrid, j: int, k: int) -> float:
    """Covariance of the j-th increment with the k-th midpoint level (B_k + B_{k+1})/2."""
    _check_increment_index(grid, j)
    _check_increment_index(grid, k)
    n = grid.n
    return 0.5 * (increment_level_cov(grid, j, k / n) + increment_level_cov(grid, j, (k + 1) / n))


def abs_power_sum(grid: HurstGrid, kind: str, r: int, fixed=None) -> float:
    """Row sum sum_j |c_j|^r of one family of increment covariances.

    kind selects the family, with ``fixed`` supplying its parameter:

    - ``"level"``: c_j = Cov(increment j, level at fixed time s), fixed = s;
    - ``"midpoint"``: c_j = Cov(increment j, its own midpoint level), fixed unused;
    - ``"increment"``: c_j = Cov(increment j, increment k), fixed = k.

    These sums decay like n^{-2(r-1)H} (level/midpoint) and n^{-2rH}
    (increment) for H < 1/2; the experiments check the decay empirically.
    """
    if kind not in SUM_KINDS:
        raise ValueError(f"kind must be one of {SUM_KINDS}, got {kind!r}")
    if r < 1:
        raise ValueError(f"power r must be a positive integer, got {r}")
    m = grid.num_increments
    if kind == "level":
        s = float(fixed)
        _check_time(grid, s)
        terms = _level_cov_vector(grid, s)
    elif kind == "midpoint":
        nodes = grid.times()
        left = _level_cov_profile(grid, nodes[:-1])
        right = _level_cov_profile(grid, nodes[1:])
        terms = 0.5 * (left + right)
    else:
        k = int(fixed)
        _check_increment_index(grid, k)
        lags = np.arange(m) - k
        terms = grid.n ** (-2.0 * grid.H) * rho(lags, grid.H) / 2.0
    return float(np.sum(np.abs(terms) ** r))


def increment_gram(grid: HurstGrid, cap: int = GRAM_CAP_DEFAULT) -> np.ndarray:
    """Dense Gram matrix [Cov(increment j, increment k)], materialized up to ``cap``.

    The matrix is Toeplitz by stationarity; above the cap callers should work
    with lag-indexed values from :func:`rho` instead.  The returned array is
    cached and read-only.
    """
    m = grid.num_increments
    if m > cap:
        raise ValueError(f"grid has {m} increments, above the Gram cap {cap}")
    return _gram_cached(grid)


def fgn_autocov(grid: HurstGrid, max_lag: int | None = None) -> np.ndarray:
    """Autocovariance gamma(k) = n^{-2H} rho(k)/2 of the increment sequence, k = 0..max_lag."""
    if max_lag is None:
        max_lag = grid.num_increments
    lags = np.arange(max_lag + 1)
    return grid.n ** (-2.0 * grid.H) * rho(lags, grid.H) / 2.0


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _check_time(grid: HurstGrid, t: float) -> None:
    if not 0.0 <= t <= grid.T:
        raise ValueError(f"time {t} outside [0, {grid.T}]")


def _check_increment_index(grid: HurstGrid, j: int) -> None:
    if not 0 <= j <= grid.num_increments - 1:
        raise IndexError(f"increment index {j} outside 0..{grid.num_increments - 1}")


def _level_cov_profile(grid: HurstGrid, s_values: np.ndarray) -> np.ndarray:
    """Cov(increment j, level at s_j) for a per-increment vector of times."""
    H2 = 2.0 * grid.H
    t = grid.times()
    lo, hi = t[:-1], t[1:]

    def kernel(a, b):
        return 0.5 * (a**H2 + b**H2 - np.abs(a - b) ** H2)

    return kernel(hi, s_values) - kernel(lo, s_values)


def _level_cov_vector(grid: HurstGrid, s: float) -> np.ndarray:
    """Cov(increment j, level at the single time s) for every increment j."""
    m = grid.num_increments
    return _level_cov_profile(grid, np.full(m, s))


@lru_cache(maxsize=8)
def _gram_cached(grid: HurstGrid) -> np.ndarray:
    m = grid.num_increments
    row = grid.n ** (-2.0 * grid.H) * rho(np.arange(m), grid.H) / 2.0
    idx = np.arange(m)
    gram = row[np.abs(idx[:, None] - idx[None, :])]
    gram.setflags(write=False)
    return gram
