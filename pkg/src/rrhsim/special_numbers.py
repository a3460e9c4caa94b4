"""Exact integer/rational special numbers: Eulerian numbers, unsigned
Stirling numbers of the first kind, Bernoulli numbers (B1 = +1/2
convention), binomials, and generalized harmonic numbers.

Everything here is exact (Python ints / Fraction); the ``log_*`` variants
are the float companions for arguments too large for exact work, good to
about 1e-12 relative error.

Rows are memoized append-only: growth happens under a lock, reads are
lock-free, so concurrent readers are safe and values are immutable.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import numpy as np

_NEG_INF = float("-inf")


class _RowCache:
    """Append-only cache of rows 0..N built by a one-step extension rule."""

    def __init__(self, first_row, extend):
        self._rows = [first_row]
        self._extend = extend
        self._lock = threading.Lock()

    def row(self, n):
        rows = self._rows
        if n < len(rows):
            return rows[n]
        with self._lock:
            while n >= len(self._rows):
                self._rows.append(self._extend(len(self._rows), self._rows[-1]))
            return self._rows[n]


def _euler_extend(n, prev):
    # <n,m> = (n-m)<n-1,m-1> + (m+1)<n-1,m>,  m = 0..n-1
    # prev stores exactly the support of row n-1 (length max(n-1, 1))
    return tuple(
        (n - m) * (prev[m - 1] if 1 <= m <= len(prev) else 0)
        + (m + 1) * (prev[m] if m < len(prev) else 0)
        for m in range(n)
    )


def _stirling_extend(n, prev):
    # [n,k] = [n-1,k-1] + (n-1)[n-1,k],  k = 0..n
    return tuple(
        (prev[k - 1] if k >= 1 else 0)
        + (n - 1) * (prev[k] if k <= n - 1 else 0)
        for k in range(n + 1)
    )


_EULER = _RowCache((1,), _euler_extend)
_STIRLING = _RowCache((1,), _stirling_extend)


def eulerian_row(n: int) -> tuple[int, ...]:
    """Row <n,0>..<n,max(n,1)-1> of the Eulerian triangle."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _EULER.row(n)


def eulerian(n: int, m: int) -> int:
    """Eulerian number <n,m>; 0 outside 0 <= m < max(n,1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if m < 0 or m >= max(n, 1):
        return 0
    return _EULER.row(n)[m]


def stirling1_row(n: int) -> tuple[int, ...]:
    """Row [n,0]..[n,n] of unsigned Stirling numbers of the first kind."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _STIRLING.row(n)


def stirling_first(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind [n,k]; 0 outside 0..n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if k < 0 or k > n:
        return 0
    return _STIRLING.row(n)[k]


def binomial(n: int, k: int) -> int:
    """Binomial coefficient; 0 outside 0 <= k <= n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


class _BernoulliCache:
    """Computes in the B1 = -1/2 convention (where the classical recurrence
    holds); the sign flip to B1 = +1/2 happens only on lookup."""

    def __init__(self):
        self._vals = [Fraction(1)]
        self._lock = threading.Lock()

    def get(self, p):
        vals = self._vals
        if p < len(vals):
            return vals[p]
        with self._lock:
            while p >= len(self._vals):
                m = len(self._vals)
                # B_m = -(sum_{j<m} C(m+1,j) B_j)/(m+1)
                s = sum(
                    Fraction(math.comb(m + 1, j)) * self._vals[j] for j in range(m)
                )
                self._vals.append(-s / (m + 1))
            return self._vals[p]


_BERNOULLI = _BernoulliCache()


def bernoulli(p: int) -> Fraction:
    """Bernoulli number B_p under the convention B1 = +1/2."""
    if p < 0:
        raise ValueError("p must be >= 0")
    if p == 1:
        return Fraction(1, 2)
    return _BERNOULLI.get(p)


class _HarmonicCache:
    def __init__(self):
        self._sums: dict[int, list[Fraction]] = {}
        self._lock = threading.Lock()

    def get(self, n, p):
        sums = self._sums.get(p)
        if sums is not None and n < len(sums):
            return sums[n]
        with self._lock:
            sums = self._sums.setdefault(p, [Fraction(0)])
            while n >= len(sums):
                i = len(sums)
                sums.append(sums[-1] + Fraction(1, i**p))
            return sums[n]


_HARMONIC = _HarmonicCache()


def harmonic(n: int, p: int = 1) -> Fraction:
    """Generalized harmonic number H_n^(p) = sum_{i<=n} i**-p."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if p < 1:
        raise ValueError("p must be >= 1")
    return _HARMONIC.get(n, p)


def _log_euler_extend(n, prev):
    size = len(prev)  # support length of row n-1
    m = np.arange(n, dtype=np.float64)
    left = np.full(n, _NEG_INF)
    right = np.full(n, _NEG_INF)
    hi = min(n, size + 1)
    left[1:hi] = np.log(n - m[1:hi]) + prev[: hi - 1]
    hi = min(n, size)
    right[:hi] = np.log(m[:hi] + 1.0) + prev[:hi]
    out = np.logaddexp(left, right)
    out.flags.writeable = False
    return out


def _log_stirling_extend(n, prev):
    left = np.full(n + 1, _NEG_INF)
    right = np.full(n + 1, _NEG_INF)
    left[1:] = prev
    if n >= 2:
        right[:n] = math.log(n - 1) + prev
    out = np.logaddexp(left, right)
    out.flags.writeable = False
    return out


def _frozen(arr):
    arr.flags.writeable = False
    return arr


_LOG_EULER = _RowCache(_frozen(np.zeros(1)), _log_euler_extend)
_LOG_STIRLING = _RowCache(_frozen(np.zeros(1)), _log_stirling_extend)


def log_eulerian(n: int, m: int) -> float:
    """log <n,m> as a float (relative error ~1e-12); -inf where <n,m> = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if m < 0 or m >= max(n, 1):
        return _NEG_INF
    return float(_LOG_EULER.row(n)[m])


def log_stirling_first(n: int, k: int) -> float:
    """log [n,k] as a float (relative error ~1e-12); -inf where [n,k] = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if k < 0 or k > n or (n >= 1 and k == 0):
        return _NEG_INF
    return float(_LOG_STIRLING.row(n)[k])


def rising_factorial(x: Fraction, n: int) -> Fraction:
    """(x)_n = x (x+1) ... (x+n-1), exact for rational x."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = Fraction(x)
    num = 1
    a, b = x.numerator, x.denominator
    for j in range(n):
        num *= a + j * b
    return Fraction(num, b**n)
