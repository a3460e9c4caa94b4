"""Closed-form predictions for grown hypergraph statistics.

Finite-size formulas are evaluated in exact rational arithmetic (including
gamma-function ratios at rational redirection probability, via rising
factorials); asymptotic expansions are separate, clearly named float
functions so exact and asymptotic claims are never conflated.  Formulas
with a finite validity window raise :class:`OutOfValidityError` outside it
instead of returning a wrong value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .special_numbers import (
    bernoulli,
    binomial,
    eulerian_row,
    harmonic,
    rising_factorial,
    stirling1_row,
)

EULER_GAMMA = float(np.euler_gamma)


class OutOfValidityError(ValueError):
    """A closed form was queried outside its validity window."""


@dataclass(frozen=True)
class ExactDistribution:
    """Probability distribution on consecutive integers, exact rationals."""

    lo: int
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if sum(self.probs) != 1:
            raise ValueError("probabilities must sum to exactly 1")

    @property
    def support(self) -> range:
        return range(self.lo, self.lo + len(self.probs))

    def prob(self, x: int) -> Fraction:
        if self.lo <= x < self.lo + len(self.probs):
            return self.probs[x - self.lo]
        return Fraction(0)

    def items(self):
        for x, p in zip(self.support, self.probs):
            yield x, p

    def raw_moment(self, p: int) -> Fraction:
        return sum((Fraction(x) ** p) * w for x, w in self.items())

    def mean(self) -> Fraction:
        return self.raw_moment(1)

    def central_moment(self, p: int) -> Fraction:
        m = self.mean()
        return sum((Fraction(x) - m) ** p * w for x, w in self.items())

    def variance(self) -> Fraction:
        return self.central_moment(2)

    def cumulant(self, p: int) -> Fraction:
        """Exact cumulant from raw moments (kappa_1 = mean)."""
        if p < 1:
            raise ValueError("p must be >= 1")
        raw = [self.raw_moment(j) for j in range(p + 1)]
        kappa = [Fraction(0)] * (p + 1)
        for j in range(1, p + 1):
            kappa[j] = raw[j] - sum(
                binomial(j - 1, i - 1) * kappa[i] * raw[j - i] for i in range(1, j)
            )
        return kappa[p]

    def to_float_dict(self) -> dict[int, float]:
        return {x: float(w) for x, w in self.items()}


def _require(cond: bool, msg: str):
    if not cond:
        raise OutOfValidityError(msg)


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


# ---------------------------------------------------------------------------
# degree-one counts

def p1_distribution(N: int) -> ExactDistribution:
    """Distribution of the number of degree-one vertices at size N,
    an Eulerian-number row divided by (N-1)!."""
    _require(N >= 1, "N must be >= 1")
    if N == 1:
        return ExactDistribution(1, (Fraction(1),))
    row = eulerian_row(N - 1)
    fact = math.factorial(N - 1)
    return ExactDistribution(1, tuple(Fraction(v, fact) for v in row))


def n1_mean(N: int) -> Fraction:
    _require(N >= 2, "mean formula N/2 needs N >= 2")
    return Fraction(N, 2)


def n1_moment(p: int, N: int) -> Fraction:
    """Raw moments p = 1..4 of the degree-one count, closed forms."""
    if p == 1:
        return n1_mean(N)
    if p == 2:
        _require(N >= 3, "second moment formula needs N >= 3")
        return Fraction(N * (3 * N + 1), 12)
    if p == 3:
        _require(N >= 3, "third moment formula needs N >= 3")
        return Fraction(N * N * (N + 1), 8)
    if p == 4:
        _require(N >= 5, "fourth moment formula needs N >= 5")
        return Fraction(N * (15 * N**3 + 30 * N**2 + 5 * N - 2), 240)
    raise ValueError("closed-form moments implemented for p = 1..4")


def n1_variance(N: int) -> Fraction:
    _require(N >= 3, "variance N/12 needs N >= 3")
    return Fraction(N, 12)


def n1_cumulant(p: int, N: int) -> Fraction:
    """Cumulants are B_p N / p while p < N; beyond that window fall back
    to the exact distribution."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if p < N:
        return bernoulli(p) * N / p
    return p1_distribution(N).cumulant(p)


# ---------------------------------------------------------------------------
# mean degree counts

def nk_mean(k: int, N: int) -> Fraction:
    """Mean number of degree-k vertices: N/(k(k+1)) for k < N, 1 for k = N."""
    _require(1 <= k <= N, "k must lie in 1..N")
    if k == N:
        return Fraction(1)
    return Fraction(N, k * (k + 1))


def nk_fraction(k: int) -> Fraction:
    """Stationary fraction of degree-k vertices, 1/(k(k+1))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(1, k * (k + 1))


# ---------------------------------------------------------------------------
# degree-two fluctuations
#
# These closed forms come from a one-step case analysis that treats "the
# chosen edge holds a degree-one vertex" and "... a degree-two vertex" as
# exclusive events.  They are not: an edge can contain a childless tip
# (degree one) together with its parent (degree two), and then the two
# degree-count moves cancel within a single step.  The forms are therefore
# exact only at their anchor size N = 4 (where they were calibrated);
# brute-force enumeration gives the true values for larger N (see the
# oracle tests).  They are kept here as the documented predictions and are
# not used as Monte Carlo verdicts beyond the anchors.

def _inv_poch(N: int) -> Fraction:
    return Fraction(1, (N - 1) * (N - 2) * (N - 3))


def n1n2_mean(N: int) -> Fraction:
    _require(N >= 4, "mixed moment formula needs N >= 4")
    return Fraction(N * (N - 1), 12) + _inv_poch(N)


def n1n2_centered(N: int) -> Fraction:
    _require(N >= 4, "centered mixed moment formula needs N >= 4")
    return Fraction(-N, 12) + _inv_poch(N)


def n2_second_moment(N: int) -> Fraction:
    _require(N >= 5, "second moment formula needs N >= 5")
    return Fraction(N * (5 * N + 23), 180) + _inv_poch(N)


def n2_variance(N: int) -> Fraction:
    _require(N >= 5, "variance formula needs N >= 5")
    return Fraction(23 * N, 180) + _inv_poch(N)


def n2_second_order(N: int) -> dict[str, Fraction]:
    """The four degree-two second-order quantities at size N >= 5."""
    return {
        "n1n2_mean": n1n2_mean(N),
        "n1n2_centered": n1n2_centered(N),
        "n2_second_moment": n2_second_moment(N),
        "n2_variance": n2_variance(N),
    }


#: Linear growth rates of centered second moments of degree counts, as
#: printed in the source analysis.  Only (1,1) is exact (the degree-one
#: count is an autonomous chain); (1,2) and (2,2) inherit the case-analysis
#: issue described above, and simulation converges to about -0.0413 and
#: 0.0777 instead.
NU_CONSTANTS = {
    (1, 1): Fraction(1, 12),
    (1, 2): Fraction(-1, 12),
    (2, 2): Fraction(23, 180),
}


# ---------------------------------------------------------------------------
# ranks

def rank2_distribution(N: int) -> ExactDistribution:
    """Distribution of the number of rank-two vertices at size N,
    a row of Stirling numbers of the first kind over (N-1)!."""
    _require(N >= 2, "rank-two counts need N >= 2")
    row = stirling1_row(N - 1)
    fact = math.factorial(N - 1)
    return ExactDistribution(1, tuple(Fraction(v, fact) for v in row[1:]))


def rank2_mean(N: int) -> Fraction:
    _require(N >= 1, "N must be >= 1")
    return harmonic(N - 1)


def rank2_second_moment(N: int) -> Fraction:
    _require(N >= 2, "N must be >= 2")
    h = harmonic(N - 1)
    return h * h + h - harmonic(N - 1, 2)


def rank2_variance(N: int) -> Fraction:
    _require(N >= 2, "N must be >= 2")
    return harmonic(N - 1) - harmonic(N - 1, 2)


def rank_mean(k: int, N: int) -> Fraction:
    """Mean number of rank-k vertices, exact, by iterating the one-step
    recurrence from the primordial hypergraph."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require(N >= 1, "N must be >= 1")
    if k == 1:
        return Fraction(1)
    if k > N:
        return Fraction(0)
    vals = [Fraction(0)] * (k + 1)
    vals[1] = Fraction(1)
    for size in range(1, N):
        for j in range(min(k, size + 1), 1, -1):
            vals[j] += vals[j - 1] / size
    return vals[k]


def rank_mean_via_sum(k: int, N: int) -> Fraction:
    """Independent closed sum: the elementary symmetric polynomial
    e_{k-1}(1, 1/2, ..., 1/(N-1))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require(N >= 1, "N must be >= 1")
    if k > N:
        return Fraction(0)
    coeffs = [Fraction(0)] * k
    coeffs[0] = Fraction(1)
    for j in range(1, N):
        inv = Fraction(1, j)
        for d in range(min(k - 1, j), 0, -1):
            coeffs[d] += coeffs[d - 1] * inv
    return coeffs[k - 1]


def rank3_mean(N: int) -> Fraction:
    """Closed form via harmonic numbers: (H^2 - H^(2))/2 at N-1."""
    _require(N >= 1, "N must be >= 1")
    h = harmonic(N - 1)
    return (h * h - harmonic(N - 1, 2)) / 2


def rank_n_mean(N: int) -> Fraction:
    """Mean number of vertices with the maximal possible rank N."""
    _require(N >= 1, "N must be >= 1")
    return Fraction(1, math.factorial(N - 1))


def rank_mean_float(k: int, N: int) -> float:
    """Same recurrence as :func:`rank_mean` run in float64, for sizes where
    exact rationals are impractical."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require(N >= 1, "N must be >= 1")
    if k == 1:
        return 1.0
    if k > N:
        return 0.0
    inv = 1.0 / np.arange(1, N, dtype=np.float64)
    prev = np.ones(N - 1, dtype=np.float64)  # rank-(level) means at sizes 1..N-1
    level = 1
    while True:
        csum = np.cumsum(prev * inv)
        level += 1
        if level == k:
            return float(csum[-1])
        prev = np.concatenate(([0.0], csum[:-1]))


def rank_mean_asymptotic(k: int, N: int) -> float:
    """Three-term large-N expansion of the mean number of rank-k vertices:
    (ln N)^j/j! with j = k-1, plus the two sub-leading corrections."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if N < 2:
        raise ValueError("N must be >= 2")
    ln = math.log(N)
    g = EULER_GAMMA
    c2 = (6.0 * g * g - math.pi**2) / 12.0
    out = 0.0
    for coef, j in ((1.0, k - 1), (g, k - 2), (c2, k - 3)):
        if j >= 0:
            out += coef * ln**j / math.factorial(j)
    return out


def rank2_asymptotic_refined(N: int) -> float:
    """ln N + gamma - 1/(2N), accurate to O(N^-2)."""
    return math.log(N) + EULER_GAMMA - 1.0 / (2 * N)


def rank3_asymptotic_refined(N: int) -> float:
    """Rank-three mean expansion including the 1/N correction term."""
    ln = math.log(N)
    g = EULER_GAMMA
    return 0.5 * ln * ln + g * ln + 0.5 * g * g - math.pi**2 / 12 + (1 - g * ln) / N


# ---------------------------------------------------------------------------
# degree of the m-th vertex

def vertex_degree_distribution(m: int, N: int) -> ExactDistribution:
    """Distribution of the degree of the m-th vertex at size N >= m >= 2;
    uniform for m = 2, and generally a ratio of falling factorials."""
    _require(m >= 2, "the primordial vertex has deterministic degree")
    _require(N >= m, "vertex m exists only for N >= m")

    def falling(a: int, terms: int) -> int:
        out = 1
        for t in range(terms):
            out *= a - t
        return out

    den = falling(N - 1, m - 1)
    probs = tuple(
        Fraction((m - 1) * falling(N - d - 1, m - 2), den)
        for d in range(1, N - m + 2)
    )
    return ExactDistribution(1, probs)


# ---------------------------------------------------------------------------
# leaders

def quickest_leader_prob(m: int) -> Fraction:
    """Probability that vertex m reaches degree > floor(N/2) by the quickest
    route and keeps it forever: [2^(m-1) (m-1)!]^-2."""
    if m < 2:
        raise ValueError("m must be >= 2")
    return Fraction(1, (2 ** (m - 1) * math.factorial(m - 1)) ** 2)


def leader_bound_sum() -> float:
    """Sum of the quickest-route probabilities over m >= 2 (a lower bound
    on the total persistent-leader probability), I_0(1) - 1 = 0.2660..."""
    total, m = 0.0, 2
    while True:
        term = float(quickest_leader_prob(m))
        total += term
        if term < 1e-18:
            return total
        m += 1


# ---------------------------------------------------------------------------
# leaves

def leaves_distribution(N: int, _max_exact: int = 600) -> ExactDistribution:
    """Exact distribution of the number of leaves at size N, by iterating
    the one-step balance equation from the deterministic small sizes."""
    _require(N >= 1, "N must be >= 1")
    if N > _max_exact:
        raise OutOfValidityError(
            f"exact leaves distribution capped at N={_max_exact}; "
            "use leaves_distribution_floats for larger sizes"
        )
    if N == 1:
        return ExactDistribution(0, (Fraction(1),))
    if N == 2:
        return ExactDistribution(1, (Fraction(1),))
    probs = [Fraction(0)] * N  # support 0..N-1
    probs[0] = Fraction(1, 2)
    probs[2] = Fraction(1, 2)
    for size in range(3, N):
        nxt = [Fraction(0)] * N
        for k in range(size):
            w = probs[k]
            if w == 0:
                continue
            nxt[k] += w * (size - k - 1) / size
            nxt[k + 1] += w / size
            if k >= 1:
                nxt[k - 1] += w * k / size
        probs = nxt
    return ExactDistribution(0, tuple(probs))


def leaves_distribution_floats(N: int, kmax: int = 64) -> np.ndarray:
    """Float iteration of the same balance equation, truncated at kmax
    (mass beyond is far below double precision for any N)."""
    _require(N >= 3, "float iteration starts at N = 3")
    probs = np.zeros(kmax + 1)
    probs[0] = 0.5
    probs[2] = 0.5
    k = np.arange(kmax + 1)
    for size in range(3, N):
        stay = probs * (size - k - 1) / size
        up = np.concatenate(([0.0], probs[:-1])) / size
        down = np.concatenate((probs[1:] * k[1:], [0.0])) / size
        probs = stay + up + down
    return probs


def leaves_mean(N: int) -> Fraction:
    """Mean number of leaves: 0, 1, then exactly 1 for every N >= 3."""
    _require(N >= 1, "N must be >= 1")
    return Fraction(1) if N >= 2 else Fraction(0)


def leaves_limit(k: int) -> float:
    """Large-N limit of the leaf-count distribution: e^-1 / k!."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.exp(-1) / math.factorial(k)


# ---------------------------------------------------------------------------
# redirection deformation (exact for rational r, float fallback otherwise)

def redirect_n1_mean(N: int, r):
    """Mean number of degree-one vertices under redirection probability r."""
    _require(N >= 2, "formula needs N >= 2")
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    if _is_rational(r):
        r = Fraction(r)
        gamma_ratio = rising_factorial(r, N - 1) / math.factorial(N - 1)
        return Fraction(N) / (2 - r) - gamma_ratio / (2 - r)
    # float path: Gamma(N-1+r)/(Gamma(r) Gamma(N)) via lgamma, r in (0,1]
    if r == 0.0:
        return float(N) / 2
    logratio = math.lgamma(N - 1 + r) - math.lgamma(r) - math.lgamma(N)
    return N / (2 - r) - math.exp(logratio) / (2 - r)


def redirect_n1_fraction(r):
    """Stationary fraction of degree-one vertices, 1/(2-r)."""
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    return Fraction(1) / (2 - Fraction(r)) if _is_rational(r) else 1.0 / (2 - r)


def redirect_nk_fraction(k: int, r):
    """Stationary fraction of degree-k vertices, (1-r)/((k-r+1)(k-r))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    if r == 1:
        # always-redirect limit: a star, all mass at degree one
        one = Fraction(1) if _is_rational(r) else 1.0
        return one if k == 1 else one * 0
    if _is_rational(r):
        r = Fraction(r)
    return (1 - r) / ((k - r + 1) * (k - r))


def redirect_rank2_mean(N: int, r):
    """Mean number of rank-two vertices under redirection, exact via
    rising-factorial gamma ratios for rational r."""
    _require(N >= 1, "N must be >= 1")
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    if r == 0:
        return rank2_mean(N) if _is_rational(r) else float(rank2_mean(N))
    if _is_rational(r):
        r = Fraction(r)
        ratio = rising_factorial(1 + r, N - 1) / math.factorial(N - 1)
        return (ratio - 1) / r
    logratio = math.lgamma(N + r) - math.lgamma(1 + r) - math.lgamma(N)
    return (math.exp(logratio) - 1.0) / r


def redirect_rank_mean(k: int, N: int, r) -> Fraction:
    """Mean number of rank-k vertices under redirection, exact recurrence.

    The rank-two inflow is special (the primordial edge never redirects),
    higher ranks gain (1-r) of the ordinary inflow plus r leakage from
    their own children.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _require(N >= 1, "N must be >= 1")
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    if not _is_rational(r):
        raise ValueError("exact redirect recurrence needs rational r")
    r = Fraction(r)
    if k == 1:
        return Fraction(1)
    if k > N:
        return Fraction(0)
    vals = [Fraction(0)] * (k + 1)
    vals[1] = Fraction(1)
    for size in range(1, N):
        for j in range(min(k, size + 1), 1, -1):
            inflow = vals[j - 1] if j == 2 else (1 - r) * vals[j - 1]
            vals[j] = (1 + r / size) * vals[j] + inflow / size
    return vals[k]


def redirect_rank_asymptotic(k: int, N: int, r: float) -> float:
    """Leading large-N growth of the mean number of rank-k vertices at
    redirection 0 < r < 1: N^r/(r Gamma(1+r)) x [(1-r) ln N]^(k-2)/(k-2)!."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0 < r < 1:
        raise ValueError("asymptotic valid for 0 < r < 1")
    r = float(r)
    lead = N**r / (r * math.gamma(1 + r))
    j = k - 2
    return lead * ((1 - r) * math.log(N)) ** j / math.factorial(j)


# ---------------------------------------------------------------------------
# constants table

@dataclass(frozen=True)
class OracleConstant:
    name: str
    value: Fraction | float
    validity: str


def oracle_constants() -> list[OracleConstant]:
    """Named constants used across the predictions."""
    out = [
        OracleConstant("nu_1_1", NU_CONSTANTS[(1, 1)],
                       "lim N->inf var(N_1)/N, exact"),
        OracleConstant("nu_1_2", NU_CONSTANTS[(1, 2)],
                       "printed rate for cov(N_1,N_2)/N; case analysis "
                       "ignores same-edge cancellations, simulation gives "
                       "~ -0.0413"),
        OracleConstant("nu_2_2", NU_CONSTANTS[(2, 2)],
                       "printed rate for var(N_2)/N; case analysis ignores "
                       "same-edge cancellations, simulation gives ~ 0.0777"),
        OracleConstant("euler_gamma", EULER_GAMMA, "harmonic asymptotics"),
        OracleConstant("zeta_2", math.pi**2 / 6, "generalized harmonic limit, p=2"),
        OracleConstant("leaves_limit_amplitude", math.exp(-1),
                       "leaf distribution limit amplitude"),
        OracleConstant("leader_bound_sum", leader_bound_sum(),
                       "sum of quickest-leader probabilities, m >= 2"),
    ]
    for p in range(1, 13):
        out.append(
            OracleConstant(f"kappa_{p}", bernoulli(p) / p,
                           f"degree-one cumulant rate, valid for N > {p}")
        )
    for m in (2, 3, 4):
        out.append(
            OracleConstant(f"quickest_leader_{m}", quickest_leader_prob(m),
                           "infinite-horizon event probability")
        )
    return out
