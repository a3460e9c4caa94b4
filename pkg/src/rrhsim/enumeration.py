"""Brute-force exact oracle: enumerate every growth history with its exact
rational weight for small sizes and push any statistic through the history
distribution, independently of the closed forms.

Histories are streamed depth-first (memory O(n)); weights over all
reachable histories of a given model and size sum to exactly 1.  The hard
cap at n = 9 keeps the worst case at 8! = 40320 histories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .oracle import ExactDistribution

ENUM_CAP = 9

STATISTICS = (
    "degree_count",
    "rank_count",
    "joint_n123",
    "leaves",
    "vertex_degree",
    "leader",
    "n_vertices",
)


@dataclass(frozen=True)
class WeightedHistory:
    """One growth history: parents (sources) of ids 2..n and its weight.
    ``grown`` marks vertex-adding steps and is present only for the
    duplication model."""

    parents: tuple[int, ...]
    weight: Fraction
    grown: tuple[int, ...] | None = None


def _check_cap(n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ENUM_CAP:
        raise ValueError(f"enumeration capped at n = {ENUM_CAP}")


def _rational(x, name: str) -> Fraction:
    if isinstance(x, float):
        raise TypeError(f"{name} must be rational (int/Fraction) for exact weights")
    return Fraction(x)


def enumerate_histories(model: str, n: int, r=None, mu=None) -> Iterator[WeightedHistory]:
    """Stream every reachable history of the model with its exact weight."""
    _check_cap(n)
    if model == "rrh":
        yield from _enum_rrh(n)
    elif model == "redirect":
        yield from _enum_redirect(n, _rational(0 if r is None else r, "r"))
    elif model == "choice-smaller":
        yield from _enum_choice(n)
    elif model == "duplicate":
        yield from _enum_duplicate(n, _rational(0 if mu is None else mu, "mu"))
    else:
        raise ValueError(f"unknown model {model!r}")


def _enum_rrh(n: int) -> Iterator[WeightedHistory]:
    w = Fraction(1, math.factorial(n - 1))
    parents = [0] * (n + 1)

    def rec(i: int):
        if i > n:
            yield WeightedHistory(tuple(parents[2:]), w)
            return
        for p in range(1, i):
            parents[i] = p
            yield from rec(i + 1)

    yield from rec(2)


def _enum_redirect(n: int, r: Fraction) -> Iterator[WeightedHistory]:
    parents = [0] * (n + 1)

    def step_weights(i: int) -> dict[int, Fraction]:
        # pick e uniformly; keep it w.p. 1-r, else its maternal edge
        # (the primordial edge has none and is kept outright)
        pick = Fraction(1, i - 1)
        out: dict[int, Fraction] = {}
        for e in range(1, i):
            if e == 1:
                out[1] = out.get(1, Fraction(0)) + pick
            else:
                out[e] = out.get(e, Fraction(0)) + pick * (1 - r)
                pe = parents[e]
                out[pe] = out.get(pe, Fraction(0)) + pick * r
        return out

    def rec(i: int, w: Fraction):
        if i > n:
            yield WeightedHistory(tuple(parents[2:]), w)
            return
        for p, pw in step_weights(i).items():
            if pw == 0:
                continue
            parents[i] = p
            yield from rec(i + 1, w * pw)

    yield from rec(2, Fraction(1))


def _enum_choice(n: int) -> Iterator[WeightedHistory]:
    parents = [0] * (n + 1)
    depth = [0] * (n + 1)

    def step_weights(i: int) -> dict[int, Fraction]:
        # two draws with replacement, strictly smaller edge wins, fair tie
        pair = Fraction(1, (i - 1) ** 2)
        half = Fraction(1, 2)
        out: dict[int, Fraction] = {}
        for e1 in range(1, i):
            for e2 in range(1, i):
                if depth[e1] < depth[e2]:
                    out[e1] = out.get(e1, Fraction(0)) + pair
                elif depth[e2] < depth[e1]:
                    out[e2] = out.get(e2, Fraction(0)) + pair
                else:
                    out[e1] = out.get(e1, Fraction(0)) + pair * half
                    out[e2] = out.get(e2, Fraction(0)) + pair * half
        return out

    def rec(i: int, w: Fraction):
        if i > n:
            yield WeightedHistory(tuple(parents[2:]), w)
            return
        for p, pw in step_weights(i).items():
            parents[i] = p
            depth[i] = depth[p] + 1
            yield from rec(i + 1, w * pw)

    yield from rec(2, Fraction(1))


def _enum_duplicate(n_edges: int, mu: Fraction) -> Iterator[WeightedHistory]:
    src = [0] * (n_edges + 1)
    grown = [0] * (n_edges + 1)
    grown[1] = 1

    def rec(j: int, w: Fraction):
        if j > n_edges:
            yield WeightedHistory(tuple(src[2:]), w, tuple(grown[2:]))
            return
        pick = Fraction(1, j - 1)
        for e in range(1, j):
            for g, gw in ((1, 1 - mu), (0, mu)):
                if gw == 0:
                    continue
                src[j] = e
                grown[j] = g
                yield from rec(j + 1, w * pick * gw)

    yield from rec(2, Fraction(1))


# ---------------------------------------------------------------------------
# statistics of a single history (pure-int helpers, no arrays needed here)

def _sizes_depths(parents: tuple[int, ...]) -> tuple[list[int], list[int]]:
    n = len(parents) + 1
    size = [1] * (n + 1)
    depth = [0] * (n + 1)
    size[0] = 0
    for i in range(2, n + 1):
        depth[i] = depth[parents[i - 2]] + 1
    for i in range(n, 1, -1):
        size[parents[i - 2]] += size[i]
    return size, depth


def _history_value(h: WeightedHistory, statistic: str, k, m):
    parents = h.parents
    n = len(parents) + 1
    if h.grown is not None:
        grown = (1,) + h.grown
        if statistic == "n_vertices":
            return sum(grown)
        if statistic == "degree_count":
            size, _ = _sizes_depths(parents)
            return sum(
                1 for i in range(1, n + 1) if grown[i - 1] and size[i] == k
            )
        raise ValueError(f"statistic {statistic!r} not defined for duplicate model")

    size, depth = _sizes_depths(parents)
    if statistic == "degree_count":
        return sum(1 for i in range(1, n + 1) if size[i] == k)
    if statistic == "rank_count":
        return sum(1 for i in range(1, n + 1) if depth[i] + 1 == k)
    if statistic == "joint_n123":
        return (
            sum(1 for i in range(1, n + 1) if size[i] == 1),
            sum(1 for i in range(1, n + 1) if size[i] == 2),
            sum(1 for i in range(1, n + 1) if size[i] == 3),
        )
    if statistic == "leaves":
        return sum(
            1 for i in range(2, n + 1) if parents[i - 2] == 1 and size[i] == 1
        )
    if statistic == "vertex_degree":
        if not 1 <= m <= n:
            raise ValueError("vertex index out of range")
        return size[m]
    if statistic == "leader":
        best = max(size[2:])
        ids = [i for i in range(2, n + 1) if size[i] == best]
        return (ids[0], len(ids) > 1)
    raise ValueError(f"unknown statistic {statistic!r}")


def exact_statistic_distribution(model: str, n: int, statistic: str,
                                 k: int | None = None, m: int | None = None,
                                 r=None, mu=None):
    """Exact pushforward of the history distribution through one statistic.

    Integer-valued statistics come back as :class:`ExactDistribution`;
    ``joint_n123`` and ``leader`` as a dict keyed by their tuple values.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    if statistic in ("degree_count", "rank_count") and k is None:
        raise ValueError("this statistic needs k")
    if statistic == "vertex_degree" and m is None:
        raise ValueError("this statistic needs m")
    acc: dict = {}
    for h in enumerate_histories(model, n, r=r, mu=mu):
        v = _history_value(h, statistic, k, m)
        acc[v] = acc.get(v, Fraction(0)) + h.weight
    if statistic in ("joint_n123", "leader"):
        return acc
    lo, hi = min(acc), max(acc)
    return ExactDistribution(
        lo, tuple(acc.get(x, Fraction(0)) for x in range(lo, hi + 1))
    )


@dataclass(frozen=True)
class EnumerationSummary:
    """Everything the exact-match validation needs from one enumeration
    pass: marginal distributions and exact means of the tracked counts."""

    model: str
    n: int
    r: Fraction | None
    total_weight: Fraction
    n1_dist: ExactDistribution
    r2_dist: ExactDistribution
    leaves_dist: ExactDistribution
    joint_n123: dict
    vertex_degree: dict
    mean_degree_counts: tuple[Fraction, ...]  # index k-1 for k = 1..n
    mean_rank_counts: tuple[Fraction, ...]
    mean_n1n2: Fraction


@lru_cache(maxsize=None)
def summarize(model: str, n: int, r: Fraction | None = None) -> EnumerationSummary:
    """One-pass enumeration computing all validation statistics at once
    (models whose history is a parent sequence)."""
    if model not in ("rrh", "redirect", "choice-smaller"):
        raise ValueError("summaries exist for the parent-sequence models")
    _check_cap(n)
    total = Fraction(0)
    n1_acc: dict = {}
    r2_acc: dict = {}
    lv_acc: dict = {}
    joint: dict = {}
    vdeg: dict = {mm: {} for mm in range(2, n + 1)}
    mean_deg = [Fraction(0)] * (n + 1)
    mean_rank = [Fraction(0)] * (n + 1)
    mean_n1n2 = Fraction(0)
    for h in enumerate_histories(model, n, r=r):
        w = h.weight
        total += w
        size, depth = _sizes_depths(h.parents)
        counts = [0] * (n + 1)
        rcounts = [0] * (n + 1)
        for i in range(1, n + 1):
            counts[size[i]] += 1
            rcounts[depth[i] + 1] += 1
        n1 = counts[1]
        n2 = counts[2] if n >= 2 else 0
        n3 = counts[3] if n >= 3 else 0
        rc2 = rcounts[2] if n >= 2 else 0
        n1_acc[n1] = n1_acc.get(n1, Fraction(0)) + w
        r2_acc[rc2] = r2_acc.get(rc2, Fraction(0)) + w
        lv = sum(1 for i in range(2, n + 1)
                 if h.parents[i - 2] == 1 and size[i] == 1)
        lv_acc[lv] = lv_acc.get(lv, Fraction(0)) + w
        key = (n1, n2, n3)
        joint[key] = joint.get(key, Fraction(0)) + w
        for mm in range(2, n + 1):
            d = size[mm]
            vdeg[mm][d] = vdeg[mm].get(d, Fraction(0)) + w
        for kk in range(1, n + 1):
            mean_deg[kk] += w * counts[kk]
            mean_rank[kk] += w * rcounts[kk]
        mean_n1n2 += w * n1 * n2

    def to_dist(acc):
        lo, hi = min(acc), max(acc)
        return ExactDistribution(
            lo, tuple(acc.get(x, Fraction(0)) for x in range(lo, hi + 1))
        )

    return EnumerationSummary(
        model=model,
        n=n,
        r=r,
        total_weight=total,
        n1_dist=to_dist(n1_acc),
        r2_dist=to_dist(r2_acc),
        leaves_dist=to_dist(lv_acc),
        joint_n123=joint,
        vertex_degree=vdeg,
        mean_degree_counts=tuple(mean_deg[1:]),
        mean_rank_counts=tuple(mean_rank[1:]),
        mean_n1n2=mean_n1n2,
    )
