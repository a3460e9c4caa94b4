"""Pure-numpy kernels: the fallback backend when the compiled extension is
not available.

Implements the same API and the exact same draw schedule as
``rrhsim._kernels`` so both backends produce bit-identical realizations:

    kind 0 (rrh)            vertex i uses draw  i-2          -> parent
    kind 1 (redirect)       vertex i uses draws 2(i-2)       -> edge e
                                                2(i-2)+1     -> redirect?
    kind 2 (choice-smaller) vertex i uses draws 3(i-2), +1   -> e1, e2
                                                3(i-2)+2     -> tie break
    duplicate               edge j uses draws   2(j-2)       -> duplicate?
                                                2(j-2)+1     -> source edge

All arrays indexed by creation id; slot 0 is unused padding.
"""

from __future__ import annotations

import numpy as np

from .rng import GOLDEN, MASK64

_U64 = np.uint64
_GOLDEN = _U64(GOLDEN)
_LOW32 = _U64(0xFFFFFFFF)
_INV53 = 2.0**-53

# Soft cap on scratch matrices when processing replicas in lockstep blocks.
_BLOCK_BYTES = 192 * 1024 * 1024


def _mix64(z):
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def _draws(bases, t):
    """Draw number t (scalar) of each stream in ``bases`` (uint64 array)."""
    return _mix64(bases + _GOLDEN * _U64(t + 1))


def _stream_bases(seed, replicas):
    inner = _mix64(_U64((seed + GOLDEN) & MASK64))
    return _mix64(inner + _GOLDEN * (replicas.astype(_U64) + _U64(1)))


def _bounded(u, n):
    """floor(u * n / 2**64) for n < 2**32, matching the compiled kernel."""
    hi = u >> _U64(32)
    lo = u & _LOW32
    return (hi * n + ((lo * n) >> _U64(32))) >> _U64(32)


def _float53(u):
    return (u >> _U64(11)).astype(np.float64) * _INV53


def grow_parents(kind, n, param, base):
    """Grow one realization; returns parents as int64 of length n+1."""
    parents = np.zeros(n + 1, dtype=np.int64)
    if n <= 1:
        return parents
    if kind == 0:
        t = np.arange(0, n - 1, dtype=_U64)
        with np.errstate(over="ignore"):
            u = _mix64(_U64(base) + _GOLDEN * (t + _U64(1)))
            choices = np.arange(1, n, dtype=_U64)
            parents[2:] = 1 + _bounded(u, choices).astype(np.int64)
        return parents
    if kind == 1:
        # parent(e) lookups force a sequential pass
        from .rng import bounded, draw, uniform53

        for i in range(2, n + 1):
            e = 1 + bounded(draw(base, 2 * (i - 2)), i - 1)
            u = uniform53(draw(base, 2 * (i - 2) + 1))
            if u < param and e != 1:
                parents[i] = parents[e]
            else:
                parents[i] = e
        return parents
    if kind == 2:
        from .rng import bounded, draw

        depth = np.zeros(n + 1, dtype=np.int64)
        for i in range(2, n + 1):
            e1 = 1 + bounded(draw(base, 3 * (i - 2)), i - 1)
            e2 = 1 + bounded(draw(base, 3 * (i - 2) + 1), i - 1)
            u3 = draw(base, 3 * (i - 2) + 2)
            if depth[e1] < depth[e2]:
                w = e1
            elif depth[e2] < depth[e1]:
                w = e2
            else:
                w = e1 if (u3 >> 63) == 0 else e2
            parents[i] = w
            depth[i] = depth[w] + 1
        return parents
    raise ValueError(f"unknown growth kind {kind}")


def grow_duplicate_arrays(n_edges, mu, base):
    """Duplication-model growth: (source edge, grown flag) per edge."""
    src = np.zeros(n_edges + 1, dtype=np.int64)
    grown = np.zeros(n_edges + 1, dtype=np.uint8)
    grown[1] = 1
    if n_edges <= 1:
        return src, grown
    t = np.arange(0, n_edges - 1, dtype=_U64)
    with np.errstate(over="ignore"):
        b = _U64(base)
        u_act = _mix64(b + _GOLDEN * (_U64(2) * t + _U64(1)))
        u_src = _mix64(b + _GOLDEN * (_U64(2) * t + _U64(2)))
        dup = _float53(u_act) < mu
        choices = np.arange(1, n_edges, dtype=_U64)
        src[2:] = 1 + _bounded(u_src, choices).astype(np.int64)
    grown[2:] = (~dup).astype(np.uint8)
    return src, grown


def depths(parents):
    """Depth of every edge below the root, by pointer doubling."""
    n = len(parents) - 1
    d = np.zeros(n + 1, dtype=np.int64)
    if n <= 1:
        return d
    d[2:] = 1
    ptr = parents.copy()
    ptr[:2] = 1
    while True:
        mask = ptr > 1
        if not mask.any():
            return d
        d[mask] += d[ptr[mask]]
        ptr[mask] = ptr[ptr[mask]]


def subtree_sizes(parents):
    """Subtree size of every edge (equals the degree of its vertex)."""
    n = len(parents) - 1
    sizes = np.ones(n + 1, dtype=np.int64)
    sizes[0] = 0
    if n <= 1:
        return sizes
    d = depths(parents)
    for level in range(int(d.max()), 0, -1):
        idx = np.nonzero(d == level)[0]
        idx = idx[idx >= 2]
        np.add.at(sizes, parents[idx], sizes[idx])
    return sizes


def _block_rows(n, per_row_bytes):
    return max(1, int(_BLOCK_BYTES // max(1, per_row_bytes * (n + 1))))


def ensemble_stats(kind, n, param, seed, rep_lo, rep_count, m_track=2):
    """Grow ``rep_count`` replicas and accumulate their statistics.

    Returns a dict with pooled histograms (int64, index = value) and
    per-replica int32 arrays for the scalar statistics, plus a count of
    per-replica invariant violations (0 on a correct build).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n >= 2 and not 2 <= m_track <= n:
        raise ValueError("m_track must be in [2, n]")
    deg_hist = np.zeros(n + 1, dtype=np.int64)
    rank_hist = np.zeros(n + 1, dtype=np.int64)
    leaves_hist = np.zeros(n + 1, dtype=np.int64)
    vm_hist = np.zeros(n + 1, dtype=np.int64)
    n1 = np.zeros(rep_count, dtype=np.int32)
    n2 = np.zeros(rep_count, dtype=np.int32)
    r2 = np.zeros(rep_count, dtype=np.int32)
    leaves = np.zeros(rep_count, dtype=np.int32)
    vm_deg = np.zeros(rep_count, dtype=np.int32)
    violations = 0

    if n == 1:
        deg_hist[1] = rep_count
        rank_hist[1] = rep_count
        leaves_hist[0] = rep_count
        n1[:] = 1
        return _stats_dict(deg_hist, rank_hist, leaves_hist, vm_hist,
                           n1, n2, r2, leaves, vm_deg, violations)

    block = _block_rows(n, 24)
    for lo in range(0, rep_count, block):
        cnt = min(block, rep_count - lo)
        reps = np.arange(rep_lo + lo, rep_lo + lo + cnt, dtype=np.int64)
        with np.errstate(over="ignore"):
            bases = _stream_bases(seed, reps)
        rows = np.arange(cnt)
        P = np.zeros((cnt, n + 1), dtype=np.int64)
        D = np.zeros((cnt, n + 1), dtype=np.int64)
        with np.errstate(over="ignore"):
            for i in range(2, n + 1):
                if kind == 0:
                    u = _draws(bases, i - 2)
                    p = (1 + _bounded(u, i - 1)).astype(np.int64)
                elif kind == 1:
                    u1 = _draws(bases, 2 * (i - 2))
                    e = (1 + _bounded(u1, i - 1)).astype(np.int64)
                    u2 = _draws(bases, 2 * (i - 2) + 1)
                    red = (_float53(u2) < param) & (e != 1)
                    p = np.where(red, P[rows, e], e)
                elif kind == 2:
                    e1 = (1 + _bounded(_draws(bases, 3 * (i - 2)), i - 1)).astype(np.int64)
                    e2 = (1 + _bounded(_draws(bases, 3 * (i - 2) + 1), i - 1)).astype(np.int64)
                    u3 = _draws(bases, 3 * (i - 2) + 2)
                    d1 = D[rows, e1]
                    d2 = D[rows, e2]
                    p = np.where(d1 < d2, e1,
                                 np.where(d2 < d1, e2,
                                          np.where((u3 >> _U64(63)) == 0, e1, e2)))
                else:
                    raise ValueError(f"unknown growth kind {kind}")
                P[:, i] = p
                D[:, i] = D[rows, p] + 1
        S = np.ones((cnt, n + 1), dtype=np.int64)
        S[:, 0] = 0
        for i in range(n, 1, -1):
            pi = P[:, i]
            S[rows, pi] += S[:, i]

        sizes = S[:, 1:]
        ranks = D[:, 1:] + 1
        deg_hist += np.bincount(sizes.ravel(), minlength=n + 1)[: n + 1]
        rank_hist += np.bincount(ranks.ravel(), minlength=n + 1)[: n + 1]
        n1[lo:lo + cnt] = (sizes == 1).sum(axis=1)
        n2[lo:lo + cnt] = (sizes == 2).sum(axis=1)
        r2[lo:lo + cnt] = (ranks == 2).sum(axis=1)
        lv = ((P[:, 2:] == 1) & (S[:, 2:] == 1)).sum(axis=1)
        leaves[lo:lo + cnt] = lv
        leaves_hist += np.bincount(lv, minlength=n + 1)[: n + 1]
        vd = S[:, m_track]
        vm_deg[lo:lo + cnt] = vd
        vm_hist += np.bincount(vd, minlength=n + 1)[: n + 1]
        violations += int((S[:, 1] != n).sum())
        violations += int(((D[:, 1:] == 0).sum(axis=1) != 1).sum())

    return _stats_dict(deg_hist, rank_hist, leaves_hist, vm_hist,
                       n1, n2, r2, leaves, vm_deg, violations)


def _stats_dict(deg_hist, rank_hist, leaves_hist, vm_hist,
                n1, n2, r2, leaves, vm_deg, violations):
    return {
        "deg_hist": deg_hist,
        "rank_hist": rank_hist,
        "leaves_hist": leaves_hist,
        "vm_deg_hist": vm_hist,
        "n1": n1,
        "n2": n2,
        "r2": r2,
        "leaves": leaves,
        "vm_deg": vm_deg,
        "violations": violations,
    }


def leader_persistence_counts(m, n_max, seed, rep_lo, rep_count, checkpoints):
    """Count trajectories where vertex m takes the quickest route to degree
    > floor(N/2) and keeps that margin through each checkpoint size.

    Returns (successes per checkpoint, number passing the forced prefix).
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    start = 2 * m - 1
    if n_max < start:
        raise ValueError("n_max must be >= 2m-1")
    chk = np.asarray(checkpoints, dtype=np.int64)
    if len(chk) == 0 or (np.diff(chk) <= 0).any():
        raise ValueError("checkpoints must be strictly increasing")
    if chk[0] < start or chk[-1] > n_max:
        raise ValueError("checkpoints must lie in [2m-1, n_max]")

    succ = np.zeros(len(chk), dtype=np.int64)
    prefix_ok_total = 0
    block = _block_rows(n_max, 1)
    for lo in range(0, rep_count, block):
        cnt = min(block, rep_count - lo)
        reps = np.arange(rep_lo + lo, rep_lo + lo + cnt, dtype=np.int64)
        with np.errstate(over="ignore"):
            bases = _stream_bases(seed, reps)
            ok = np.ones(cnt, dtype=bool)
            for i in range(2, start + 1):
                p = 1 + _bounded(_draws(bases, i - 2), i - 1).astype(np.int64)
                ok &= p == (1 if i <= m else i - 1)
            prefix_ok_total += int(ok.sum())

            rows = np.arange(cnt)
            insub = np.zeros((cnt, n_max + 1), dtype=bool)
            insub[:, m:start + 1] = True
            held = np.where(ok, start, 0).astype(np.int64)
            alive = ok.copy()
            deg = np.full(cnt, m, dtype=np.int64)
            for i in range(start + 1, n_max + 1):
                if not alive.any():
                    break
                p = (1 + _bounded(_draws(bases, i - 2), i - 1)).astype(np.int64)
                s = insub[rows, p]
                insub[:, i] = s
                deg += s
                still = (2 * deg) > i
                held[alive & still] = i
                alive &= still
        for j, c in enumerate(chk):
            succ[j] += int((held >= c).sum())
    return succ, prefix_ok_total
