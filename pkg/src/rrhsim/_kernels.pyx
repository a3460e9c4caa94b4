# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: replica growth, per-tree statistics, and leader
persistence trajectories.

Must stay bit-identical to rrhsim._kernels_py (the numpy fallback); the
draw schedule shared by both backends is documented there and in
rrhsim.rng.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.string cimport memset

import numpy as np

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9u
cdef uint64_t MIX2 = 0x94D049BB133111EBu


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t _draw(uint64_t base, uint64_t t) nogil:
    return _mix64(base + GOLDEN * (t + 1))


cdef inline uint64_t _stream_base(uint64_t seed, uint64_t replica) nogil:
    return _draw(_draw(seed, 0), replica)


cdef inline uint64_t _bounded(uint64_t u, uint64_t n) nogil:
    # floor(u*n / 2**64) via 32-bit split, same arithmetic as the fallback
    cdef uint64_t hi = u >> 32
    cdef uint64_t lo = u & 0xFFFFFFFFu
    return (hi * n + ((lo * n) >> 32)) >> 32


cdef inline double _float53(uint64_t u) nogil:
    return <double> (u >> 11) * (1.0 / 9007199254740992.0)


cdef inline void _grow_into(int kind, Py_ssize_t n, double param, uint64_t base,
                            int64_t* P, int64_t* D) nogil:
    """Fill parent and depth arrays (length n+1, slot 0 unused)."""
    cdef Py_ssize_t i
    cdef int64_t e, e1, e2, p
    cdef uint64_t u, t0
    P[0] = 0
    D[0] = 0
    if n >= 1:
        P[1] = 0
        D[1] = 0
    for i in range(2, n + 1):
        if kind == 0:
            u = _draw(base, i - 2)
            p = 1 + <int64_t> _bounded(u, i - 1)
        elif kind == 1:
            t0 = 2 * (i - 2)
            u = _draw(base, t0)
            e = 1 + <int64_t> _bounded(u, i - 1)
            u = _draw(base, t0 + 1)
            if _float53(u) < param and e != 1:
                p = P[e]
            else:
                p = e
        else:
            t0 = 3 * (i - 2)
            e1 = 1 + <int64_t> _bounded(_draw(base, t0), i - 1)
            e2 = 1 + <int64_t> _bounded(_draw(base, t0 + 1), i - 1)
            u = _draw(base, t0 + 2)
            if D[e1] < D[e2]:
                p = e1
            elif D[e2] < D[e1]:
                p = e2
            else:
                p = e1 if (u >> 63) == 0 else e2
        P[i] = p
        D[i] = D[p] + 1


def grow_parents(int kind, Py_ssize_t n, double param, base):
    """Grow one realization; returns parents as int64 of length n+1."""
    if kind not in (0, 1, 2):
        raise ValueError(f"unknown growth kind {kind}")
    parents = np.zeros(n + 1, dtype=np.int64)
    depth = np.zeros(n + 1, dtype=np.int64)
    if n <= 1:
        return parents
    cdef int64_t[::1] P = parents
    cdef int64_t[::1] D = depth
    cdef uint64_t b = base
    with nogil:
        _grow_into(kind, n, param, b, &P[0], &D[0])
    return parents


def grow_duplicate_arrays(Py_ssize_t n_edges, double mu, base):
    """Duplication-model growth: (source edge, grown flag) per edge."""
    src = np.zeros(n_edges + 1, dtype=np.int64)
    grown = np.zeros(n_edges + 1, dtype=np.uint8)
    if n_edges >= 1:
        grown[1] = 1
    if n_edges <= 1:
        return src, grown
    cdef int64_t[::1] S = src
    cdef uint8_t[::1] G = grown
    cdef uint64_t b = base
    cdef Py_ssize_t j
    cdef uint64_t t0, u
    with nogil:
        for j in range(2, n_edges + 1):
            t0 = 2 * (j - 2)
            u = _draw(b, t0)
            G[j] = 0 if _float53(u) < mu else 1
            u = _draw(b, t0 + 1)
            S[j] = 1 + <int64_t> _bounded(u, j - 1)
    return src, grown


def depths(parents):
    """Depth of every edge below the root."""
    cdef Py_ssize_t n = len(parents) - 1
    out = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] D = out
    cdef const int64_t[::1] P = np.ascontiguousarray(parents, dtype=np.int64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(2, n + 1):
            D[i] = D[P[i]] + 1
    return out


def subtree_sizes(parents):
    """Subtree size of every edge (equals the degree of its vertex)."""
    cdef Py_ssize_t n = len(parents) - 1
    out = np.ones(n + 1, dtype=np.int64)
    out[0] = 0
    cdef int64_t[::1] S = out
    cdef const int64_t[::1] P = np.ascontiguousarray(parents, dtype=np.int64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n, 1, -1):
            S[P[i]] += S[i]
    return out


def ensemble_stats(int kind, Py_ssize_t n, double param, seed,
                   Py_ssize_t rep_lo, Py_ssize_t rep_count, Py_ssize_t m_track=2):
    """Grow ``rep_count`` replicas and accumulate their statistics.

    Same output contract as the fallback: pooled int64 histograms, int32
    per-replica scalar statistics, and an invariant-violation count.
    """
    if kind not in (0, 1, 2):
        raise ValueError(f"unknown growth kind {kind}")
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
    cdef int64_t violations = 0

    if n == 1:
        deg_hist[1] = rep_count
        rank_hist[1] = rep_count
        leaves_hist[0] = rep_count
        n1[:] = 1
        return _stats_dict(deg_hist, rank_hist, leaves_hist, vm_hist,
                           n1, n2, r2, leaves, vm_deg, 0)

    parents_buf = np.zeros(n + 1, dtype=np.int64)
    depth_buf = np.zeros(n + 1, dtype=np.int64)
    size_buf = np.zeros(n + 1, dtype=np.int64)

    cdef int64_t[::1] P = parents_buf
    cdef int64_t[::1] D = depth_buf
    cdef int64_t[::1] S = size_buf
    cdef int64_t[::1] DH = deg_hist
    cdef int64_t[::1] RH = rank_hist
    cdef int64_t[::1] LH = leaves_hist
    cdef int64_t[::1] VH = vm_hist
    cdef int32_t[::1] A1 = n1
    cdef int32_t[::1] A2 = n2
    cdef int32_t[::1] AR = r2
    cdef int32_t[::1] AL = leaves
    cdef int32_t[::1] AV = vm_deg

    cdef uint64_t sd = seed
    cdef uint64_t base
    cdef Py_ssize_t rep, i
    cdef int64_t c1, c2, cr2, clv, root_zero
    cdef int64_t k, rk

    with nogil:
        for rep in range(rep_count):
            base = _stream_base(sd, rep_lo + rep)
            _grow_into(kind, n, param, base, &P[0], &D[0])
            for i in range(1, n + 1):
                S[i] = 1
            for i in range(n, 1, -1):
                S[P[i]] += S[i]
            c1 = 0
            c2 = 0
            cr2 = 0
            clv = 0
            root_zero = 0
            for i in range(1, n + 1):
                k = S[i]
                DH[k] += 1
                if k == 1:
                    c1 += 1
                elif k == 2:
                    c2 += 1
                rk = D[i] + 1
                RH[rk] += 1
                if rk == 2:
                    cr2 += 1
                if rk == 1:
                    root_zero += 1
                if i >= 2 and P[i] == 1 and k == 1:
                    clv += 1
            A1[rep] = <int32_t> c1
            A2[rep] = <int32_t> c2
            AR[rep] = <int32_t> cr2
            AL[rep] = <int32_t> clv
            AV[rep] = <int32_t> S[m_track]
            LH[clv] += 1
            VH[S[m_track]] += 1
            if S[1] != n:
                violations += 1
            if root_zero != 1:
                violations += 1

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


def leader_persistence_counts(Py_ssize_t m, Py_ssize_t n_max, seed,
                              Py_ssize_t rep_lo, Py_ssize_t rep_count, checkpoints):
    """Count trajectories where vertex m takes the quickest route to degree
    > floor(N/2) and keeps that margin through each checkpoint size.

    Returns (successes per checkpoint, number passing the forced prefix).
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    cdef Py_ssize_t start = 2 * m - 1
    if n_max < start:
        raise ValueError("n_max must be >= 2m-1")
    chk = np.asarray(checkpoints, dtype=np.int64)
    if len(chk) == 0 or (np.diff(chk) <= 0).any():
        raise ValueError("checkpoints must be strictly increasing")
    if chk[0] < start or chk[-1] > n_max:
        raise ValueError("checkpoints must lie in [2m-1, n_max]")

    succ = np.zeros(len(chk), dtype=np.int64)
    insub_buf = np.zeros(n_max + 1, dtype=np.uint8)

    cdef int64_t[::1] SC = succ
    cdef const int64_t[::1] CK = chk
    cdef uint8_t[::1] IN = insub_buf
    cdef Py_ssize_t n_chk = len(chk)
    cdef uint64_t sd = seed
    cdef uint64_t base, u
    cdef Py_ssize_t rep, i, j
    cdef int64_t p, req, deg, held, hiwater
    cdef int64_t prefix_ok_total = 0
    cdef bint ok

    with nogil:
        for rep in range(rep_count):
            base = _stream_base(sd, rep_lo + rep)
            ok = True
            for i in range(2, start + 1):
                u = _draw(base, i - 2)
                p = 1 + <int64_t> _bounded(u, i - 1)
                req = 1 if i <= m else i - 1
                if p != req:
                    ok = False
                    break
            if not ok:
                continue
            prefix_ok_total += 1
            for i in range(m, start + 1):
                IN[i] = 1
            hiwater = start
            deg = m
            held = start
            for i in range(start + 1, n_max + 1):
                u = _draw(base, i - 2)
                p = 1 + <int64_t> _bounded(u, i - 1)
                IN[i] = IN[p]
                hiwater = i
                deg += IN[p]
                if 2 * deg > i:
                    held = i
                else:
                    break
            for j in range(n_chk):
                if held >= CK[j]:
                    SC[j] += 1
            memset(&IN[0], 0, (hiwater + 1) * sizeof(uint8_t))

    return succ, int(prefix_ok_total)
