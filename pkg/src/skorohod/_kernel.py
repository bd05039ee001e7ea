"""Compiled version of the matching programme on a dense cost matrix.

Mirrors :class:`skorohod.metric.MatchingSolver` operation for operation so
that both produce the same floating-point value and the same witness.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _segment(a, c, C, log, iP, jP, iQ, jQ, final, limit):
    p = a.shape[0]
    q = c.shape[0]
    if iP < 0:
        s0 = 0.0
        u0 = 0.0
    else:
        s0 = a[iP]
        u0 = c[jP]
    if final:
        iQ = p
        jQ = q
        s1 = 1.0
        u1 = 1.0
        if s0 == 1.0:
            return C[p, q]
    else:
        s1 = a[iQ]
        u1 = c[jQ]
    if log:
        worst = abs(math.log((u1 - u0) / (s1 - s0)))
    else:
        worst = abs(u1 - s1)
    if worst > limit:
        return worst
    ix = iP + 1
    iy = jP + 1
    xi = iP + 1
    yj = jP + 1
    prev = s0
    while xi < iQ or yj < jQ:
        px = a[xi] if xi < iQ else np.inf
        if yj < jQ:
            cj = c[yj]
            if cj >= u1:
                py = s1
            else:
                py = s0 + (cj - u0) * (s1 - s0) / (u1 - u0)
        else:
            py = np.inf
        pos = px if px < py else py
        if pos >= s1:
            break
        if pos > prev:
            v = C[ix, iy]
            if v > worst:
                worst = v
                if worst > limit:
                    return worst
        if px == pos:
            ix += 1
            xi += 1
        if py == pos:
            iy += 1
            yj += 1
        prev = pos
    if s1 > prev:
        v = C[ix, iy]
        if v > worst:
            worst = v
    if final:
        v = C[p, q]
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def solve(a, c, C, log):
    """Return ``(value, pair_i, pair_j)`` of the lexicographically smallest optimum."""
    p = a.shape[0]
    q = c.shape[0]
    ub = _segment(a, c, C, log, -1, -1, 0, 0, True, np.inf)
    lx = p - 1 if p > 0 and a[p - 1] == 1.0 else p
    ly = q - 1 if q > 0 and c[q - 1] == 1.0 else q
    lb = max(C[0, 0], max(C[p, q], C[lx, ly]))
    empty = np.zeros(0, dtype=np.int64)
    if ub <= lb:
        return ub, empty, empty
    PI = np.empty(p * q, dtype=np.int64)
    PJ = np.empty(p * q, dtype=np.int64)
    n = 0
    for i in range(p):
        for j in range(q):
            ai = a[i]
            cj = c[j]
            if (ai == 1.0) != (cj == 1.0):
                continue
            if ai < 1.0:
                if log:
                    if (abs(math.log(cj / ai)) > ub + 1e-9
                            or abs(math.log((1.0 - cj) / (1.0 - ai))) > ub + 1e-9):
                        continue
                elif abs(cj - ai) > ub:
                    continue
            PI[n] = i
            PJ[n] = j
            n += 1
    F = np.empty(n)
    for k in range(n - 1, -1, -1):
        iP = PI[k]
        jP = PJ[k]
        best = _segment(a, c, C, log, iP, jP, 0, 0, True, ub)
        for m in range(k + 1, n):
            if PI[m] <= iP or PJ[m] <= jP:
                continue
            fq = F[m]
            if fq >= best:
                continue
            v = _segment(a, c, C, log, iP, jP, PI[m], PJ[m], False, best)
            if v < best:
                best = max(v, fq)
        F[k] = best
    best = ub
    for m in range(n):
        fq = F[m]
        if fq >= best:
            continue
        v = _segment(a, c, C, log, -1, -1, PI[m], PJ[m], False, best)
        if v < best:
            best = max(v, fq)
    value = best
    out_i = np.empty(min(p, q), dtype=np.int64)
    out_j = np.empty(min(p, q), dtype=np.int64)
    r = 0
    iP = -1
    jP = -1
    while True:
        if _segment(a, c, C, log, iP, jP, 0, 0, True, value) <= value:
            break
        found = False
        for m in range(n):
            if PI[m] <= iP or PJ[m] <= jP or F[m] > value:
                continue
            if _segment(a, c, C, log, iP, jP, PI[m], PJ[m], False, value) <= value:
                out_i[r] = PI[m]
                out_j[r] = PJ[m]
                r += 1
                iP = PI[m]
                jP = PJ[m]
                found = True
                break
        if not found:
            return -1.0, empty, empty
    return value, out_i[:r], out_j[:r]


@njit(cache=True)
def _cells(bps):
    # same layout as moduli._cells: (is_point, lo, hi, first, last)
    k = bps.shape[0]
    n_max = 2 * k + 3
    is_point = np.zeros(n_max, dtype=np.bool_)
    lo = np.zeros(n_max)
    hi = np.zeros(n_max)
    first = np.zeros(n_max, dtype=np.int64)
    last = np.zeros(n_max, dtype=np.int64)
    is_point[0] = True
    n = 1
    for m in range(k + 1):
        left = 0.0 if m == 0 else bps[m - 1]
        right = 1.0 if m == k else bps[m]
        if m > 0 and left < 1.0:
            is_point[n] = True
            lo[n] = left
            hi[n] = left
            first[n] = m
            last[n] = m - 1
            n += 1
        if left < right:
            lo[n] = left
            hi[n] = right
            first[n] = m
            last[n] = m
            n += 1
    end_piece = np.searchsorted(bps, 1.0)
    is_point[n] = True
    lo[n] = 1.0
    hi[n] = 1.0
    first[n] = end_piece
    last[n] = end_piece
    n += 1
    return is_point[:n], lo[:n], hi[:n], first[:n], last[:n]


@njit(cache=True)
def partition_feasible_table(bps, table, theta, delta, eps):
    """Table-driven twin of ``moduli.partition_feasible`` with ``range_ok = table <= theta``."""
    is_point, lo, hi, first, last = _cells(bps)
    n = lo.shape[0]
    earliest = np.zeros(n)
    reachable = np.zeros(n, dtype=np.int64)
    n_reach = 1
    g = 0
    for c in range(1, n):
        while g < c and not table[first[g], last[c]] <= theta:
            g += 1
        pos = np.searchsorted(reachable[:n_reach], g)
        if pos == n_reach:
            continue
        e = earliest[reachable[pos]] + delta
        if is_point[c]:
            if lo[c] - e <= eps:
                continue
            earliest[c] = lo[c]
        else:
            start = max(lo[c], e)
            if hi[c] - start <= eps:
                continue
            earliest[c] = start
        reachable[n_reach] = c
        n_reach += 1
    return reachable[n_reach - 1] == n - 1


@njit(cache=True)
def two_sided_table(dist, lmax):
    """``max min(dist[i, j], dist[j, l])`` over ``i < j < l <= lmax[i]``."""
    n = dist.shape[0]
    k = n - 1
    best = 0.0
    for j in range(1, k):
        # running maximum of dist[j, j + 1 .. l]
        right = np.empty(k - j)
        run = 0.0
        for l in range(j + 1, k + 1):
            if dist[j, l] > run:
                run = dist[j, l]
            right[l - j - 1] = run
        for i in range(j):
            if lmax[i] < j + 1:
                continue
            v = min(dist[i, j], right[lmax[i] - j - 1])
            if v > best:
                best = v
    return best


@njit(cache=True)
def below(a, c, C, log, limit):
    """Whether the optimum of :func:`solve` is strictly below ``limit``."""
    p = a.shape[0]
    q = c.shape[0]
    if _segment(a, c, C, log, -1, -1, 0, 0, True, limit) < limit:
        return True
    lx = p - 1 if p > 0 and a[p - 1] == 1.0 else p
    ly = q - 1 if q > 0 and c[q - 1] == 1.0 else q
    if max(C[0, 0], max(C[p, q], C[lx, ly])) >= limit:
        return False
    PI = np.empty(p * q, dtype=np.int64)
    PJ = np.empty(p * q, dtype=np.int64)
    n = 0
    for i in range(p):
        for j in range(q):
            ai = a[i]
            cj = c[j]
            if (ai == 1.0) != (cj == 1.0):
                continue
            if ai < 1.0:
                if log:
                    if (abs(math.log(cj / ai)) > limit + 1e-9
                            or abs(math.log((1.0 - cj) / (1.0 - ai))) > limit + 1e-9):
                        continue
                elif abs(cj - ai) > limit:
                    continue
            PI[n] = i
            PJ[n] = j
            n += 1
    F = np.empty(n)
    for k in range(n - 1, -1, -1):
        iP = PI[k]
        jP = PJ[k]
        best = _segment(a, c, C, log, iP, jP, 0, 0, True, limit)
        if best > limit:
            best = limit
        for m in range(k + 1, n):
            if PI[m] <= iP or PJ[m] <= jP:
                continue
            fq = F[m]
            if fq >= best:
                continue
            v = _segment(a, c, C, log, iP, jP, PI[m], PJ[m], False, best)
            if v < best:
                best = max(v, fq)
        F[k] = best
    for m in range(n):
        if F[m] >= limit:
            continue
        if _segment(a, c, C, log, -1, -1, PI[m], PJ[m], False, limit) < limit:
            return True
    return False
