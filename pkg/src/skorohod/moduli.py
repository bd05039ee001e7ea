"""Exact moduli of continuity for piecewise-constant paths.

Everything here works on an abstract piecewise-constant path: a sorted tuple
of breakpoints ``b_1 < ... < b_k`` in (0, 1] splitting [0, 1] into pieces
``0..k`` (piece ``m`` is ``[b_m, b_{m+1})``, with ``b_0 = 0`` and the last
piece closed at 1), plus a symmetric matrix of piece-to-piece distances.
The scalar and the nested spaces only differ in that matrix.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

import numpy as np

from .errors import DomainError

# Gaps that agree with a threshold up to EPS are treated as equal to it, so
# that grid-aligned inputs are not at the mercy of rounding.
EPS = 1e-12


def check_delta(delta, *, upper_inclusive=False):
    delta = float(delta)
    ok = 0.0 < delta <= 1.0 if upper_inclusive else 0.0 < delta < 1.0
    if not ok:
        bound = "(0, 1]" if upper_inclusive else "(0, 1)"
        raise DomainError(f"delta must lie in {bound}, got {delta!r}")
    return delta


def _edge(breakpoints, m):
    """Left end of piece ``m``."""
    return 0.0 if m == 0 else breakpoints[m - 1]


def pieces_meeting(breakpoints, lo, hi, closed=True):
    """Indices of the pieces that intersect ``[lo, hi]`` (or ``[lo, hi)``)."""
    if lo > hi or (not closed and lo == hi):
        return range(0)
    first = bisect_right(breakpoints, lo)
    last = bisect_right(breakpoints, hi) if closed else bisect_left(breakpoints, hi)
    return range(first, last + 1)


def range_cost_table(dist):
    """``R[i, j]``: largest pairwise distance among pieces ``i..j``."""
    dist = np.asarray(dist, dtype=float)
    n = dist.shape[0]
    table = np.zeros((n, n))
    for i in range(n - 2, -1, -1):
        # R[i, j] = max(R[i + 1, j], max_{i <= m <= j} D[i, m])
        table[i, i + 1:] = np.maximum(table[i + 1, i + 1:], np.maximum.accumulate(dist[i, i + 1:]))
    return table


def scalar_range_table(values):
    """Range table for real piece values: max minus min over ``i..j``."""
    v = np.asarray(values, dtype=float)
    n = v.size
    table = np.zeros((n, n))
    for i in range(n):
        seg = v[i:]
        table[i, i:] = np.maximum.accumulate(seg) - np.minimum.accumulate(seg)
    return table


def _cells(breakpoints):
    # (is_point, lo, hi, first_piece, last_piece); the start cell is {0}.
    k = len(breakpoints)
    cells = [(True, 0.0, 0.0, 0, 0)]
    for m in range(k + 1):
        lo = _edge(breakpoints, m)
        hi = 1.0 if m == k else breakpoints[m]
        if m > 0 and lo < 1.0:
            cells.append((True, lo, lo, m, m - 1))
        if lo < hi:
            cells.append((False, lo, hi, m, m))
    end_piece = bisect_left(breakpoints, 1.0)
    cells.append((True, 1.0, 1.0, end_piece, end_piece))
    return cells


def partition_feasible(breakpoints, range_ok, delta):
    """Whether some delta-sparse partition keeps every block acceptable.

    A block ``[t_{i-1}, t_i)`` covers a contiguous run of pieces and is
    acceptable when ``range_ok(first, last)`` holds; ``range_ok`` must be
    monotone (shrinking a run never breaks it).  Boundaries are tracked per
    cell (a breakpoint, or an open gap between breakpoints) by the earliest
    position they can occupy, which dominates any later position in the same
    cell.
    """
    cells = _cells(breakpoints)
    earliest = {0: 0.0}
    reachable = [0]
    g = 0
    for c in range(1, len(cells)):
        is_point, lo, hi, _, last = cells[c]
        while g < c and not range_ok(cells[g][3], last):
            g += 1
        pos = bisect_left(reachable, g)
        if pos == len(reachable):
            continue
        e = earliest[reachable[pos]] + delta
        if is_point:
            if lo - e <= EPS:
                continue
            earliest[c] = lo
        else:
            start = max(lo, e)
            if hi - start <= EPS:
                continue
            earliest[c] = start
        reachable.append(c)
    return reachable[-1] == len(cells) - 1


def partition_modulus(breakpoints, table, delta):
    """Exact ``inf`` over delta-sparse partitions of the largest block cost.

    ``table`` is a range-cost table as built by :func:`range_cost_table` or
    :func:`scalar_range_table`.
    """
    delta = check_delta(delta)
    table = np.asarray(table)
    n = table.shape[0]
    if n == 1:
        return 0.0
    from . import _kernel

    candidates = np.unique(table[np.triu_indices(n)])
    bps = np.asarray(breakpoints, dtype=float)
    table = np.ascontiguousarray(table, dtype=float)
    lo, hi = 0, candidates.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _kernel.partition_feasible_table(bps, table, candidates[mid], delta, EPS):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def partition_modulus_at_least(breakpoints, range_ok_below, delta):
    """Decide ``modulus >= eps`` given the predicate ``cost(i..j) < eps``."""
    delta = check_delta(delta)
    return not partition_feasible(breakpoints, range_ok_below, delta)


def _window_limits(breakpoints, delta):
    # lmax[i]: largest piece l such that pieces i and l can both be hit by
    # points at most delta apart, i.e. b_l - b_{i+1} < delta.
    k = len(breakpoints)
    bps = np.asarray(breakpoints, dtype=float)
    lmax = np.empty(k + 1, dtype=np.int64)
    lmax[:k] = np.maximum(np.arange(1, k + 1), np.searchsorted(bps, bps + delta - EPS, side="left"))
    lmax[k] = k
    return lmax


def two_sided_modulus(breakpoints, dist, delta, *, upper_inclusive=False):
    """``sup min(d(x(t), x(t1)), d(x(t2), x(t)))`` over ``t1 <= t <= t2`` in a delta window."""
    delta = check_delta(delta, upper_inclusive=upper_inclusive)
    dist = np.asarray(dist, dtype=float)
    k = len(breakpoints)
    if k < 2:
        return 0.0
    from . import _kernel

    lmax = _window_limits(breakpoints, delta)
    return float(_kernel.two_sided_table(np.ascontiguousarray(dist), lmax))


def window_modulus(breakpoints, dist, delta):
    """Classical modulus ``sup d(x(t1), x(t2))`` over ``|t1 - t2| <= delta``."""
    delta = check_delta(delta, upper_inclusive=True)
    dist = np.asarray(dist, dtype=float)
    k = len(breakpoints)
    if k == 0:
        return 0.0
    lmax = _window_limits(breakpoints, delta)
    best = 0.0
    for i in range(k):
        best = max(best, float(dist[i, i + 1:lmax[i] + 1].max()))
    return best
