"""Skorohod J1 distances between step functions.

The distance is computed over time changes that interpolate an
order-preserving matching of jumps: a knot ``(a_i, c_j)`` sends the ``i``-th
jump of ``x`` onto the ``j``-th jump of ``y``.  Between consecutive knots the
time change is linear, so the cost of a matching splits into per-segment
terms and a dynamic programme over matched pairs finds the optimum.  The
reported value is always recomputed from the witness time change.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cadlag import StepFunction, TimeChange, compose, timechange_devnorm, timechange_lognorm
from .errors import SizeError, ValidationError

__all__ = [
    "Matching",
    "DistanceResult",
    "OBJECTIVES",
    "d_j1",
    "d_j1_0",
    "distance",
    "matching_cost",
    "enumerate_matchings",
    "exhaustive_distance",
    "oracle_dist",
    "MatchingSolver",
    "solve_matching",
    "reference_distance",
    "random_timechange_search",
]

OBJECTIVES = ("j1", "j1_0")
_ALIASES = {"j1": "j1", "uniform-dev": "j1", "dev": "j1",
            "j1_0": "j1_0", "log-slope": "j1_0", "log": "j1_0"}


def _objective(name):
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValidationError(f"unknown objective {name!r}; use one of {OBJECTIVES}") from None


@dataclass(frozen=True)
class Matching:
    """Order-preserving pairs ``(i, j)`` of jump indices of ``x`` and ``y``."""

    pairs: tuple = ()

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        for (i0, j0), (i1, j1) in zip(pairs, pairs[1:]):
            if not (i1 > i0 and j1 > j0):
                raise ValidationError(f"matching is not order preserving: {pairs}")
        object.__setattr__(self, "pairs", pairs)

    def timechange(self, a, c):
        """Interpolant through ``(a[i], c[j])`` for the matched pairs."""
        return TimeChange.through((a[i], c[j]) for i, j in self.pairs)

    def feasible(self, a, c):
        return all((a[i] == 1.0) == (c[j] == 1.0) for i, j in self.pairs)


@dataclass(frozen=True)
class DistanceResult:
    value: float
    objective: str
    matching: Matching = field(default_factory=Matching)
    timechange: TimeChange = field(default_factory=TimeChange)

    def to_json(self):
        return {
            "value": self.value,
            "objective": self.objective,
            "matching": [list(p) for p in self.matching.pairs],
            "timechange": self.timechange.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        try:
            return cls(float(data["value"]), _objective(data["objective"]),
                       Matching(tuple(tuple(p) for p in data["matching"])),
                       TimeChange.from_json(data["timechange"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed distance result: {exc!r}") from None


def _norm(lam, objective):
    return timechange_devnorm(lam) if objective == "j1" else timechange_lognorm(lam)


def matching_cost(x, y, matching, objective="j1_0"):
    """Cost of one matching, evaluated through the composed function."""
    objective = _objective(objective)
    lam = matching.timechange(x.breakpoints, y.breakpoints)
    return max(_norm(lam, objective), (x - compose(y, lam)).sup_norm())


class MatchingSolver:
    """Minimax dynamic programme over order-preserving jump matchings.

    ``a`` and ``c`` are the jump times of the two paths and ``cost(ix, iy)``
    the distance between piece ``ix`` of the first and piece ``iy`` of the
    second.  Works unchanged for real-valued and for path-valued pieces.
    """

    def __init__(self, a, c, cost, objective):
        self.a = tuple(a)
        self.c = tuple(c)
        self.p = len(self.a)
        self.q = len(self.c)
        self.cost = cost
        self.log = _objective(objective) == "j1_0"

    # -- one linear piece of the time change ------------------------------
    def _segment(self, P, Q, limit):
        a, c = self.a, self.c
        iP, jP = P
        s0, u0 = (0.0, 0.0) if iP < 0 else (a[iP], c[jP])
        final = Q is None
        if final:
            iQ, jQ, s1, u1 = self.p, self.q, 1.0, 1.0
        else:
            iQ, jQ = Q
            s1, u1 = a[iQ], c[jQ]
        if final and s0 == 1.0:
            # matched jumps at 1: only the point {1} is left
            return self.cost(self.p, self.q)
        if self.log:
            worst = abs(math.log((u1 - u0) / (s1 - s0)))
        else:
            worst = abs(u1 - s1)
        if worst > limit:
            return worst
        cost = self.cost
        ix, iy = iP + 1, jP + 1
        xi, yj = iP + 1, jP + 1
        prev = s0
        inf = math.inf
        while xi < iQ or yj < jQ:
            px = a[xi] if xi < iQ else inf
            if yj < jQ:
                cj = c[yj]
                py = s1 if cj >= u1 else s0 + (cj - u0) * (s1 - s0) / (u1 - u0)
            else:
                py = inf
            pos = px if px < py else py
            if pos >= s1:
                break
            if pos > prev:
                v = cost(ix, iy)
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
            worst = max(worst, cost(ix, iy))
        if final:
            worst = max(worst, cost(self.p, self.q))
        return worst

    def identity_cost(self):
        return self._segment((-1, -1), None, math.inf)

    def lower_bound(self):
        p, q = self.p, self.q
        lx = p - 1 if p and self.a[-1] == 1.0 else p
        ly = q - 1 if q and self.c[-1] == 1.0 else q
        return max(self.cost(0, 0), self.cost(p, q), self.cost(lx, ly))

    def _pairs(self, ub):
        a, c = self.a, self.c
        keep = []
        for i in range(self.p):
            for j in range(self.q):
                ai, cj = a[i], c[j]
                if (ai == 1.0) != (cj == 1.0):
                    continue
                if ai < 1.0:
                    if self.log:
                        if (abs(math.log(cj / ai)) > ub + 1e-9
                                or abs(math.log((1.0 - cj) / (1.0 - ai))) > ub + 1e-9):
                            continue
                    elif abs(cj - ai) > ub:
                        continue
                keep.append((i, j))
        return keep

    def solve(self):
        """Return ``(value, pairs)`` with the lexicographically smallest optimal pairs."""
        ub = self.identity_cost()
        if ub <= self.lower_bound():
            return ub, ()
        pairs = self._pairs(ub)
        F = {}
        for P in reversed(pairs):
            best = self._segment(P, None, ub)
            for Q in pairs:
                if Q[0] <= P[0] or Q[1] <= P[1]:
                    continue
                fq = F[Q]
                if fq >= best:
                    continue
                v = self._segment(P, Q, best)
                if v < best:
                    best = max(v, fq)
            F[P] = best
        start = (-1, -1)
        best = ub
        for Q in pairs:
            fq = F[Q]
            if fq >= best:
                continue
            v = self._segment(start, Q, best)
            if v < best:
                best = max(v, fq)
        value = best
        # greedy reconstruction of the lexicographically smallest optimum
        out = []
        P = start
        while True:
            if self._segment(P, None, value) <= value:
                break
            for Q in pairs:
                if Q[0] <= P[0] or Q[1] <= P[1] or F[Q] > value:
                    continue
                if self._segment(P, Q, value) <= value:
                    out.append(Q)
                    P = Q
                    break
            else:  # pragma: no cover - the optimum is always reachable
                raise RuntimeError("failed to rebuild optimal matching")
        return value, tuple(out)


def _scalar_cost(x, y):
    vx, vy = x.values, y.values
    return lambda i, j: abs(vx[i] - vy[j])


def solve_matching(a, c, C, objective, check=None):
    """Optimal ``(value, pairs)`` for jump times ``a``, ``c`` and piece costs ``C``.

    Runs the compiled programme; ``check(pairs)`` recomputes the value of
    a witness independently and a disagreement falls back to the reference
    solver.
    """
    from . import _kernel

    objective = _objective(objective)
    C = np.ascontiguousarray(C, dtype=float)
    value, pi, pj = _kernel.solve(np.asarray(a, dtype=float), np.asarray(c, dtype=float), C,
                                  objective == "j1_0")
    pairs = tuple(zip(pi.tolist(), pj.tolist()))
    if value >= 0.0 and (check is None or check(pairs) == value):
        return float(value), pairs
    solver = MatchingSolver(a, c, lambda i, j: C[i, j], objective)
    return solver.solve()


def distance(x, y, objective="j1_0"):
    """Skorohod distance between step functions with its witness."""
    objective = _objective(objective)
    C = np.abs(np.subtract.outer(np.asarray(x.values), np.asarray(y.values)))
    a, c = x.breakpoints, y.breakpoints

    def evaluate(pairs):
        return matching_cost(x, y, Matching(pairs), objective)

    _, pairs = solve_matching(a, c, C, objective, evaluate)
    matching = Matching(pairs)
    lam = matching.timechange(a, c)
    return DistanceResult(evaluate(pairs), objective, matching, lam)


def distance_below(x, y, limit, objective="j1_0"):
    """Whether ``distance(x, y, objective).value < limit``, without the witness."""
    from . import _kernel

    objective = _objective(objective)
    C = np.abs(np.subtract.outer(np.asarray(x.values), np.asarray(y.values)))
    return bool(_kernel.below(np.asarray(x.breakpoints, dtype=float),
                              np.asarray(y.breakpoints, dtype=float), C,
                              objective == "j1_0", float(limit)))


def reference_distance(x, y, objective="j1_0"):
    """Pure-Python solver; slower, kept as a cross-check for the compiled one."""
    objective = _objective(objective)
    solver = MatchingSolver(x.breakpoints, y.breakpoints, _scalar_cost(x, y), objective)
    dp_value, pairs = solver.solve()
    matching = Matching(pairs)
    value = matching_cost(x, y, matching, objective)
    if value != dp_value:  # pragma: no cover - guards the bit-exact contract
        raise RuntimeError(f"witness re-evaluation {value!r} differs from optimum {dp_value!r}")
    return DistanceResult(value, objective, matching, matching.timechange(x.breakpoints,
                                                                          y.breakpoints))


def d_j1(x, y):
    """Distance with the sup-deviation penalty on the time change."""
    return distance(x, y, "j1")


def d_j1_0(x, y):
    """Distance with the log-slope penalty on the time change."""
    return distance(x, y, "j1_0")


def enumerate_matchings(x, y, cap=24):
    """All feasible order-preserving matchings of the jumps of ``x`` and ``y``."""
    a, c = x.breakpoints, y.breakpoints
    p, q = len(a), len(c)
    if p + q > cap:
        raise SizeError(f"{p} + {q} jumps exceed the enumeration cap of {cap}")
    out = []
    for r in range(min(p, q) + 1):
        for xs in itertools.combinations(range(p), r):
            for ys in itertools.combinations(range(q), r):
                m = Matching(tuple(zip(xs, ys)))
                if m.feasible(a, c):
                    out.append(m)
    return out


def exhaustive_distance(x, y, objective="j1_0", cap=24):
    """Minimum cost over every matching, lexicographically smallest witness."""
    objective = _objective(objective)
    best, arg = math.inf, None
    for m in enumerate_matchings(x, y, cap):
        v = matching_cost(x, y, m, objective)
        if v < best or (v == best and m.pairs < arg.pairs):
            best, arg = v, m
    return DistanceResult(best, objective, arg, arg.timechange(x.breakpoints, y.breakpoints))


# -- randomized search over time changes -----------------------------------

def _batched_interp(xp, fp, v):
    # row-wise piecewise-linear interpolation, exact at knots
    L = xp.shape[1]
    idx = (xp[:, None, :] <= v[:, :, None]).sum(axis=2) - 1
    idx = np.clip(idx, 0, L - 2)
    x0 = np.take_along_axis(xp, idx, axis=1)
    x1 = np.take_along_axis(xp, idx + 1, axis=1)
    f0 = np.take_along_axis(fp, idx, axis=1)
    f1 = np.take_along_axis(fp, idx + 1, axis=1)
    out = f0 + (v - x0) * (f1 - f0) / (x1 - x0)
    out = np.where(v >= 1.0, 1.0, out)
    return np.where(v == x0, f0, out)


def _batch_cost(S, U, a, c, C, log):
    """Costs of the time changes with knot rows ``(S, U)``."""
    T = S.shape[0]
    dS, dU = np.diff(S, axis=1), np.diff(U, axis=1)
    ok = (dS > 0).all(axis=1) & (dU > 0).all(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        if log:
            norm = np.abs(np.log(dU / dS)).max(axis=1)
        else:
            norm = np.abs(U - S).max(axis=1)
    a_arr = np.broadcast_to(np.asarray(a, dtype=float), (T, len(a)))
    if len(c):
        pos = _batched_interp(U, S, np.broadcast_to(np.asarray(c, dtype=float), (T, len(c))))
    else:
        pos = np.zeros((T, 0))
    pts = np.concatenate([np.zeros((T, 1)), a_arr, pos, np.ones((T, 1))], axis=1)
    ix = (a_arr[:, None, :] <= pts[:, :, None]).sum(axis=2)
    iy = (pos[:, None, :] <= pts[:, :, None]).sum(axis=2)
    ix[:, -1] = len(a)
    iy[:, -1] = len(c)
    sup = C[ix, iy].max(axis=1)
    out = np.maximum(norm, sup)
    return np.where(ok, out, np.inf)


def _random_knots(rng, count, K, a_pool, c_pool, r):
    """``count`` rows of ``K`` interior knots, ``r`` of them snapped onto jump pairs."""
    if r:
        xi = np.sort(rng.random((count, len(a_pool))).argsort(axis=1)[:, :r], axis=1)
        yi = np.sort(rng.random((count, len(c_pool))).argsort(axis=1)[:, :r], axis=1)
        sa, ua = a_pool[xi], c_pool[yi]
    else:
        sa = ua = np.zeros((count, 0))
    extra = K - r
    se = np.sort(rng.random((count, extra)), axis=1)
    if r:
        gap = (sa[:, None, :] <= se[:, :, None]).sum(axis=2)
        lo_u = np.concatenate([np.zeros((count, 1)), ua], axis=1)
        hi_u = np.concatenate([ua, np.ones((count, 1))], axis=1)
        lo = np.take_along_axis(lo_u, gap, axis=1)
        hi = np.take_along_axis(hi_u, gap, axis=1)
        ue = np.sort(lo + (hi - lo) * rng.random((count, extra)), axis=1)
    else:
        ue = np.sort(rng.random((count, extra)), axis=1)
    s = np.sort(np.concatenate([sa, se], axis=1), axis=1)
    u = np.sort(np.concatenate([ua, ue], axis=1), axis=1)
    zeros, ones = np.zeros((count, 1)), np.ones((count, 1))
    return np.concatenate([zeros, s, ones], axis=1), np.concatenate([zeros, u, ones], axis=1)


def random_timechange_search(a, c, C, objective, trials, seed, refine=0.3):
    """Smallest cost over random piecewise-linear time changes.

    Independent of the matching programme: every candidate is scored by
    direct evaluation of the composed path.  Returns ``(value, knots)``.
    """
    log = _objective(objective) == "j1_0"
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    C = np.asarray(C, dtype=float)
    a_pool = np.asarray([v for v in a if v < 1.0])
    c_pool = np.asarray([v for v in c if v < 1.0])
    ident = np.array([[0.0, 1.0]])
    best = float(_batch_cost(ident, ident, a, c, C, log)[0])
    best_knots = (ident[0], ident[0])
    n_refine = int(trials * refine) if trials > 10 else 0
    n_random = max(trials - 1 - n_refine, 0)
    groups = [(K, r) for K in range(1, 7) for r in range(0, min(K, len(a_pool), len(c_pool)) + 1)]
    share = np.bincount(rng.integers(0, len(groups), size=n_random), minlength=len(groups))
    for (K, r), count in zip(groups, share):
        if not count:
            continue
        S, U = _random_knots(rng, int(count), K, a_pool, c_pool, r)
        vals = _batch_cost(S, U, a, c, C, log)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, best_knots = float(vals[k]), (S[k], U[k])
    rounds = 10
    per_round = n_refine // rounds if n_refine else 0
    for scale in np.geomspace(0.05, 1e-5, rounds) if per_round else ():
        S0, U0 = best_knots
        L = S0.size
        if L <= 2:
            S, U = _random_knots(rng, per_round, 1, a_pool, c_pool, 0)
        else:
            S = np.tile(S0, (per_round, 1))
            U = np.tile(U0, (per_round, 1))
            S[:, 1:-1] += scale * rng.standard_normal((per_round, L - 2))
            U[:, 1:-1] += scale * rng.standard_normal((per_round, L - 2))
            S[:, 1:-1] = np.clip(S[:, 1:-1], 1e-12, 1 - 1e-12)
            U[:, 1:-1] = np.clip(U[:, 1:-1], 1e-12, 1 - 1e-12)
        vals = _batch_cost(S, U, a, c, C, log)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, best_knots = float(vals[k]), (S[k], U[k])
    return best, best_knots


def oracle_dist(x, y, objective="j1_0", trials=1000, seed=0):
    """Randomized upper bound on the distance over general time changes."""
    C = np.abs(np.subtract.outer(np.asarray(x.values), np.asarray(y.values)))
    value, _ = random_timechange_search(x.breakpoints, y.breakpoints, C, objective, trials, seed)
    return value
