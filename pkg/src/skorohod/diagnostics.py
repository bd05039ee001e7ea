"""Compactness profiles, Monte Carlo tightness tables and maximal functionals."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import moduli
from .cadlag import StepFunction, modulus_wprime, modulus_wsecond
from .errors import DomainError, SizeError, ValidationError
from .nested import (
    NestedPath,
    eval_t,
    inner_below,
    inner_distance,
    left_limit_t,
    pairwise_distances,
    super_norm,
    w_D_prime,
    w_D_second,
)

__all__ = [
    "PathEnsemble",
    "CompactnessReport",
    "TightnessReport",
    "CONDITIONS",
    "compactness_profile",
    "tightness_report",
    "m_rst",
    "L_max",
    "discrete_max_M",
    "LazyDistances",
]

# Event labels used in tightness tables.  "@t" rows carry the time point.
CONDITIONS = (
    "super_norm",        # ||X||_D >= a
    "inner_wprime",      # w'(X(t), delta) >= eps for some t
    "wD_prime",          # w'_D(X, delta) >= eps
    "point_norm",        # ||X(t)|| >= a at a listed t
    "inner_wsecond",     # w''(X(t), delta) >= eps for some t
    "inner_left_edge",   # |X(t, delta) - X(t, 0)| >= eps for some t
    "inner_right_edge",  # |X(t, 1-) - X(t, 1 - delta)| >= eps for some t
    "wD_second",         # w''_D(X, delta) >= eps
    "left_edge",         # d(X(delta), X(0)) >= eps
    "right_edge",        # d(X(1-), X(1 - delta)) >= eps
)

MAX_M_STEPS = 512


@dataclass(frozen=True)
class PathEnsemble:
    paths: tuple
    n: int
    seed: int = 0

    def __post_init__(self):
        paths = tuple(self.paths)
        if not paths:
            raise ValidationError("an ensemble needs at least one path")
        if not all(isinstance(p, NestedPath) for p in paths):
            raise ValidationError("ensemble members must be NestedPath values")
        if int(self.n) < 1:
            raise ValidationError("ensemble label n must be positive")
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))

    def to_json(self):
        return {"n": self.n, "seed": self.seed, "paths": [p.to_json() for p in self.paths]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(tuple(NestedPath.from_json(p) for p in data["paths"]),
                       int(data["n"]), int(data.get("seed", 0)))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed ensemble: {exc!r}") from None


def _check_deltas(delta_grid):
    grid = [float(d) for d in delta_grid]
    if not grid:
        raise ValidationError("delta grid is empty")
    for d in grid:
        if not 0.0 < d < 1.0:
            raise ValidationError(f"delta values must lie in (0, 1), got {d!r}")
    return grid


def _inner_edges(seg, delta):
    left = abs(seg(delta) - seg(0.0))
    right = abs(seg.left_limit(1.0) - seg(1.0 - delta))
    return left, right


def _edge_pairs(X, delta):
    return ((eval_t(X, 0.0), eval_t(X, delta)),
            (eval_t(X, 1.0 - delta), left_limit_t(X, 1.0)))


def _outer_edges(X, delta):
    return tuple(inner_distance(u, v) for u, v in _edge_pairs(X, delta))


# -- compactness ---------------------------------------------------------------

@dataclass
class CompactnessReport:
    delta_grid: list
    variant: str
    sup_super_norm: float
    profiles: dict = field(default_factory=dict)

    def to_json(self):
        return {"delta_grid": list(self.delta_grid), "variant": self.variant,
                "sup_super_norm": self.sup_super_norm,
                "profiles": {k: list(v) for k, v in self.profiles.items()}}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "delta", "value"])
        w.writerow(["sup_super_norm", "", repr(self.sup_super_norm)])
        for name, vals in self.profiles.items():
            for d, v in zip(self.delta_grid, vals):
                w.writerow([name, repr(d), repr(v)])
        return buf.getvalue()


def compactness_profile(paths, delta_grid, variant="wprime"):
    """Largest moduli over a finite family of paths, one value per delta.

    ``variant="wprime"`` reports the partition moduli; ``"wsecond"`` the
    two-sided moduli together with the boundary increments near 0 and 1.
    """
    paths = list(paths)
    if not paths:
        raise ValidationError("no paths given")
    grid = _check_deltas(delta_grid)
    if variant not in ("wprime", "wsecond"):
        raise ValidationError(f"unknown variant {variant!r}")
    segs = {s for X in paths for s in X.segments}
    names = (["wprime_inner", "wD_prime"] if variant == "wprime" else
             ["wsecond_inner", "inner_left_edge", "inner_right_edge",
              "wD_second", "left_edge", "right_edge"])
    profiles = {k: [] for k in names}
    for d in grid:
        if variant == "wprime":
            profiles["wprime_inner"].append(max(modulus_wprime(s, d) for s in segs))
            profiles["wD_prime"].append(max(w_D_prime(X, d) for X in paths))
        else:
            profiles["wsecond_inner"].append(max(modulus_wsecond(s, d) for s in segs))
            edges = [_inner_edges(s, d) for s in segs]
            profiles["inner_left_edge"].append(max(e[0] for e in edges))
            profiles["inner_right_edge"].append(max(e[1] for e in edges))
            profiles["wD_second"].append(max(w_D_second(X, d) for X in paths))
            outer = [_outer_edges(X, d) for X in paths]
            profiles["left_edge"].append(max(e[0] for e in outer))
            profiles["right_edge"].append(max(e[1] for e in outer))
    return CompactnessReport(grid, variant, max(super_norm(X) for X in paths), profiles)


# -- lazily resolved inner distances ------------------------------------------

class LazyDistances:
    """Inner distances between the segments of one path, computed on demand.

    Threshold questions are settled by the sup-norm upper bound and by the
    endpoint/left-limit lower bound whenever possible; the exact distance is
    only computed when the bounds straddle the threshold.
    """

    def __init__(self, X):
        self.X = X
        segs = X.segments
        self.n = len(segs)
        pts = sorted({0.0, *(b for s in segs for b in s.breakpoints)})
        V = np.array([[s(p) for p in pts] for s in segs])
        self.ub = np.abs(V[:, None, :] - V[None, :, :]).max(axis=2)
        v0 = np.array([s(0.0) for s in segs])
        v1 = np.array([s(1.0) for s in segs])
        v1m = np.array([s.left_limit(1.0) for s in segs])
        self.lb = np.maximum.reduce([np.abs(np.subtract.outer(v, v)) for v in (v0, v1, v1m)])
        self.exact = np.full((self.n, self.n), np.nan)
        np.fill_diagonal(self.exact, 0.0)

    def value(self, i, j):
        if i > j:
            i, j = j, i
        v = self.exact[i, j]
        if np.isnan(v):
            if self.ub[i, j] <= self.lb[i, j]:
                v = self.ub[i, j]
            else:
                segs = self.X.segments
                v = inner_distance(segs[i], segs[j])
            self.exact[i, j] = self.exact[j, i] = v
        return v

    def at_least(self, i, j, eps):
        if i > j:
            i, j = j, i
        if self.lb[i, j] >= eps:
            return True
        if self.ub[i, j] < eps:
            return False
        v = self.exact[i, j]
        if not np.isnan(v):
            return v >= eps
        segs = self.X.segments
        return not inner_below(segs[i], segs[j], eps)

    def block_below(self, i, j, eps):
        """Whether every pair among segments ``i..j`` is closer than ``eps``."""
        if j <= i:
            return True
        ub = self.ub[i:j + 1, i:j + 1]
        if ub.max() < eps:
            return True
        if self.lb[i:j + 1, i:j + 1].max() >= eps:
            return False
        us, vs = np.nonzero(np.triu(ub >= eps, 1))
        return not any(self.at_least(i + u, i + v, eps) for u, v in zip(us, vs))

    def wprime_at_least(self, delta, eps):
        bps = self.X.t_breakpoints
        if not bps:
            return eps <= 0.0
        return moduli.partition_modulus_at_least(
            bps, lambda i, j: self.block_below(i, j, eps), delta)

    def wsecond_at_least(self, delta, eps):
        bps = self.X.t_breakpoints
        k = len(bps)
        if k < 2:
            return eps <= 0.0
        lmax = moduli._window_limits(bps, delta)
        for j in range(1, k):
            # the closest admissible left piece leaves the widest right window
            for i in range(j - 1, -1, -1):
                if lmax[i] <= j:
                    break
                if self.at_least(i, j, eps):
                    if any(self.at_least(j, l, eps) for l in range(j + 1, lmax[i] + 1)):
                        return True
                    break
        return False


# -- tightness -----------------------------------------------------------------

@dataclass
class TightnessReport:
    rows: list
    a_grid: list
    delta_grid: list
    epsilon_grid: list
    t_subset: list
    sample_sizes: dict

    FIELDS = ("n", "a", "delta", "epsilon", "condition", "count", "total", "frequency")

    def to_json(self):
        return {"a_grid": self.a_grid, "delta_grid": self.delta_grid,
                "epsilon_grid": self.epsilon_grid, "t_subset": self.t_subset,
                "sample_sizes": {str(k): v for k, v in self.sample_sizes.items()},
                "rows": self.rows}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: ("" if row[k] is None else row[k]) for k in self.FIELDS})
        return buf.getvalue()

    def frequency(self, condition, n, *, a=None, delta=None, epsilon=None):
        for row in self.rows:
            if (row["condition"] == condition and row["n"] == n and row["a"] == a
                    and row["delta"] == delta and row["epsilon"] == epsilon):
                return row["frequency"]
        raise KeyError((condition, n, a, delta, epsilon))


def _row(n, condition, count, total, a=None, delta=None, epsilon=None):
    return {"n": n, "a": a, "delta": delta, "epsilon": epsilon, "condition": condition,
            "count": int(count), "total": int(total), "frequency": count / total}


def tightness_report(ensembles, a_grid, delta_grid, epsilon_grid, t_subset=(1.0,)):
    """Empirical exceedance frequencies for the tightness conditions.

    Every event is decided exactly per path, so each frequency is a
    deterministic function of the ensemble.
    """
    ensembles = list(ensembles)
    if not ensembles:
        raise ValidationError("no ensembles given")
    a_grid = [float(a) for a in a_grid]
    eps_grid = [float(e) for e in epsilon_grid]
    t_subset = sorted(float(t) for t in t_subset)
    delta_grid = _check_deltas(delta_grid)
    if not a_grid or not eps_grid:
        raise ValidationError("a and epsilon grids must be non-empty")
    if any(e <= 0 for e in eps_grid) or any(a <= 0 for a in a_grid):
        raise ValidationError("a and epsilon values must be positive")
    if 1.0 not in t_subset or any(not 0.0 <= t <= 1.0 for t in t_subset):
        raise ValidationError("t subset must lie in [0, 1] and contain 1")
    rows = []
    sizes = {}
    for ens in ensembles:
        n, paths = ens.n, ens.paths
        total = len(paths)
        sizes[n] = sizes.get(n, 0) + total
        norms = np.array([super_norm(X) for X in paths])
        for a in a_grid:
            rows.append(_row(n, "super_norm", (norms >= a).sum(), total, a=a))
        for t in t_subset:
            pn = np.array([eval_t(X, t).sup_norm() for X in paths])
            for a in a_grid:
                rows.append(_row(n, f"point_norm@{t!r}", (pn >= a).sum(), total, a=a))
        lazy = [LazyDistances(X) for X in paths]
        seg_sets = [set(X.segments) for X in paths]
        for d in delta_grid:
            iw1 = np.array([max(modulus_wprime(s, d) for s in segs) for segs in seg_sets])
            iw2 = np.array([max(modulus_wsecond(s, d) for s in segs) for segs in seg_sets])
            edges = [[_inner_edges(s, d) for s in segs] for segs in seg_sets]
            ile = np.array([max(e[0] for e in ee) for ee in edges])
            ire = np.array([max(e[1] for e in ee) for ee in edges])
            pairs = [_edge_pairs(X, d) for X in paths]
            for e in eps_grid:
                wdp = sum(lz.wprime_at_least(d, e) for lz in lazy)
                wds = sum(lz.wsecond_at_least(d, e) for lz in lazy)
                rows.append(_row(n, "inner_wprime", (iw1 >= e).sum(), total, delta=d, epsilon=e))
                rows.append(_row(n, "wD_prime", wdp, total, delta=d, epsilon=e))
                rows.append(_row(n, "inner_wsecond", (iw2 >= e).sum(), total, delta=d, epsilon=e))
                rows.append(_row(n, "inner_left_edge", (ile >= e).sum(), total, delta=d, epsilon=e))
                rows.append(_row(n, "inner_right_edge", (ire >= e).sum(), total, delta=d,
                                 epsilon=e))
                rows.append(_row(n, "wD_second", wds, total, delta=d, epsilon=e))
                for side, name in enumerate(("left_edge", "right_edge")):
                    hits = sum(not inner_below(*pp[side], e) for pp in pairs)
                    rows.append(_row(n, name, hits, total, delta=d, epsilon=e))
    return TightnessReport(rows, a_grid, delta_grid, eps_grid, t_subset, sizes)


# -- maximal functionals ---------------------------------------------------------

def _increment(metric):
    if metric == "j1":
        return inner_distance
    if metric == "uniform":
        return lambda x, y: (x - y).sup_norm()
    raise ValidationError(f"unknown metric {metric!r}; use 'j1' or 'uniform'")


def m_rst(X, r, s, t, metric="j1"):
    """Smaller of the two increments ``X(r) -> X(s)`` and ``X(s) -> X(t)``."""
    r, s, t = float(r), float(s), float(t)
    if not 0.0 <= r <= s <= t <= 1.0:
        raise DomainError(f"need 0 <= r <= s <= t <= 1, got {r}, {s}, {t}")
    d = _increment(metric)
    xr, xs, xt = eval_t(X, r), eval_t(X, s), eval_t(X, t)
    return min(d(xr, xs), d(xs, xt))


def L_max(X, delta, metric="j1"):
    """Supremum of :func:`m_rst` over ``r <= s <= t`` with ``t - r < delta``.

    Enumerates the pieces hit by ``r``, ``s`` and ``t``.  Piece ``i`` spans
    ``[e_i, e_{i+1})``; points in pieces ``i <= l`` can be closer than
    ``delta`` exactly when ``e_l - e_{i+1} < delta``.
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta!r}")
    d = _increment(metric)
    segs = X.segments
    edges = (0.0,) + X.t_breakpoints
    k = len(segs)
    cache = {}

    def dist(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = d(segs[i], segs[j]) if i != j else 0.0
        return cache[(i, j)]

    best = 0.0
    for i in range(k):
        r_hi = edges[i + 1] if i + 1 < k else 1.0
        for l in range(i + 2, k):
            if not edges[l] - r_hi < delta - moduli.EPS:
                break
            for j in range(i + 1, l):
                best = max(best, min(dist(min(i, j), max(i, j)), dist(min(j, l), max(j, l))))
    return best


def discrete_max_M(increments):
    """``max_{i <= j <= k} min(||S_j - S_i||, ||S_k - S_j||)`` for partial sums ``S``."""
    increments = list(increments)
    n = len(increments)
    if n > MAX_M_STEPS:
        raise SizeError(f"{n} increments exceed the cap of {MAX_M_STEPS}")
    if n < 2:
        return 0.0
    sums = [StepFunction()]
    for inc in increments:
        sums.append(sums[-1] + inc)
    pts = sorted({0.0, *(b for s in sums for b in s.breakpoints)})
    V = np.array([[s(p) for p in pts] for s in sums])
    before = np.zeros(n + 1)
    after = np.zeros(n + 1)
    for j in range(n + 1):
        gap = np.abs(V[j] - V).max(axis=1)
        before[j] = gap[:j + 1].max()
        after[j] = gap[j:].max()
    return float(np.minimum(before, after).max())
