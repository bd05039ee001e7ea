"""Paths with values in the space of step functions.

A :class:`NestedPath` is piecewise constant in ``t``; each piece holds a
:class:`~skorohod.cadlag.StepFunction` of ``s``.  Distances between pieces
are the log-slope Skorohod distance of the scalar layer, so every supremum
over ``t`` reduces to a maximum over finitely many pieces.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import moduli
from .cadlag import StepFunction, _interp, constant, timechange_devnorm, timechange_lognorm
from .errors import DomainError, ValidationError
from .metric import (
    DistanceResult,
    Matching,
    _objective,
    solve_matching,
    random_timechange_search,
)
from .metric import d_j1_0 as _scalar_d_j1_0
from .metric import distance_below

__all__ = [
    "NestedPath",
    "Grid",
    "eval_t",
    "eval_ts",
    "left_limit_t",
    "super_norm",
    "rho_D",
    "d_D",
    "d_D0",
    "nested_distance",
    "w_D",
    "modulus_w_D",
    "max_jump",
    "disc_set",
    "w_D_prime",
    "w_D_second",
    "w_u_second",
    "discretize",
    "assemble",
    "pointwise_sum",
    "inner_distance",
    "inner_below",
    "pairwise_distances",
    "oracle_d_D",
]


@lru_cache(maxsize=200_000)
def inner_distance(x, y):
    """Cached log-slope distance between two segment values."""
    return _scalar_d_j1_0(x, y).value


@lru_cache(maxsize=200_000)
def inner_below(x, y, eps):
    """Cached ``inner_distance(x, y) < eps``."""
    return distance_below(x, y, eps, "j1_0")


def _segments_canonical(t_breakpoints, segments):
    bps, segs = [], [segments[0]]
    for b, seg in zip(t_breakpoints, segments[1:]):
        if bps and b == bps[-1]:
            segs[-1] = seg
            if len(segs) >= 2 and segs[-1] == segs[-2]:
                bps.pop()
                segs.pop()
            continue
        if seg == segs[-1]:
            continue
        bps.append(b)
        segs.append(seg)
    return tuple(bps), tuple(segs)


@dataclass(frozen=True)
class NestedPath:
    """Step path ``t -> X(t)`` with ``X(t)`` a step function of ``s``.

    ``segments[m]`` is the value on ``[t_m, t_{m+1})`` with ``t_0 = 0``;
    the last segment also covers ``t = 1``.
    """

    t_breakpoints: tuple = ()
    segments: tuple = (StepFunction(),)

    def __post_init__(self):
        try:
            bps = tuple(float(b) for b in self.t_breakpoints)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"non-numeric t breakpoints: {exc}") from None
        segs = tuple(self.segments)
        if not all(isinstance(s, StepFunction) for s in segs):
            raise ValidationError("segments must be StepFunction values")
        if len(segs) != len(bps) + 1:
            raise ValidationError(
                f"need len(segments) == len(t_breakpoints) + 1, got {len(segs)} and {len(bps)}")
        prev = 0.0
        for b in bps:
            if not (b > prev and b <= 1.0):
                raise ValidationError(
                    f"t breakpoints must be strictly increasing inside (0, 1], got {list(bps)}")
            prev = b
        bps, segs = _segments_canonical(bps, segs)
        object.__setattr__(self, "t_breakpoints", bps)
        object.__setattr__(self, "segments", segs)

    @classmethod
    def _trusted(cls, t_breakpoints, segments):
        obj = object.__new__(cls)
        bps, segs = _segments_canonical(tuple(t_breakpoints), tuple(segments))
        object.__setattr__(obj, "t_breakpoints", bps)
        object.__setattr__(obj, "segments", segs)
        return obj

    @classmethod
    def constant(cls, x):
        return cls((), (x,))

    @classmethod
    def zero(cls):
        return cls((), (constant(0.0),))

    @property
    def n_switches(self):
        return len(self.t_breakpoints)

    def __add__(self, other):
        return pointwise_sum(self, other)

    def __sub__(self, other):
        return pointwise_sum(self, other, sign=-1.0)

    def to_json(self):
        return {"t_breakpoints": list(self.t_breakpoints),
                "segments": [s.to_json() for s in self.segments]}

    @classmethod
    def from_json(cls, data):
        try:
            segs = [StepFunction.from_json(s) for s in data["segments"]]
            return cls(data["t_breakpoints"], segs)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed nested path: {exc!r}") from None


@dataclass(frozen=True)
class Grid:
    """Partition ``0 = t_0 < t_1 < ... < t_v = 1``."""

    points: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if len(pts) < 2 or pts[0] != 0.0 or pts[-1] != 1.0:
            raise ValidationError("grid must start at 0 and end at 1")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValidationError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, v):
        return cls(tuple(i / v for i in range(v)) + (1.0,))

    @property
    def mesh(self):
        return max(b - a for a, b in zip(self.points, self.points[1:]))


def _check_t(t, left=False):
    t = float(t)
    ok = 0.0 < t <= 1.0 if left else 0.0 <= t <= 1.0
    if not ok:
        raise DomainError(f"t out of range: {t!r}")
    return t


def eval_t(X, t):
    """``X(t)``."""
    return X.segments[bisect_right(X.t_breakpoints, _check_t(t))]


def eval_ts(X, t, s):
    """``X(t, s)``."""
    return eval_t(X, t)(s)


def left_limit_t(X, t):
    """``X(t-)``."""
    return X.segments[bisect_left(X.t_breakpoints, _check_t(t, left=True))]


def super_norm(X):
    return max(seg.sup_norm() for seg in X.segments)


def _merge_states(a, b):
    # states (i, j) visited on the common refinement of two breakpoint lists;
    # equal positions are crossed together
    i = j = 0
    states = [(0, 0)]
    while i < len(a) or j < len(b):
        pos = min(a[i] if i < len(a) else 2.0, b[j] if j < len(b) else 2.0)
        while i < len(a) and a[i] == pos:
            i += 1
        while j < len(b) and b[j] == pos:
            j += 1
        states.append((i, j))
    return states


def pointwise_sum(X, Y, sign=1.0):
    """``X + sign * Y`` on the common refinement of the t-pieces."""
    states = _merge_states(X.t_breakpoints, Y.t_breakpoints)
    bps = sorted(set(X.t_breakpoints) | set(Y.t_breakpoints))
    segs = [X.segments[i] + sign * Y.segments[j] for i, j in states]
    return NestedPath._trusted(bps, segs)


def rho_D(X, Y):
    """Uniform distance: largest inner distance on the common refinement."""
    return max(inner_distance(X.segments[i], Y.segments[j])
               for i, j in _merge_states(X.t_breakpoints, Y.t_breakpoints))


def cross_costs(X, Y):
    """Inner distances between every segment of ``X`` and every segment of ``Y``."""
    return np.array([[inner_distance(u, v) for v in Y.segments] for u in X.segments])


def _witness_cost(X, Y, lam, objective):
    # outer norm of the time change and the sup over t of the inner distance
    us, ss = lam.u, lam.s
    pos = [_interp(us, ss, c) for c in Y.t_breakpoints]
    states = _merge_states(X.t_breakpoints, pos)
    inner = max(inner_distance(X.segments[i], Y.segments[j]) for i, j in states)
    norm = timechange_lognorm(lam) if objective == "j1_0" else timechange_devnorm(lam)
    return max(norm, inner), inner


def nested_distance(X, Y, objective="j1"):
    """Skorohod distance one level up, with witness."""
    objective = _objective(objective)
    a, c = X.t_breakpoints, Y.t_breakpoints

    def evaluate(pairs):
        lam = Matching(pairs).timechange(a, c)
        return _witness_cost(X, Y, lam, objective)[0]

    _, pairs = solve_matching(a, c, cross_costs(X, Y), objective, evaluate)
    matching = Matching(pairs)
    return DistanceResult(evaluate(pairs), objective, matching, matching.timechange(a, c))


def d_D(X, Y):
    return nested_distance(X, Y, "j1")


def d_D0(X, Y):
    return nested_distance(X, Y, "j1_0")


def witness_inner_sup(X, Y, result):
    """``sup_t d(X(t), Y(lambda(t)))`` for the witness of ``result``."""
    return _witness_cost(X, Y, result.timechange, result.objective)[1]


def oracle_d_D(X, Y, objective="j1", trials=1000, seed=0):
    """Randomized search over outer time changes; scores by direct evaluation."""
    C = cross_costs(X, Y)
    value, _ = random_timechange_search(X.t_breakpoints, Y.t_breakpoints, C, objective,
                                        trials, seed)
    return value


# -- moduli ----------------------------------------------------------------

def pairwise_distances(X):
    """Symmetric matrix of inner distances between the segments of ``X``."""
    segs = X.segments
    n = len(segs)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = inner_distance(segs[i], segs[j])
    return D


def uniform_distances(X):
    segs = X.segments
    n = len(segs)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = (segs[i] - segs[j]).sup_norm()
    return D


def w_D(X, T):
    """Largest inner distance between values taken on ``T``."""
    idx = moduli.pieces_meeting(X.t_breakpoints, T.lo, T.hi, T.closed)
    segs = X.segments[idx.start:idx.stop] if len(idx) else ()
    best = 0.0
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            best = max(best, inner_distance(segs[i], segs[j]))
    return best


def max_jump(X):
    segs = X.segments
    return max((inner_distance(segs[m - 1], segs[m]) for m in range(1, len(segs))), default=0.0)


def disc_set(X):
    return tuple(X.t_breakpoints)


def w_D_prime(X, delta):
    delta = moduli.check_delta(delta)
    if not X.t_breakpoints:
        return 0.0
    table = moduli.range_cost_table(pairwise_distances(X))
    return moduli.partition_modulus(X.t_breakpoints, table, delta)


def w_D_second(X, delta):
    delta = moduli.check_delta(delta)
    if len(X.t_breakpoints) < 2:
        return 0.0
    return moduli.two_sided_modulus(X.t_breakpoints, pairwise_distances(X), delta)


def w_u_second(X, delta):
    delta = moduli.check_delta(delta)
    if len(X.t_breakpoints) < 2:
        return 0.0
    return moduli.two_sided_modulus(X.t_breakpoints, uniform_distances(X), delta)


def modulus_w_D(X, delta):
    """Ordinary modulus ``sup d(X(t1), X(t2))`` over ``|t1 - t2| <= delta``."""
    if not X.t_breakpoints:
        return 0.0
    return moduli.window_modulus(X.t_breakpoints, pairwise_distances(X), delta)


# -- discretization ----------------------------------------------------------

def assemble(values, sigma):
    """Path equal to ``values[i]`` on ``[t_i, t_{i+1})`` and ``values[-1]`` at 1."""
    values = tuple(values)
    if len(values) != len(sigma.points):
        raise ValidationError(
            f"need one value per grid point, got {len(values)} for {len(sigma.points)}")
    return NestedPath(sigma.points[1:], values)


def discretize(X, sigma):
    """Sample ``X`` at the grid points and hold each value until the next one."""
    return assemble([eval_t(X, t) for t in sigma.points], sigma)
