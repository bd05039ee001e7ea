"""Càdlàg step functions and time changes on [0, 1]."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from . import moduli
from .errors import DomainError, ValidationError

__all__ = [
    "StepFunction",
    "TimeChange",
    "Interval",
    "make_step",
    "eval",
    "evaluate",
    "left_limit",
    "constant",
    "indicator",
    "sup_norm",
    "oscillation",
    "modulus_w",
    "modulus_wprime",
    "modulus_wsecond",
    "max_jump_size",
    "timechange_devnorm",
    "timechange_lognorm",
    "compose",
]


def _canonical(breakpoints, values):
    """Drop zero-size jumps; of duplicated breakpoints the last value wins."""
    bps = []
    vals = [values[0]]
    for b, v in zip(breakpoints, values[1:]):
        if bps and b == bps[-1]:
            vals[-1] = v
            if len(vals) >= 2 and vals[-1] == vals[-2]:
                bps.pop()
                vals.pop()
            continue
        if v == vals[-1]:
            continue
        bps.append(b)
        vals.append(v)
    return tuple(bps), tuple(vals)


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous piecewise-constant function on [0, 1].

    ``values[m]`` is taken on ``[b_m, b_{m+1})`` where ``b_0 = 0`` and the
    last piece is closed at 1.  A breakpoint equal to 1 puts the last value
    on the single point ``{1}``.  Equal adjacent values are merged on
    construction, so ``breakpoints`` is exactly the jump set.
    """

    breakpoints: tuple = ()
    values: tuple = (0.0,)

    def __post_init__(self):
        try:
            bps = tuple(float(b) for b in self.breakpoints)
            vals = tuple(float(v) for v in self.values)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"non-numeric step function data: {exc}") from None
        if len(vals) != len(bps) + 1:
            raise ValidationError(
                f"need len(values) == len(breakpoints) + 1, got {len(vals)} and {len(bps)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("values must be finite")
        prev = 0.0
        for b in bps:
            if not (b > prev and b <= 1.0):
                raise ValidationError(
                    f"breakpoints must be strictly increasing inside (0, 1], got {list(bps)}")
            prev = b
        bps, vals = _canonical(bps, vals)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def _trusted(cls, breakpoints, values):
        # Sorted input produced internally; only canonicalise.
        obj = object.__new__(cls)
        bps, vals = _canonical(tuple(breakpoints), tuple(values))
        object.__setattr__(obj, "breakpoints", bps)
        object.__setattr__(obj, "values", vals)
        return obj

    # -- evaluation -------------------------------------------------------
    def __call__(self, s):
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"s must lie in [0, 1], got {s!r}")
        return self.values[bisect_right(self.breakpoints, s)]

    def left_limit(self, s):
        s = float(s)
        if not 0.0 < s <= 1.0:
            raise DomainError(f"left limits exist on (0, 1], got {s!r}")
        return self.values[bisect_left(self.breakpoints, s)]

    @property
    def n_jumps(self):
        return len(self.breakpoints)

    def jump_sizes(self):
        v = self.values
        return tuple(v[m + 1] - v[m] for m in range(len(self.breakpoints)))

    # -- arithmetic on the common refinement ------------------------------
    def _combine(self, other, op):
        if not isinstance(other, StepFunction):
            return NotImplemented
        a, b = self.breakpoints, other.breakpoints
        i = j = 0
        bps, vals = [], [op(self.values[0], other.values[0])]
        while i < len(a) or j < len(b):
            if j == len(b) or (i < len(a) and a[i] < b[j]):
                pos = a[i]
                i += 1
            elif i == len(a) or b[j] < a[i]:
                pos = b[j]
                j += 1
            else:
                pos = a[i]
                i += 1
                j += 1
            bps.append(pos)
            vals.append(op(self.values[i], other.values[j]))
        return StepFunction._trusted(bps, vals)

    def __add__(self, other):
        return self._combine(other, lambda u, v: u + v)

    def __sub__(self, other):
        return self._combine(other, lambda u, v: u - v)

    def __neg__(self):
        return StepFunction._trusted(self.breakpoints, [-v for v in self.values])

    def __mul__(self, c):
        c = float(c)
        return StepFunction._trusted(self.breakpoints, [c * v for v in self.values])

    __rmul__ = __mul__

    def sup_norm(self):
        return max(abs(v) for v in self.values)

    def to_json(self):
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(data["breakpoints"], data["values"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed step function: {exc!r}") from None


def make_step(breakpoints, values):
    """Build a canonical :class:`StepFunction`."""
    return StepFunction(breakpoints, values)


def evaluate(x, s):
    """``x(s)`` for ``s`` in [0, 1]."""
    return x(s)


eval = evaluate  # noqa: A001  (public name of the operation)


def left_limit(x, s):
    """``x(s-)`` for ``s`` in (0, 1]."""
    return x.left_limit(s)


def constant(c=0.0):
    return StepFunction((), (c,))


def indicator(a, height=1.0):
    """``height * 1_{[a, 1]}``."""
    return StepFunction((a,), (0.0, height))


def sup_norm(x):
    return x.sup_norm()


@dataclass(frozen=True)
class Interval:
    """``[lo, hi]`` or, with ``closed=False``, ``[lo, hi)``."""

    lo: float
    hi: float
    closed: bool = True

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValidationError(f"need 0 <= lo <= hi <= 1, got [{self.lo}, {self.hi}]")


def oscillation(x, T):
    """``sup |x(s1) - x(s2)|`` over ``s1, s2`` in ``T``."""
    idx = moduli.pieces_meeting(x.breakpoints, T.lo, T.hi, T.closed)
    if len(idx) == 0:
        return 0.0
    vals = x.values[idx.start:idx.stop]
    return max(vals) - min(vals)


def _pair_matrix(values):
    v = np.asarray(values, dtype=float)
    return np.abs(v[:, None] - v[None, :])


def modulus_wprime(x, delta):
    """Infimum over delta-sparse partitions of the largest block oscillation."""
    delta = moduli.check_delta(delta)
    return moduli.partition_modulus(x.breakpoints, moduli.scalar_range_table(x.values), delta)


def modulus_wsecond(x, delta):
    """``sup min(|x(s) - x(s1)|, |x(s2) - x(s)|)`` over ``s1 <= s <= s2``, ``s2 - s1 <= delta``."""
    delta = moduli.check_delta(delta)
    return moduli.two_sided_modulus(x.breakpoints, _pair_matrix(x.values), delta)


def modulus_w(x, delta):
    """Ordinary modulus of continuity ``sup_{|s - t| <= delta} |x(s) - x(t)|``."""
    return moduli.window_modulus(x.breakpoints, _pair_matrix(x.values), delta)


def max_jump_size(x):
    return max((abs(h) for h in x.jump_sizes()), default=0.0)


def _interp(xs, ys, v):
    # Piecewise-linear interpolation; exact at knots.  compose() and the
    # matching dynamic programme both rely on this exact formula.
    idx = bisect_right(xs, v) - 1
    if idx >= len(xs) - 1:
        return ys[-1]
    x0 = xs[idx]
    if v == x0:
        return ys[idx]
    return ys[idx] + (v - x0) * (ys[idx + 1] - ys[idx]) / (xs[idx + 1] - x0)


@dataclass(frozen=True)
class TimeChange:
    """Strictly increasing piecewise-linear bijection of [0, 1]."""

    knots: tuple = ((0.0, 0.0), (1.0, 1.0))

    def __post_init__(self):
        try:
            knots = tuple((float(s), float(u)) for s, u in self.knots)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed knots: {exc}") from None
        if len(knots) < 2 or knots[0] != (0.0, 0.0) or knots[-1] != (1.0, 1.0):
            raise ValidationError("knots must start at (0, 0) and end at (1, 1)")
        for (s0, u0), (s1, u1) in zip(knots, knots[1:]):
            if not (s1 > s0 and u1 > u0):
                raise ValidationError(
                    "knot coordinates must be strictly increasing (finite positive slopes)")
        object.__setattr__(self, "knots", knots)

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def through(cls, pairs):
        """Interpolant through interior pairs ``(s, lambda(s))``."""
        inner = [(float(s), float(u)) for s, u in pairs if (s, u) != (1.0, 1.0)]
        return cls(((0.0, 0.0), *inner, (1.0, 1.0)))

    @property
    def s(self):
        return tuple(k[0] for k in self.knots)

    @property
    def u(self):
        return tuple(k[1] for k in self.knots)

    def __call__(self, s):
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"time changes act on [0, 1], got {s!r}")
        return _interp(self.s, self.u, s)

    def inverse_at(self, u):
        u = float(u)
        if not 0.0 <= u <= 1.0:
            raise DomainError(f"time changes act on [0, 1], got {u!r}")
        return _interp(self.u, self.s, u)

    def inverse(self):
        return TimeChange(tuple((u, s) for s, u in self.knots))

    def slopes(self):
        return tuple((u1 - u0) / (s1 - s0)
                     for (s0, u0), (s1, u1) in zip(self.knots, self.knots[1:]))

    def to_json(self):
        return {"knots": [list(k) for k in self.knots]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(tuple(tuple(k) for k in data["knots"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed time change: {exc!r}") from None


def timechange_devnorm(lam):
    """``sup |lambda(s) - s|``, attained at a knot."""
    return max(abs(u - s) for s, u in lam.knots)


def timechange_lognorm(lam):
    """``sup_{s < s'} |log((lambda(s') - lambda(s)) / (s' - s))|``.

    Chord slopes are weighted averages of segment slopes, so the supremum is
    the largest ``|log slope|`` over the linear segments.
    """
    slopes = lam.slopes()
    if min(slopes) <= 0.0:
        raise ValidationError("time change has a non-positive slope")
    return max(abs(math.log(m)) for m in slopes)


def compose(x, lam):
    """``x o lambda``: the jump at ``b`` moves to ``lambda^{-1}(b)``."""
    us, ss = lam.u, lam.s
    return StepFunction._trusted([_interp(us, ss, b) for b in x.breakpoints], x.values)
