"""Random step functions and time changes for property checks and the corpus."""

from __future__ import annotations

import numpy as np

from .cadlag import StepFunction, TimeChange


def random_step(rng, max_jumps=5, grid=None, value_range=(-3.0, 3.0), integer_values=False,
                allow_one=False):
    """Random canonical step function.

    With ``grid`` set, breakpoints are drawn from ``{1/grid, ..., (grid-1)/grid}``
    (plus 1 when ``allow_one``), which makes exact comparisons reproducible.
    """
    k = int(rng.integers(0, max_jumps + 1))
    if grid is None:
        bps = np.sort(rng.uniform(0.0, 1.0, size=k))
        bps = bps[bps > 0.0]
        bps = np.unique(bps)
    else:
        top = grid if allow_one else grid - 1
        k = min(k, top)
        bps = np.sort(rng.choice(np.arange(1, top + 1), size=k, replace=False)) / grid
    if integer_values:
        lo, hi = int(value_range[0]), int(value_range[1])
        vals = rng.integers(lo, hi + 1, size=bps.size + 1).astype(float)
    else:
        vals = rng.uniform(*value_range, size=bps.size + 1)
    return StepFunction(bps.tolist(), vals.tolist())


def random_timechange(rng, max_knots=4, spread=1.0):
    """Random piecewise-linear time change with up to ``max_knots`` interior knots."""
    m = int(rng.integers(0, max_knots + 1))
    s = np.sort(rng.uniform(0.0, 1.0, size=m))
    u = np.sort(rng.uniform(0.0, 1.0, size=m))
    u = (1.0 - spread) * s + spread * u
    knots = [(0.0, 0.0)]
    for a, b in zip(s.tolist(), u.tolist()):
        if a - knots[-1][0] > 1e-9 and b - knots[-1][1] > 1e-9 and a < 1.0 - 1e-9 and b < 1.0 - 1e-9:
            knots.append((a, b))
    knots.append((1.0, 1.0))
    return TimeChange(tuple(knots))


def _perturb(rng, x, scale):
    # nudge jump times and values so neighbouring segments stay J1-close
    bps = np.asarray(x.breakpoints, dtype=float)
    vals = np.asarray(x.values, dtype=float)
    if bps.size and rng.random() < 0.7:
        bps = np.clip(bps + scale * rng.standard_normal(bps.size), 1e-3, 1.0)
        bps = np.unique(bps)
        vals = vals[: bps.size + 1]
    if rng.random() < 0.7:
        vals = vals + scale * rng.standard_normal(vals.size)
    if rng.random() < 0.3:
        at = float(rng.uniform(0.0, 1.0))
        if at > 0 and at not in bps:
            k = int(np.searchsorted(bps, at))
            bps = np.insert(bps, k, at)
            vals = np.insert(vals, k + 1, vals[k] + rng.normal())
    return StepFunction(bps.tolist(), vals.tolist())


def random_nested(rng, max_switches=6, max_jumps=4, grid=None):
    """Random nested step path mixing fresh segments and small perturbations."""
    from .nested import NestedPath

    k = int(rng.integers(0, max_switches + 1))
    if grid is None:
        bps = np.unique(rng.uniform(0.0, 1.0, size=k))
        bps = bps[bps > 0.0].tolist()
    else:
        k = min(k, grid)
        bps = (np.sort(rng.choice(np.arange(1, grid + 1), size=k, replace=False)) / grid).tolist()
    segs = [random_step(rng, max_jumps)]
    for _ in bps:
        if rng.random() < 0.5:
            segs.append(_perturb(rng, segs[-1], float(rng.choice([0.01, 0.05, 0.2]))))
        else:
            segs.append(random_step(rng, max_jumps))
    return NestedPath(bps, segs)
